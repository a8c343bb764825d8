"""Voltage-to-exchange model, pulse calibration, fingerprints, and N_osc.

The exchange model is phenomenological: exponential in barrier voltage and
quadratic in detuning about the symmetric point,
J(vb, vd) = j0 * exp(vb / vb0) * (1 + (vd / eps0)**2).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import curve_fit

from .lattice import DotId, GridSpec
from .pulseseq import PulseSeq, execute_pulse_seq
from .statevec import (
    FieldSpec,
    NoiseSample,
    apply_exchange,
    evolve_segment,
    measure_singlet,
    prepare_state,
)


class CalibrationError(ValueError):
    """Requested exchange is outside the model's voltage range."""


class FitNotConvergedError(RuntimeError):
    """Decay fit failed; carries residual diagnostics."""

    def __init__(self, message: str, residuals: Optional[np.ndarray] = None):
        super().__init__(message)
        self.residuals = residuals


@dataclass(frozen=True)
class ExchangeModel:
    j0_hz: float  # exchange at zero barrier voltage, symmetric point
    v_b0: float  # exponential barrier voltage scale (V)
    eps0: float  # detuning curvature scale (V)
    v_min: float = -1.0  # reachable barrier voltage range (V)
    v_max: float = 1.0

    def __post_init__(self):
        if self.j0_hz <= 0 or self.v_b0 <= 0 or self.eps0 <= 0:
            raise ValueError("j0_hz, v_b0 and eps0 must all be > 0")
        if self.v_min >= self.v_max:
            raise ValueError("empty voltage range")


def j_of_v(model: ExchangeModel, barrier_v: float, detuning_v: float = 0.0) -> float:
    """Exchange (Hz) at the given barrier and detuning voltages."""
    return model.j0_hz * np.exp(barrier_v / model.v_b0) * (1.0 + (detuning_v / model.eps0) ** 2)


@dataclass(frozen=True)
class PulseSpec:
    axis_label: str
    theta_target: float
    t_pulse_s: float
    barrier_v: float
    detuning_v: float
    j_hz: float


def calibrate_pulse(
    model: ExchangeModel, axis_label: str, theta_target: float, t_pulse_s: float
) -> PulseSpec:
    """Barrier voltage realizing theta_target in t_pulse at the symmetric point."""
    if not 0 < theta_target <= 2 * np.pi:
        raise ValueError("theta_target must be in (0, 2*pi]")
    if t_pulse_s <= 0:
        raise ValueError("t_pulse_s must be > 0")
    j_req = theta_target / (2 * np.pi * t_pulse_s)
    barrier = model.v_b0 * np.log(j_req / model.j0_hz)
    if not model.v_min <= barrier <= model.v_max:
        raise CalibrationError(
            f"J = {j_req:.4g} Hz needs barrier {barrier:.4g} V, outside "
            f"[{model.v_min}, {model.v_max}] V"
        )
    return PulseSpec(axis_label, theta_target, t_pulse_s, barrier, 0.0, j_req)


@dataclass
class FingerprintMap:
    v1: np.ndarray  # barrier voltages
    v2: np.ndarray  # detuning voltages
    p_singlet: np.ndarray  # shape (len(v1), len(v2))

    def __post_init__(self):
        if self.p_singlet.shape != (len(self.v1), len(self.v2)):
            raise ValueError("probability matrix shape mismatch")


def _noise_sample(grid: GridSpec, sigma_j_rel: float, sigma_bz_hz: float,
                  rng: np.random.Generator) -> NoiseSample:
    n = grid.n_rows * grid.n_cols
    delta = rng.normal(0.0, sigma_bz_hz, size=n) if sigma_bz_hz > 0 else np.zeros(n)
    j_scale = {}
    if sigma_j_rel > 0:
        for ax in grid.all_axes():
            j_scale[ax.label] = max(np.exp(rng.normal(0.0, sigma_j_rel)), 1e-6)
    return NoiseSample(delta, j_scale)


def simulate_fingerprint(
    grid: GridSpec,
    spam_pair: tuple[DotId, DotId],
    target_axis: str,
    route: PulseSeq,
    model: ExchangeModel,
    v1: np.ndarray,
    v2: np.ndarray,
    t_evolve_s: float,
    *,
    sigma_j_rel: float = 0.0,
    sigma_bz_hz: float = 0.0,
    b_uniform_hz: float = 0.0,
    shots: Optional[int] = None,
    seed: int = 0,
) -> FingerprintMap:
    """Singlet-return map over (barrier, detuning) for one exchange axis.

    Per cell: prepare a singlet at spam_pair, run the swap route, evolve on
    target_axis at J(v1, v2) for t_evolve, reverse the route, and read the
    singlet probability back at spam_pair. shots=None is probability mode
    (one exact evaluation per noise draw); an integer averages Bernoulli
    outcomes. RNG substreams are keyed by (seed, cell, shot) so any
    evaluation order reproduces the same map.
    """
    ax = grid.axis_by_label(target_axis)
    if not grid.axis_is_live(ax):
        raise ValueError(f"target axis {target_axis} is dead")
    n = grid.n_rows * grid.n_cols
    sp = (grid.dot_index(spam_pair[0]), grid.dot_index(spam_pair[1]))
    pair = (grid.dot_index(ax.a), grid.dot_index(ax.b))
    n_draws = shots if shots is not None else 1
    out = np.empty((len(v1), len(v2)))
    init = prepare_state(n, sp)
    for i, vb in enumerate(v1):
        for j, vd in enumerate(v2):
            j_hz = j_of_v(model, vb, vd)
            acc = 0.0
            for s in range(n_draws):
                rng = np.random.default_rng(
                    np.random.SeedSequence(entropy=seed, spawn_key=(i, j, s))
                )
                noise = _noise_sample(grid, sigma_j_rel, sigma_bz_hz, rng)
                fields = FieldSpec(b_uniform_hz, noise)
                st = execute_pulse_seq(init, grid, route, fields)
                evolve_segment(st, (pair, j_hz, target_axis), t_evolve_s, fields, in_place=True)
                execute_pulse_seq(st, grid, route.reversed(), fields, in_place=True)
                p = measure_singlet(st, sp)
                if shots is None:
                    acc += p
                else:
                    acc += float(rng.random() < p)
            out[i, j] = acc / n_draws
    return FingerprintMap(np.asarray(v1, float), np.asarray(v2, float), out)


def simulate_decay_trace(
    j_hz: float,
    times_s: np.ndarray,
    *,
    sigma_j_rel: float = 0.0,
    n_samples: int = 1,
    seed: int = 0,
) -> np.ndarray:
    """Monte Carlo singlet-return trace for exchange oscillations on 3 spins.

    A singlet on spins (0, 1) evolves under exchange on (1, 2) whose J is
    scaled by one quasi-static Gaussian factor per sample; the returned
    trace averages the simulated three-spin singlet probability.
    """
    times_s = np.asarray(times_s, float)
    rng = np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(0xDECA,)))
    acc = np.zeros_like(times_s)
    init = prepare_state(3, (0, 1))
    for _ in range(n_samples):
        scale = np.exp(rng.normal(0.0, sigma_j_rel)) if sigma_j_rel > 0 else 1.0
        st = init.copy()
        t_prev = 0.0
        for k, t in enumerate(times_s):
            apply_exchange(st, (1, 2), 2 * np.pi * j_hz * scale * (t - t_prev), in_place=True)
            t_prev = t
            acc[k] += measure_singlet(st, (0, 1))
    return acc / n_samples


def gaussian_nosc_prediction(sigma_j_rel: float) -> float:
    """Quasi-static Gaussian phase averaging: N_osc = 1 / (sqrt(2)*pi*sigma_rel)."""
    return 1.0 / (np.sqrt(2.0) * np.pi * sigma_j_rel)


@dataclass
class NoscEstimate:
    n_osc: float
    unbounded: bool
    frequency_hz: float
    envelope_time_s: float
    envelope_power: int
    amplitude: float
    offset: float
    phase: float


def extract_n_osc(
    times_s: np.ndarray, p_singlet: np.ndarray, envelope_power: int = 2
) -> NoscEstimate:
    """Fit A*cos(2*pi*f*t + phi)*exp(-(t/tau)^p) + c; N_osc = f * tau.

    Frequency is seeded from the dominant spectral peak and tau from a
    log-envelope regression. A fitted tau beyond 10x the trace duration is
    reported as unbounded (no resolvable decay).
    """
    if envelope_power not in (1, 2):
        raise ValueError("envelope power must be 1 or 2")
    t = np.asarray(times_s, float)
    y = np.asarray(p_singlet, float)
    if t.size < 16:
        raise ValueError("trace too short to fit")
    span = t[-1] - t[0]
    dt = span / (t.size - 1)

    c0 = float(np.mean(y))
    resid = y - c0
    spec = np.abs(np.fft.rfft(resid))
    freqs = np.fft.rfftfreq(t.size, d=dt)
    k = int(np.argmax(spec[1:])) + 1
    f0 = float(freqs[k])
    a0 = float(2.0 * spec[k] / t.size)

    # Envelope seed: per-cycle peak amplitudes, linear fit in t**p space
    period = max(int(round(1.0 / (f0 * dt))), 2)
    highs = []
    for start in range(0, t.size - period, period):
        seg = slice(start, start + period)
        highs.append((np.mean(t[seg]), np.max(np.abs(resid[seg]))))
    highs = np.array(highs)
    good = highs[:, 1] > 1e-3 * a0
    tau0 = span
    if good.sum() >= 3:
        tp = highs[good, 0] ** envelope_power
        le = np.log(highs[good, 1])
        slope = np.polyfit(tp, le, 1)[0]
        if slope < 0:
            tau0 = float((-1.0 / slope) ** (1.0 / envelope_power))

    def model(tt, amp, f, phi, tau, c):
        return amp * np.cos(2 * np.pi * f * tt + phi) * np.exp(-((tt / tau) ** envelope_power)) + c

    try:
        popt, pcov = curve_fit(
            model,
            t,
            y,
            p0=[a0, f0, 0.0, tau0, c0],
            bounds=([0.0, 0.0, -np.pi, dt, -1.0], [2.0, np.inf, np.pi, 1e4 * span, 2.0]),
            maxfev=20000,
        )
    except RuntimeError as exc:
        raise FitNotConvergedError(f"oscillation fit failed: {exc}") from exc
    amp, f, phi, tau, c = popt
    resid_final = y - model(t, *popt)
    rms = float(np.sqrt(np.mean(resid_final**2)))
    if rms > 0.2:
        raise FitNotConvergedError(
            f"oscillation fit residual too large (rms {rms:.3g})", resid_final
        )
    unbounded = bool(tau > 10.0 * span)
    return NoscEstimate(
        n_osc=float(f * tau),
        unbounded=unbounded,
        frequency_hz=float(f),
        envelope_time_s=float(tau),
        envelope_power=envelope_power,
        amplitude=float(amp),
        offset=float(c),
        phase=float(phi),
    )
