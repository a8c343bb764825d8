"""Randomized benchmarking with leakage on an encoded qubit assignment.

Each sequence draws random Cliffords, appends the recovery element, and is
compiled to exchange pulses on the frame's two axes, sandwiched between the
spin-swap route from the SPAM pair and its reverse. One quasi-static noise
sample is drawn per shot. Survival decays as A*alpha^L + B with per-Clifford
error epsilon = (1 - alpha)/2; leakage grows as C*(1 - beta^L) with
per-Clifford initial-slope rate Gamma = C*(1 - beta).
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import curve_fit

from .cliffords import clifford_group, decompose_clifford
from .encoding import EncodedFrame, logical_projectors, reduced_density_3, route_singlet
from .lattice import DotId, GridSpec
from .pulses import FitNotConvergedError
from .statevec import (
    FieldSpec,
    NoiseSample,
    PureState,
    pair_propagator_4,
    prepare_state,
)
from . import kernels


@dataclass(frozen=True)
class RBNoise:
    sigma_j_rel: float = 0.0  # quasi-static relative exchange noise, per axis
    sigma_bz_hz: float = 0.0  # quasi-static per-dot Larmor spread (hyperfine)
    b_uniform_hz: float = 0.0  # uniform applied field


@dataclass(frozen=True)
class RBConfig:
    grid: GridSpec
    frame: EncodedFrame
    spam_pair: tuple[DotId, DotId]
    lengths: tuple[int, ...]
    n_sequences: int = 20
    shots: int = 40
    mode: str = "probability"  # or "sample"
    t_pulse_s: float = 5e-9
    t_idle_s: float = 10e-9
    noise: RBNoise = field(default_factory=RBNoise)
    readout_error: float = 0.0
    injected_depolarizing: Optional[float] = None
    seed: int = 0
    threads: int = 1

    def __post_init__(self):
        if list(self.lengths) != sorted(set(self.lengths)) or min(self.lengths, default=0) < 1:
            raise ValueError("lengths must be strictly increasing and >= 1")
        if self.mode not in ("probability", "sample"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if not 0 <= self.readout_error <= 1:
            raise ValueError("readout_error must be in [0, 1]")
        p = self.injected_depolarizing
        if p is not None and not 0 <= p <= 1:
            raise ValueError("injected_depolarizing must be in [0, 1]")


@dataclass
class RBRawData:
    lengths: np.ndarray  # (n_lengths,)
    survival: np.ndarray  # (n_lengths, n_sequences)
    leakage: Optional[np.ndarray]  # same shape, probability mode only
    config: RBConfig


@dataclass
class RBResult:
    epsilon: float
    epsilon_se: float
    gamma: float
    gamma_se: float
    survival_params: dict  # A, alpha, B
    leakage_params: Optional[dict]  # C, beta
    reduced_chi2: Optional[float]
    degenerate: bool = False


class _PulseEngine:
    """Executes compiled pulse lists for one shot with cached propagators."""

    def __init__(self, grid: GridSpec, cfg: RBConfig, noise: NoiseSample):
        self.n = grid.n_rows * grid.n_cols
        self.fields = FieldSpec(cfg.noise.b_uniform_hz, noise)
        self.larmor = self.fields.larmor_hz(self.n)
        self.t_pulse = cfg.t_pulse_s
        self.t_idle = cfg.t_idle_s
        self._u4 = {}
        self._pulse_phases = {}
        self._idle_phases = self._phases(None, self.t_idle)

    def _phases(self, skip_pair, duration):
        ph = np.ones((self.n, 2), dtype=np.complex128)
        for k in range(self.n):
            if skip_pair is not None and k in skip_pair:
                continue
            phi = np.pi * self.larmor[k] * duration
            ph[k, 0] = np.exp(-1j * phi)
            ph[k, 1] = np.exp(+1j * phi)
        return ph

    def apply_pulse(self, psi: np.ndarray, pair, theta: float, axis_label: str):
        key = (axis_label, round(theta, 15))
        cached = self._u4.get(key)
        if cached is None:
            j_hz = theta / (2 * np.pi * self.t_pulse) * self.fields.j_factor(axis_label)
            cached = pair_propagator_4(
                j_hz, self.larmor[pair[0]], self.larmor[pair[1]], self.t_pulse
            )
            self._u4[key] = cached
        ph = self._pulse_phases.get(axis_label)
        if ph is None:
            ph = self._phases(pair, self.t_pulse)
            self._pulse_phases[axis_label] = ph
        kernels.apply_spin_phases(psi, self.n, ph)
        kernels.apply_two_spin_gate(psi, self.n, pair[0], pair[1], cached)
        kernels.apply_spin_phases(psi, self.n, self._idle_phases)


def _compiled(grid: GridSpec, frame: EncodedFrame):
    """Per-Clifford pulse lists as (pair, theta, axis_label) plus route lists."""
    a, b = frame.assignment.singlet_pair
    c = frame.assignment.gauge_dot
    ax = {"z": grid.live_axis_between(a, b), "n": grid.live_axis_between(b, c)}
    if ax["z"] is None or ax["n"] is None:
        raise ValueError("frame axes are dead")
    pairs = {
        role: (grid.dot_index(axis.a), grid.dot_index(axis.b)) for role, axis in ax.items()
    }
    labels = {role: axis.label for role, axis in ax.items()}
    group = clifford_group()
    table = [
        [(pairs[p.axis_role], p.angle, labels[p.axis_role]) for p in decompose_clifford(e)]
        for e in group
    ]
    return group, table


def _route_pulses(grid: GridSpec, cfg: RBConfig):
    seq = route_singlet(grid, cfg.spam_pair, cfg.frame)
    fwd = []
    for p in seq:
        axis = grid.axis_by_label(p.axis_label)
        fwd.append(((grid.dot_index(axis.a), grid.dot_index(axis.b)), np.pi, p.axis_label))
    rev = list(reversed(fwd))
    return fwd, rev


def _draw_noise(grid: GridSpec, cfg: RBConfig, rng: np.random.Generator) -> NoiseSample:
    n = grid.n_rows * grid.n_cols
    nz = cfg.noise
    delta = rng.normal(0.0, nz.sigma_bz_hz, size=n) if nz.sigma_bz_hz > 0 else np.zeros(n)
    j_scale = {}
    if nz.sigma_j_rel > 0:
        for axis in grid.all_axes():
            j_scale[axis.label] = float(np.exp(rng.normal(0.0, nz.sigma_j_rel)))
    return NoiseSample(delta, j_scale)


def run_rb(config: RBConfig) -> RBRawData:
    """Execute the full RB protocol; deterministic for a given seed.

    RNG substreams are keyed by (seed, length index, sequence index, shot
    index), so results are bit-identical for any thread count.
    """
    grid = config.grid
    group, table = _compiled(grid, config.frame)
    route_fwd, route_rev = _route_pulses(grid, config)
    pauli_ids = [group.by_name(n).index for n in ("I", "X", "Y", "Z")]
    spam = (grid.dot_index(config.spam_pair[0]), grid.dot_index(config.spam_pair[1]))
    frame_spins = config.frame.spins
    n_spins = grid.n_rows * grid.n_cols
    init = prepare_state(n_spins, spam)
    _, _, p_quad = logical_projectors()
    prob_mode = config.mode == "probability"
    p_inject = config.injected_depolarizing

    def run_sequence(li: int, si: int):
        length = config.lengths[li]
        rng_seq = np.random.default_rng(
            np.random.SeedSequence(entropy=config.seed, spawn_key=(1, li, si))
        )
        cliffs = [group[int(i)] for i in rng_seq.integers(0, len(group), size=length)]
        total = group.identity
        for c in cliffs:
            total = group.compose(total, c)
        recovery = group.inverse(total)
        program = cliffs + [recovery]

        surv_acc = 0.0
        leak_acc = 0.0
        for shot in range(config.shots):
            rng = np.random.default_rng(
                np.random.SeedSequence(entropy=config.seed, spawn_key=(2, li, si, shot))
            )
            engine = _PulseEngine(grid, config, _draw_noise(grid, config, rng))
            st = init.copy()
            psi = st.amplitudes
            for pair, theta, label in route_fwd:
                engine.apply_pulse(psi, pair, theta, label)
            for c in program:
                for pair, theta, label in table[c.index]:
                    engine.apply_pulse(psi, pair, theta, label)
                if p_inject is not None and rng.random() < p_inject:
                    pid = pauli_ids[int(rng.integers(0, 4))]
                    for pair, theta, label in table[pid]:
                        engine.apply_pulse(psi, pair, theta, label)
            if prob_mode:
                rho3 = reduced_density_3(st, frame_spins)
                leak_acc += float(np.trace(rho3 @ p_quad).real)
            for pair, theta, label in route_rev:
                engine.apply_pulse(psi, pair, theta, label)
            scratch = np.empty(2 ** (n_spins - 2), dtype=np.complex128)
            p_s = kernels.singlet_components(psi, n_spins, spam[0], spam[1], scratch)
            r = config.readout_error
            if prob_mode:
                surv_acc += (1 - r) * p_s + r * (1 - p_s)
            else:
                hit = rng.random() < p_s
                if rng.random() < r:
                    hit = not hit
                surv_acc += float(hit)
        return surv_acc / config.shots, leak_acc / config.shots

    tasks = [(li, si) for li in range(len(config.lengths)) for si in range(config.n_sequences)]
    survival = np.zeros((len(config.lengths), config.n_sequences))
    leakage = np.zeros_like(survival) if prob_mode else None
    if config.threads > 1:
        with ThreadPoolExecutor(max_workers=config.threads) as pool:
            results = list(pool.map(lambda t: run_sequence(*t), tasks))
    else:
        results = [run_sequence(*t) for t in tasks]
    for (li, si), (s, l) in zip(tasks, results):
        survival[li, si] = s
        if leakage is not None:
            leakage[li, si] = l
    return RBRawData(np.array(config.lengths), survival, leakage, config)


def fit_rb(data: RBRawData) -> RBResult:
    """Weighted least-squares decay fits yielding (epsilon, Gamma)."""
    lengths = np.asarray(data.lengths, float)
    if len(lengths) < 3:
        raise ValueError("need at least 3 distinct lengths")
    y = data.survival.mean(axis=1)
    n_seq = data.survival.shape[1]
    se = data.survival.std(axis=1, ddof=1) / np.sqrt(n_seq) if n_seq > 1 else np.zeros_like(y)
    sigma = np.maximum(se, 1e-6)

    if float(np.ptp(data.survival)) < 1e-12:
        # Flat survival carries no decay information; report alpha = 1 exactly.
        return RBResult(
            epsilon=0.0,
            epsilon_se=0.0,
            gamma=0.0,
            gamma_se=0.0,
            survival_params={"A": float(y[0]), "alpha": 1.0, "B": 0.0},
            leakage_params=None if data.leakage is None else {"C": 0.0, "beta": 1.0},
            reduced_chi2=None,
            degenerate=True,
        )

    def surv_model(L, a, alpha, b):
        return a * alpha**L + b

    alpha0 = _alpha_seed(lengths, y)
    b0 = min(max(float(y[-1]) if alpha0 < 0.9 else 0.5, 0.0), 1.0)
    a0 = float(np.clip(y[0] - b0, 1e-3, 1.0))
    try:
        popt, pcov = curve_fit(
            surv_model,
            lengths,
            y,
            p0=[a0, alpha0, b0],
            sigma=sigma,
            absolute_sigma=True,
            bounds=([0.0, 0.0, -0.5], [1.5, 1.0, 1.5]),
            maxfev=20000,
        )
    except RuntimeError as exc:
        raise FitNotConvergedError(f"survival fit failed: {exc}") from exc
    a, alpha, b = popt
    alpha_se = float(np.sqrt(max(pcov[1, 1], 0.0)))
    epsilon = (1.0 - alpha) / 2.0
    epsilon_se = alpha_se / 2.0
    resid = (surv_model(lengths, *popt) - y) / sigma
    dof = max(len(lengths) - 3, 1)
    chi2 = float(resid @ resid / dof)

    gamma = 0.0
    gamma_se = 0.0
    leak_params = None
    if data.leakage is not None and float(np.ptp(data.leakage)) > 1e-14:
        yl = data.leakage.mean(axis=1)
        sel = data.leakage.std(axis=1, ddof=1) / np.sqrt(n_seq) if n_seq > 1 else np.zeros_like(yl)
        sigl = np.maximum(sel, 1e-9)

        def leak_model(L, c, beta):
            return c * (1.0 - beta**L)

        beta0 = float(np.clip(1.0 - max(yl[0], 1e-6) / max(lengths[0], 1.0), 0.5, 1.0 - 1e-9))
        c0 = float(np.clip(max(yl.max(), 1e-6) * 1.5, 1e-6, 1.0))
        try:
            poptl, pcovl = curve_fit(
                leak_model,
                lengths,
                yl,
                p0=[c0, beta0],
                sigma=sigl,
                absolute_sigma=True,
                bounds=([0.0, 0.0], [1.0, 1.0]),
                maxfev=20000,
            )
        except RuntimeError as exc:
            raise FitNotConvergedError(f"leakage fit failed: {exc}") from exc
        c, beta = poptl
        gamma = float(c * (1.0 - beta))
        # delta method: Var(c(1-beta)) from the fit covariance
        jac = np.array([1.0 - beta, -c])
        gamma_se = float(np.sqrt(max(jac @ pcovl @ jac, 0.0)))
        leak_params = {"C": float(c), "beta": float(beta)}

    return RBResult(
        epsilon=float(epsilon),
        epsilon_se=float(epsilon_se),
        gamma=gamma,
        gamma_se=gamma_se,
        survival_params={"A": float(a), "alpha": float(alpha), "B": float(b)},
        leakage_params=leak_params,
        reduced_chi2=chi2,
    )


def _alpha_seed(lengths: np.ndarray, y: np.ndarray) -> float:
    b_guess = 0.5
    num = y - b_guess
    good = num > 1e-3
    if good.sum() >= 2:
        slope = np.polyfit(lengths[good], np.log(num[good]), 1)[0]
        return float(np.clip(np.exp(slope), 1e-6, 1.0 - 1e-9))
    return 0.99


def pool_results(results: list[RBResult]) -> tuple[float, float]:
    """Inverse-variance pooled (epsilon, standard error) across repetitions."""
    w = np.array([1.0 / max(r.epsilon_se, 1e-12) ** 2 for r in results])
    eps = np.array([r.epsilon for r in results])
    return float(np.sum(w * eps) / np.sum(w)), float(1.0 / np.sqrt(np.sum(w)))


@dataclass
class OracleReport:
    injected_p: float
    expected_epsilon: float
    fitted_epsilon: float
    fitted_se: float
    n_sigma: float
    passed: bool
    result: RBResult


def validate_rb_oracle(
    grid: GridSpec,
    frame: EncodedFrame,
    spam_pair: tuple[DotId, DotId],
    p: float,
    *,
    lengths: tuple[int, ...] = (2, 4, 8, 16, 32, 64, 128, 256),
    n_sequences: int = 20,
    shots: int = 40,
    seed: int = 0,
    threads: int = 1,
) -> OracleReport:
    """End-to-end self-test: injected depolarizing p must fit to epsilon = p/2.

    Physical noise is off; the fitted epsilon must land within 3 standard
    errors of p/2.
    """
    if not 0 <= p <= 0.05:
        raise ValueError("p must be in [0, 0.05]")
    cfg = RBConfig(
        grid=grid,
        frame=frame,
        spam_pair=spam_pair,
        lengths=lengths,
        n_sequences=n_sequences,
        shots=shots,
        mode="probability",
        injected_depolarizing=p,
        seed=seed,
        threads=threads,
    )
    result = fit_rb(run_rb(cfg))
    expected = p / 2.0
    se = max(result.epsilon_se, 1e-12)
    n_sigma = abs(result.epsilon - expected) / se
    passed = n_sigma <= 3.0 or (p == 0 and result.epsilon < 1e-9)
    return OracleReport(p, expected, result.epsilon, result.epsilon_se, n_sigma, passed, result)
