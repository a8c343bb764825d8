"""Exact state-vector dynamics for small spin-1/2 registers.

Basis convention: bit k of the amplitude index is spin k, with 0 = up and
1 = down; spin k is the dot with row-major index k. Exchange pulses follow
the partial-swap convention U(theta) = P_triplet + exp(i*theta) * P_singlet,
so U(pi) is exactly SWAP and theta accrues as 2*pi*J*t.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence, Union

import numpy as np

from . import kernels

MAX_SPINS = 12

# Local two-spin basis index is bit(q0) + 2*bit(q1); the singlet is
# (|up,down> - |down,up>)/sqrt(2) with q0 listed first.
_SINGLET_VEC = np.array([0.0, -1.0, 1.0, 0.0], dtype=np.complex128) / np.sqrt(2.0)
SINGLET_PROJECTOR_4 = np.outer(_SINGLET_VEC, _SINGLET_VEC.conj())
_SZ_Q0 = np.array([0.5, -0.5, 0.5, -0.5])
_SZ_Q1 = np.array([0.5, 0.5, -0.5, -0.5])

SpectatorSpec = Union[str, Mapping[int, int], Sequence[int], tuple]


@dataclass
class PureState:
    n_spins: int
    amplitudes: np.ndarray

    def __post_init__(self):
        if not 1 <= self.n_spins <= MAX_SPINS:
            raise ValueError(f"n_spins must be in 1..{MAX_SPINS}")
        self.amplitudes = np.ascontiguousarray(self.amplitudes, dtype=np.complex128)
        if self.amplitudes.shape != (2**self.n_spins,):
            raise ValueError("amplitude vector length must be 2**n_spins")

    def copy(self) -> "PureState":
        return PureState(self.n_spins, self.amplitudes.copy())

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def fidelity(self, other: "PureState") -> float:
        return float(abs(np.vdot(self.amplitudes, other.amplitudes)) ** 2)

    def total_sz(self) -> float:
        """Basis-weighted magnetization <S_z^total>."""
        idx = np.arange(self.amplitudes.size)
        weights = np.zeros(self.amplitudes.size)
        for k in range(self.n_spins):
            weights += 0.5 - ((idx >> k) & 1)
        return float(np.sum(weights * np.abs(self.amplitudes) ** 2))


@dataclass
class NoiseSample:
    """One quasi-static noise draw, constant for the duration of a shot."""

    delta_bz_hz: np.ndarray  # per-spin Larmor deviation from the uniform field
    j_scale: dict = field(default_factory=dict)  # axis label -> multiplicative factor

    def __post_init__(self):
        self.delta_bz_hz = np.asarray(self.delta_bz_hz, dtype=float)
        for label, s in self.j_scale.items():
            if s <= 0:
                raise ValueError(f"j_scale[{label!r}] must be > 0")

    @classmethod
    def quiet(cls, n_spins: int) -> "NoiseSample":
        return cls(np.zeros(n_spins))


@dataclass
class FieldSpec:
    b_uniform_hz: float = 0.0
    noise: Optional[NoiseSample] = None

    def __post_init__(self):
        if self.b_uniform_hz < 0:
            raise ValueError("b_uniform_hz must be >= 0")

    def larmor_hz(self, n_spins: int) -> np.ndarray:
        f = np.full(n_spins, self.b_uniform_hz)
        if self.noise is not None:
            if self.noise.delta_bz_hz.size != n_spins:
                raise ValueError("noise delta_bz_hz length does not match register")
            f = f + self.noise.delta_bz_hz
        return f

    def j_factor(self, axis_label: Optional[str]) -> float:
        if self.noise is None or axis_label is None:
            return 1.0
        return self.noise.j_scale.get(axis_label, 1.0)


def _spectator_bits(n_spins: int, pair, spec: SpectatorSpec) -> np.ndarray:
    bits = np.zeros(n_spins, dtype=np.int64)
    excluded = set(pair) if pair else set()
    if isinstance(spec, str):
        if spec != "all-up":
            raise ValueError(f"unknown spectator spec {spec!r}")
    elif isinstance(spec, tuple) and len(spec) == 2 and spec[0] == "random":
        rng = np.random.default_rng(spec[1])
        draw = rng.integers(0, 2, size=n_spins)
        for k in range(n_spins):
            if k not in excluded:
                bits[k] = draw[k]
    elif isinstance(spec, Mapping):
        for k, v in spec.items():
            if k in excluded:
                continue
            bits[k] = _bit_of(v)
    else:
        vals = list(spec)
        if len(vals) != n_spins:
            raise ValueError("product-list spectator spec must cover every spin")
        for k, v in enumerate(vals):
            if k not in excluded:
                bits[k] = _bit_of(v)
    return bits


def _bit_of(v) -> int:
    if v in (0, "up"):
        return 0
    if v in (1, "down"):
        return 1
    raise ValueError(f"spectator spin state must be up/down, got {v!r}")


def prepare_state(
    n_spins: int,
    singlet_pair: Optional[tuple[int, int]] = None,
    spectators: SpectatorSpec = "all-up",
) -> PureState:
    """Product state with an optional two-spin singlet on singlet_pair."""
    if singlet_pair is not None:
        p, q = singlet_pair
        if p == q or not (0 <= p < n_spins and 0 <= q < n_spins):
            raise ValueError(f"invalid singlet pair {singlet_pair}")
    bits = _spectator_bits(n_spins, singlet_pair, spectators)
    psi = np.zeros(2**n_spins, dtype=np.complex128)
    base = int(sum(int(b) << k for k, b in enumerate(bits)))
    if singlet_pair is None:
        psi[base] = 1.0
    else:
        p, q = singlet_pair
        psi[base | (1 << q)] = 1.0 / np.sqrt(2.0)  # |up_p, down_q>
        psi[base | (1 << p)] = -1.0 / np.sqrt(2.0)  # |down_p, up_q>
    return PureState(n_spins, psi)


def exchange_unitary_4(theta: float) -> np.ndarray:
    """4x4 partial swap: identity on the triplet, phase exp(i*theta) on the singlet."""
    return np.eye(4, dtype=np.complex128) - (1.0 - np.exp(1j * theta)) * SINGLET_PROJECTOR_4


def apply_exchange(
    state: PureState, pair: tuple[int, int], theta: float, *, in_place: bool = False
) -> PureState:
    """Exchange pulse of angle theta on a spin pair."""
    p, q = pair
    if p == q:
        raise ValueError("exchange pair must be distinct")
    if not np.isfinite(theta):
        raise ValueError("theta must be finite")
    out = state if in_place else state.copy()
    kernels.apply_two_spin_gate(out.amplitudes, out.n_spins, p, q, exchange_unitary_4(theta))
    return out


def pair_propagator_4(
    j_eff_hz: float, f_p_hz: float, f_q_hz: float, duration_s: float
) -> np.ndarray:
    """Exact 4x4 propagator for exchange plus the two local Zeeman terms.

    H (Hz) = -J_eff * P_singlet + f_p * S_z(p) + f_q * S_z(q); the sign makes
    the accrued singlet phase equal +2*pi*J_eff*t, matching apply_exchange.
    """
    h = -j_eff_hz * SINGLET_PROJECTOR_4 + np.diag(f_p_hz * _SZ_Q0 + f_q_hz * _SZ_Q1)
    evals, evecs = np.linalg.eigh(h)
    phases = np.exp(-2j * np.pi * evals * duration_s)
    return (evecs * phases) @ evecs.conj().T


def evolve_segment(
    state: PureState,
    active: Optional[tuple] = None,
    duration_s: float = 0.0,
    fields: Optional[FieldSpec] = None,
    *,
    in_place: bool = False,
) -> PureState:
    """Evolve under at most one active exchange axis plus Zeeman fields.

    active is (pair, j_hz) or (pair, j_hz, axis_label); the axis label keys
    the quasi-static j_scale lookup. Inactive spins accrue closed-form
    Zeeman phases; the active pair gets an exact 4x4 propagator.
    """
    if duration_s < 0:
        raise ValueError("duration must be >= 0")
    out = state if in_place else state.copy()
    if duration_s == 0:
        return out
    n = out.n_spins
    if fields is None:
        fields = FieldSpec()
    f = fields.larmor_hz(n)

    active_pair = None
    if active is not None:
        pair, j_hz = active[0], active[1]
        axis_label = active[2] if len(active) > 2 else None
        p, q = pair
        if p == q:
            raise ValueError("active pair must be distinct")
        active_pair = (p, q)
        j_eff = j_hz * fields.j_factor(axis_label)
        u4 = pair_propagator_4(j_eff, f[p], f[q], duration_s)

    phases = np.ones((n, 2), dtype=np.complex128)
    for k in range(n):
        if active_pair is not None and k in active_pair:
            continue
        phi = np.pi * f[k] * duration_s
        phases[k, 0] = np.exp(-1j * phi)  # up, S_z = +1/2
        phases[k, 1] = np.exp(+1j * phi)
    kernels.apply_spin_phases(out.amplitudes, n, phases)
    if active_pair is not None:
        kernels.apply_two_spin_gate(out.amplitudes, n, active_pair[0], active_pair[1], u4)
    return out


def measure_singlet(
    state: PureState,
    pair: tuple[int, int],
    mode: str = "probability",
    rng: Optional[np.random.Generator] = None,
):
    """Singlet probability on a pair, or a sampled projective outcome.

    mode "probability" returns P_singlet; mode "sample" returns
    (outcome, post_state) with outcome True for singlet (encoded |0>).
    """
    p, q = pair
    if p == q:
        raise ValueError("measurement pair must be distinct")
    scratch = np.empty(2 ** (state.n_spins - 2), dtype=np.complex128)
    prob = kernels.singlet_components(state.amplitudes, state.n_spins, p, q, scratch)
    if mode == "probability":
        return prob
    if mode != "sample":
        raise ValueError(f"unknown mode {mode!r}")
    if rng is None:
        raise ValueError("sample mode requires an rng")
    outcome = bool(rng.random() < prob)
    projected = _project_singlet(state, pair, scratch)
    if outcome:
        post = projected
    else:
        post = PureState(state.n_spins, state.amplitudes - projected.amplitudes)
    nrm = post.norm()
    if nrm == 0:
        raise RuntimeError("projective measurement produced a null state")
    post.amplitudes /= nrm
    return outcome, post


def _project_singlet(state: PureState, pair, singlet_amps: np.ndarray) -> PureState:
    p, q = pair
    psi = np.zeros_like(state.amplitudes)
    spect = [k for k in range(state.n_spins) if k not in (p, q)]
    inv_sqrt2 = 1.0 / np.sqrt(2.0)
    for j, a in enumerate(singlet_amps):
        base = 0
        for l, k in enumerate(spect):
            if (j >> l) & 1:
                base |= 1 << k
        psi[base | (1 << q)] += a * inv_sqrt2
        psi[base | (1 << p)] -= a * inv_sqrt2
    return PureState(state.n_spins, psi)
