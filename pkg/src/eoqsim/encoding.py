"""Three-spin DFS qubit semantics: encoded states, logical readout, routing.

The logical qubit lives in the two total-spin-1/2 doublets of the frame's
three spins (a, b, c); encoded |0> is the (a, b) singlet with the gauge
spin c arbitrary. Leakage is population of the total-spin-3/2 quadruplet.
The gauge convention fixes |1> so that exchange on the (b, c) axis
generates rotations about the Bloch axis n = -(sqrt(3), 0, 1)/2.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np

from .lattice import DotId, GridSpec, QubitAssignment
from .pulseseq import Pulse, PulseSeq
from .statevec import PureState, SpectatorSpec, prepare_state

N_AXIS = np.array([-np.sqrt(3.0) / 2.0, 0.0, -0.5])

_PAULI = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


class RouteError(ValueError):
    """No live-axis swap path realizes the requested singlet transfer."""


@dataclass(frozen=True)
class EncodedFrame:
    """A qubit assignment bound to register spin indices (a, b) singlet + gauge c."""

    assignment: QubitAssignment
    spin_a: int
    spin_b: int
    spin_c: int

    @property
    def spins(self) -> tuple[int, int, int]:
        return (self.spin_a, self.spin_b, self.spin_c)


@dataclass(frozen=True)
class LogicalReadout:
    bloch: tuple[float, float, float]
    p_leak: float


def frame_for(grid: GridSpec, assignment: QubitAssignment) -> EncodedFrame:
    """Bind an assignment to the grid, checking liveness of dots and axes."""
    a, b = assignment.singlet_pair
    c = assignment.gauge_dot
    for d in (a, b, c):
        if d in grid.dead_dots:
            raise ValueError(f"frame dot {d} is dead")
    if grid.live_axis_between(a, b) is None:
        raise ValueError(f"singlet pair {a}-{b} is not a live axis")
    d1, d2, d3 = assignment.tqd.dots
    for u, v in ((d1, d2), (d2, d3)):
        if grid.live_axis_between(u, v) is None:
            raise ValueError(f"TQD axis {u}-{v} is not live")
    return EncodedFrame(assignment, grid.dot_index(a), grid.dot_index(b), grid.dot_index(c))


# -- three-spin structure constants -----------------------------------------
# Local 8-dim basis: index = bit(a) + 2*bit(b) + 4*bit(c), 0 = up.


def _embed_singlet_projector(bit_p: int, bit_q: int) -> np.ndarray:
    """|S><S| on local bits (bit_p, bit_q) of the 3-spin space."""
    proj = np.zeros((8, 8), dtype=complex)
    inv_sqrt2 = 1.0 / np.sqrt(2.0)
    free = [k for k in range(3) if k not in (bit_p, bit_q)][0]
    for g in (0, 1):
        vec = np.zeros(8, dtype=complex)
        base = g << free
        vec[base | (1 << bit_q)] = inv_sqrt2
        vec[base | (1 << bit_p)] = -inv_sqrt2
        proj += np.outer(vec, vec.conj())
    return proj


@lru_cache(maxsize=1)
def _logical_structure():
    ps_ab = _embed_singlet_projector(0, 1)
    ps_bc = _embed_singlet_projector(1, 2)
    inv_sqrt2 = 1.0 / np.sqrt(2.0)
    sectors = []
    for g in (0, 1):  # gauge-spin component fixing the doublet S_z sector
        zero = np.zeros(8, dtype=complex)
        zero[(g << 2) | 0b010] = inv_sqrt2
        zero[(g << 2) | 0b001] = -inv_sqrt2
        # Gram-Schmidt against |0>; the minus sign selects the gauge where
        # <0| P_S(bc) |1> = -sqrt(3)/4, i.e. the n axis is -(sqrt3,0,1)/2.
        raw = ps_bc @ zero
        raw -= zero * (zero.conj() @ raw)
        one = -raw / np.linalg.norm(raw)
        sectors.append((zero, one))
    p_logical = sum(np.outer(v, v.conj()) for sec in sectors for v in sec)
    p_quad = np.eye(8) - p_logical
    sigmas = []
    for s in _PAULI:
        op = np.zeros((8, 8), dtype=complex)
        for zero, one in sectors:
            basis = np.column_stack([zero, one])
            op += basis @ s @ basis.conj().T
        sigmas.append(op)
    return ps_ab, ps_bc, sectors, p_logical, p_quad, sigmas


def encoded_zero(
    frame: EncodedFrame,
    grid: GridSpec,
    spectators: SpectatorSpec = "all-up",
) -> PureState:
    """Full-register state with a singlet on the frame's (a, b) pair."""
    n = grid.n_rows * grid.n_cols
    return prepare_state(n, (frame.spin_a, frame.spin_b), spectators)


def reduced_density_3(state: PureState, spins: tuple[int, int, int]) -> np.ndarray:
    """8x8 reduced density matrix of three register spins (a, b, c)."""
    a, b, c = spins
    n = state.n_spins
    t = state.amplitudes.reshape([2] * n)
    t = np.moveaxis(t, (n - 1 - c, n - 1 - b, n - 1 - a), (0, 1, 2))
    m = t.reshape(8, -1)
    return m @ m.conj().T


def logical_bloch(state: PureState, frame: EncodedFrame) -> LogicalReadout:
    """Bloch vector on the logical doublet (traced over gauge) plus leakage."""
    _, _, _, p_logical, p_quad, sigmas = _logical_structure()
    rho = reduced_density_3(state, frame.spins)
    p_leak = float(np.trace(rho @ p_quad).real)
    p_log = float(np.trace(rho @ p_logical).real)
    if p_log <= 1e-15:
        bloch = (0.0, 0.0, 0.0)
    else:
        bloch = tuple(float(np.trace(rho @ s).real) / p_log for s in sigmas)
    return LogicalReadout(bloch, max(p_leak, 0.0))


def logical_projectors() -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(P_logical0, P_logical1, P_quadruplet) on the 8-dim three-spin space."""
    _, _, sectors, _, p_quad, _ = _logical_structure()
    p0 = sum(np.outer(sec[0], sec[0].conj()) for sec in sectors)
    p1 = sum(np.outer(sec[1], sec[1].conj()) for sec in sectors)
    return p0, p1, p_quad


def effective_qubit_hamiltonian(
    frame: EncodedFrame, j_i_hz: float, j_j_hz: float
) -> np.ndarray:
    """Traceless logical Hamiltonian (Hz) for exchange on the two frame axes.

    Equals (j_i/2)*sigma_z + (j_j/2)*sigma_n with sigma_n = -(sqrt3*sx+sz)/2;
    the halving reflects the pulse-angle-equals-rotation-angle convention.
    """
    if not (np.isfinite(j_i_hz) and np.isfinite(j_j_hz)):
        raise ValueError("J values must be finite")
    ps_ab, ps_bc, sectors, _, _, _ = _logical_structure()
    h8 = j_i_hz * ps_ab + j_j_hz * ps_bc
    zero, one = sectors[0]
    basis = np.column_stack([zero, one])
    h2 = basis.conj().T @ h8 @ basis
    return h2 - np.trace(h2) / 2.0 * np.eye(2)


def route_singlet(
    grid: GridSpec,
    from_pair: tuple[DotId, DotId],
    to_frame: EncodedFrame,
) -> PulseSeq:
    """Minimal sequence of pi swaps moving a singlet to the frame's (a, b) pair."""
    return route_singlet_to_pair(grid, from_pair, to_frame.assignment.singlet_pair)


def route_singlet_to_pair(
    grid: GridSpec,
    from_pair: tuple[DotId, DotId],
    to_pair: tuple[DotId, DotId],
) -> PulseSeq:
    """Minimal pi-swap route between two singlet locations (any dot pairs).

    BFS over singlet locations, expanding intra-row (X) swaps before
    inter-row (Y) swaps and lower axis labels first, which fixes the
    tie-break deterministically. The target pair need not share an axis;
    a singlet can rest on any two live dots.
    """
    if grid.live_axis_between(*from_pair) is None:
        raise RouteError(f"from_pair {from_pair} is not a live axis")
    for d in to_pair:
        if d in grid.dead_dots or not grid.in_bounds(d):
            raise RouteError(f"target dot {d} is dead or out of bounds")
    target = frozenset(to_pair)
    start = frozenset(from_pair)

    def axis_order(ax):
        return (0 if ax.kind == "X" else 1, int(ax.label[1:]))

    axes = sorted(grid.live_axes(), key=axis_order)
    frontier = [start]
    parents: dict = {start: None}
    while frontier and target not in parents:
        nxt = []
        for pair in frontier:
            for ax in axes:
                shared = ax.dots() & pair
                if len(shared) != 1:
                    continue
                (u,) = shared
                (v,) = ax.dots() - {u}
                moved = (pair - {u}) | {v}
                if moved not in parents:
                    parents[moved] = (pair, ax.label)
                    nxt.append(moved)
        frontier = nxt
    if target not in parents:
        raise RouteError(f"no live swap path from {set(from_pair)} to {set(target)}")
    labels = []
    node = target
    while parents[node] is not None:
        node, label = parents[node]
        labels.append(label)
    labels.reverse()
    return PulseSeq.of(Pulse(lbl, np.pi) for lbl in labels)
