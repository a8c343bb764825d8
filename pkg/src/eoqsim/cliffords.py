"""Single-qubit Clifford group and decomposition into z/n exchange pulses.

A pulse of angle theta on the frame's (a, b) axis acts on the logical qubit
as exp(i*theta*(1 + sigma_z)/2), i.e. up to phase a Bloch rotation about z
by -theta; the (b, c) axis does the same about n = -(sqrt(3), 0, 1)/2. The
24 Cliffords are the rotation group of the octahedron (signed permutation
matrices with det +1), composed exactly over the integers.

Decompositions use at most 4 strictly alternating pulses, found in closed
form: a 3-pulse sandwich u,v,u exists iff u.R.u >= -1/2, and the remaining
case (only Y among the 24) peels one pulse off at the feasibility boundary.
All branch candidates are collected and the winner is the shortest, then
lexicographically smallest (angle tuple, axis pattern).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .encoding import EncodedFrame, N_AXIS
from .lattice import GridSpec
from .pulseseq import Pulse, PulseSeq

Z_AXIS = np.array([0.0, 0.0, 1.0])

_TWO_PI = 2 * np.pi
_TOL = 1e-11


@dataclass(frozen=True)
class AxisAnglePulse:
    axis_role: str  # "z" or "n"
    angle: float  # radians in [0, 2*pi)


@dataclass(frozen=True)
class CliffordElement:
    index: int
    matrix: tuple  # 3x3 integer Bloch rotation, rows as tuples
    name: str

    def as_array(self) -> np.ndarray:
        return np.array(self.matrix, dtype=float)


def pulse_rotation(axis: np.ndarray, theta: float) -> np.ndarray:
    """Bloch action of a pulse: rotation about `axis` by -theta (Rodrigues)."""
    u = np.asarray(axis, dtype=float)
    u = u / np.linalg.norm(u)
    k = np.array([[0, -u[2], u[1]], [u[2], 0, -u[0]], [-u[1], u[0], 0]])
    phi = -theta
    return np.eye(3) + np.sin(phi) * k + (1 - np.cos(phi)) * (k @ k)


def _mz(theta: float) -> np.ndarray:
    return pulse_rotation(Z_AXIS, theta)


def _mn(theta: float) -> np.ndarray:
    return pulse_rotation(N_AXIS, theta)


_GEN = {"z": _mz, "n": _mn}
_AXIS_VEC = {"z": Z_AXIS, "n": N_AXIS}


# -- group construction ------------------------------------------------------


def _axis_angle_of(mat: np.ndarray) -> tuple[np.ndarray, float]:
    """Rotation axis (canonical sign) and angle in [0, pi] of a matrix."""
    cos_phi = np.clip((np.trace(mat) - 1.0) / 2.0, -1.0, 1.0)
    phi = float(np.arccos(cos_phi))
    if phi < 1e-9:
        return np.array([0.0, 0.0, 1.0]), 0.0
    if abs(phi - np.pi) < 1e-9:
        # axis from the symmetric part: (R + I)/2 = u u^T
        m = (mat + np.eye(3)) / 2.0
        u = m[:, int(np.argmax(np.diag(m)))]
        u = u / np.linalg.norm(u)
    else:
        u = np.array(
            [mat[2, 1] - mat[1, 2], mat[0, 2] - mat[2, 0], mat[1, 0] - mat[0, 1]]
        )
        u = u / np.linalg.norm(u)
    for comp in u:
        if abs(comp) > 1e-9:
            if comp < 0:
                u = -u
            break
    return u, phi


_AXIS_NAMES = {
    (1, 0, 0): "x",
    (0, 1, 0): "y",
    (0, 0, 1): "z",
    (1, 1, 0): "xy",
    (1, -1, 0): "x-y",
    (1, 0, 1): "xz",
    (1, 0, -1): "x-z",
    (0, 1, 1): "yz",
    (0, 1, -1): "y-z",
    (1, 1, 1): "xyz",
    (1, 1, -1): "xy-z",
    (1, -1, 1): "x-yz",
    (1, -1, -1): "x-y-z",
}
_SPECIAL_NAMES = {
    ("x", 180): "X",
    ("y", 180): "Y",
    ("z", 180): "Z",
    ("z", 90): "S",
    ("z", 270): "SDG",
    ("xz", 180): "H",
}


def _name_of(mat: np.ndarray) -> str:
    u, phi = _axis_angle_of(mat)
    if phi == 0.0:
        return "I"
    key = tuple(int(round(c * np.sqrt(3))) if abs(abs(c) - 1 / np.sqrt(3)) < 1e-6 else
                int(round(c * np.sqrt(2))) if abs(abs(c) - 1 / np.sqrt(2)) < 1e-6 else
                int(round(c))
                for c in u)
    axis_name = _AXIS_NAMES[key]
    # Angles are reported in the pulse sense (pulse theta rotates by -theta
    # about +u), so that e.g. S is the element realized by pulse (z, pi/2).
    deg = int(round(np.degrees(phi)))
    if deg not in (0, 180):
        s = np.array(
            [mat[2, 1] - mat[1, 2], mat[0, 2] - mat[2, 0], mat[1, 0] - mat[0, 1]]
        )
        if float(s @ u) > 0:
            deg = 360 - deg
    return _SPECIAL_NAMES.get((axis_name, deg), f"R_{axis_name}_{deg}")


class CliffordGroup:
    """The 24 single-qubit Cliffords as exact integer Bloch rotations."""

    def __init__(self):
        rx90 = np.array([[1, 0, 0], [0, 0, -1], [0, 1, 0]])
        rz90 = np.array([[0, -1, 0], [1, 0, 0], [0, 0, 1]])
        mats = {tuple(map(tuple, np.eye(3, dtype=int)))}
        frontier = list(mats)
        while frontier:
            nxt = []
            for m in frontier:
                for g in (rx90, rz90):
                    prod = tuple(map(tuple, g @ np.array(m)))
                    if prod not in mats:
                        mats.add(prod)
                        nxt.append(prod)
            frontier = nxt
        assert len(mats) == 24

        def sort_key(m):
            u, phi = _axis_angle_of(np.array(m, dtype=float))
            return (round(np.degrees(phi)), tuple(np.round(-u, 9)), m)

        ordered = sorted(mats, key=sort_key)
        self.elements = [
            CliffordElement(i, m, _name_of(np.array(m, dtype=float)))
            for i, m in enumerate(ordered)
        ]
        self._index = {e.matrix: e.index for e in self.elements}

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __getitem__(self, i: int) -> CliffordElement:
        return self.elements[i]

    @property
    def identity(self) -> CliffordElement:
        return self.elements[0]

    def index_of(self, mat) -> int:
        key = tuple(tuple(int(round(x)) for x in row) for row in np.asarray(mat))
        return self._index[key]

    def compose(self, first: CliffordElement, then: CliffordElement) -> CliffordElement:
        """Element equal to applying `first`, then `then` (matrix then@first)."""
        prod = np.array(then.matrix) @ np.array(first.matrix)
        return self.elements[self.index_of(prod)]

    def inverse(self, e: CliffordElement) -> CliffordElement:
        return self.elements[self.index_of(np.array(e.matrix).T)]

    def by_name(self, name: str) -> CliffordElement:
        for e in self.elements:
            if e.name == name:
                return e
        raise KeyError(name)


@lru_cache(maxsize=1)
def clifford_group() -> CliffordGroup:
    return CliffordGroup()


# -- decomposition -----------------------------------------------------------


def _norm_angle(theta: float) -> float:
    t = theta % _TWO_PI
    if t > _TWO_PI - 1e-9:
        t = 0.0
    return t


def _rotation_angle_about(axis_role: str, mat: np.ndarray):
    """Pulse angle theta with generator(theta) == mat, or None."""
    u = _AXIS_VEC[axis_role]
    if np.linalg.norm(mat @ u - u) > _TOL:
        return None
    e1 = np.cross(u, Z_AXIS)
    if np.linalg.norm(e1) < 1e-9:
        e1 = np.cross(u, np.array([0.0, 1.0, 0.0]))
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(u, e1)
    c = float(e1 @ mat @ e1)
    s = float(e2 @ mat @ e1)
    # mat rotates by -theta about u, so e1 -> cos(theta) e1 - sin(theta) e2
    theta = _norm_angle(float(np.arctan2(-s, c)))
    if np.max(np.abs(_GEN[axis_role](theta) - mat)) > 1e-9:
        return None
    return theta


def _solve_cone_angles(axis_role: str, v: np.ndarray, w: np.ndarray) -> list[float]:
    """All theta with generator(theta) @ v == w (0, 1, or many solutions)."""
    u = _AXIS_VEC[axis_role]
    if abs(float(u @ v) - float(u @ w)) > 1e-9:
        return []
    v_perp = v - (u @ v) * u
    w_perp = w - (u @ w) * u
    r = np.linalg.norm(v_perp)
    if r < 1e-12:
        return [0.0] if np.linalg.norm(v - w) < 1e-9 else []
    if abs(np.linalg.norm(w_perp) - r) > 1e-9:
        return []
    e1 = v_perp / r
    e2 = np.cross(u, e1)
    # generator(theta) rotates by -theta about u: e1 -> cos e1 - sin e2
    theta = _norm_angle(float(np.arctan2(-(e2 @ w_perp), e1 @ w_perp)))
    return [theta]


def _sandwich_candidates(pattern: tuple[str, str, str], mat: np.ndarray) -> list[tuple]:
    """Angle candidates for mat = G_p0(a) G_p1(b) G_p2(c), p0 == p2 != p1."""
    u = _AXIS_VEC[pattern[0]]
    gen_mid = _GEN[pattern[1]]
    # u . mat . u = 1/4 + (3/4) cos(b) for axes 120 degrees apart
    cos_b = (float(u @ mat @ u) - 0.25) / 0.75
    if abs(cos_b) > 1 + 1e-9:
        return []
    cos_b = float(np.clip(cos_b, -1.0, 1.0))
    out = []
    for b in {_norm_angle(np.arccos(cos_b)), _norm_angle(-np.arccos(cos_b))}:
        mid = gen_mid(b)
        for a in _solve_cone_angles(pattern[0], mid @ u, mat @ u):
            rest = _GEN[pattern[1]](-b) @ _GEN[pattern[0]](-a) @ mat
            c = _rotation_angle_about(pattern[2], rest)
            if c is None:
                continue
            out.append((a, b, c))
    return out


def _four_pulse_candidates(pattern: tuple[str, ...], mat: np.ndarray) -> list[tuple]:
    """Angles for mat = G_p0(a) G_p1(b) G_p2(c) G_p3(d), alternating axes.

    The leading angle is pinned to the feasibility boundary of the inner
    3-pulse sandwich, which makes the candidate set discrete.
    """
    u0 = _AXIS_VEC[pattern[0]]
    u1 = _AXIS_VEC[pattern[1]]
    w = mat @ u1  # G_p3 fixes u1
    # Need u1 . (G_p0(-a) mat) . u1 = -1/2 (sandwich boundary, inner b = pi):
    # (G_p0(a) u1) . w = -1/2.
    par = float(u0 @ u1)  # -1/2
    v_perp = u1 - par * u0
    w_par = float(u0 @ w)
    w_perp = w - w_par * u0
    r_v = np.linalg.norm(v_perp)
    r_w = np.linalg.norm(w_perp)
    rhs = -0.5 - par * w_par
    if r_v * r_w < 1e-12:
        cand_a = [0.0] if abs(rhs) < 1e-9 else []
    else:
        cos_delta = rhs / (r_v * r_w)
        if abs(cos_delta) > 1 + 1e-9:
            return []
        cos_delta = float(np.clip(cos_delta, -1.0, 1.0))
        e1 = v_perp / r_v
        e2 = np.cross(u0, e1)
        phi_w = float(np.arctan2(e2 @ w_perp, e1 @ w_perp))
        # (G_p0(a) e1) . w_perp = r_w cos(phi_w + a)  [rotation by -a about u0]
        delta = np.arccos(cos_delta)
        cand_a = {_norm_angle(-phi_w + delta), _norm_angle(-phi_w - delta)}
    out = []
    for a in cand_a:
        rest = _GEN[pattern[0]](-a) @ mat
        for b, c, d in _sandwich_candidates(pattern[1:], rest):
            out.append((a, b, c, d))
    return out


_PATTERNS_BY_LENGTH = {
    1: [("z",), ("n",)],
    2: [("z", "n"), ("n", "z")],
    3: [("z", "n", "z"), ("n", "z", "n")],
    4: [("z", "n", "z", "n"), ("n", "z", "n", "z")],
}


def decompose_rotation(mat: np.ndarray) -> list[AxisAnglePulse]:
    """Shortest strictly alternating z/n pulse sequence composing to mat.

    Application order is left to right; the composed Bloch matrix is the
    reversed matrix product. Ties go to the lexicographically smallest
    angle tuple (1e-12 granularity), then the axis pattern.
    """
    mat = np.asarray(mat, dtype=float)
    if np.max(np.abs(mat - np.eye(3))) < _TOL:
        return []
    candidates = []
    for length in (1, 2, 3, 4):
        for pattern in _PATTERNS_BY_LENGTH[length]:
            if length == 1:
                theta = _rotation_angle_about(pattern[0], mat)
                sols = [(theta,)] if theta is not None else []
            elif length == 2:
                sols = [
                    (a, b)
                    for (a, b, c) in _sandwich_candidates(pattern + (pattern[0],), mat)
                    if abs(c) < 1e-9 or abs(c - _TWO_PI) < 1e-9
                ]
            elif length == 3:
                sols = _sandwich_candidates(pattern, mat)
            else:
                sols = _four_pulse_candidates(pattern, mat)
            for angles in sols:
                angles = tuple(_norm_angle(t) for t in angles)
                if any(t == 0.0 for t in angles):
                    continue  # reducible; found at a shorter length
                check = np.eye(3)
                for role, t in zip(pattern, angles):
                    check = check @ _GEN[role](t)
                if np.max(np.abs(check - mat)) > 1e-9:
                    continue
                key = tuple(round(t, 12) for t in angles)
                candidates.append((length, key, "".join(pattern), angles))
        if candidates:
            break
    if not candidates:
        raise RuntimeError("no alternating-axis decomposition found")
    candidates.sort()
    length, _, pattern, angles = candidates[0]
    # Matrix product composes right to left, so the first factor is the
    # last pulse applied: reverse to get application order.
    return [AxisAnglePulse(role, t) for role, t in zip(pattern, angles)][::-1]


@lru_cache(maxsize=64)
def _decompose_cached(matrix_key: tuple) -> tuple[AxisAnglePulse, ...]:
    return tuple(decompose_rotation(np.array(matrix_key, dtype=float)))


def decompose_clifford(c: CliffordElement) -> list[AxisAnglePulse]:
    """Pulse decomposition of a Clifford element, from the precomputed table."""
    return list(_decompose_cached(c.matrix))


def decomposition_table() -> dict[str, list[AxisAnglePulse]]:
    return {e.name: decompose_clifford(e) for e in clifford_group()}


def export_table_json() -> str:
    """Audit dump: element name -> [axis, angle] list, in application order."""
    table = {
        name: [[p.axis_role, p.angle] for p in pulses]
        for name, pulses in decomposition_table().items()
    }
    return json.dumps(table, indent=2, sort_keys=True)


def compile_sequence(
    grid: GridSpec,
    frame: EncodedFrame,
    cliffords: list[CliffordElement],
    t_pulse_s: float,
    t_idle_s: float,
) -> PulseSeq:
    """Concatenate Clifford decompositions onto the frame's exchange axes.

    Axis role z maps to the (a, b) singlet axis and n to the (b, c) gauge
    axis; every pulse is followed by t_idle.
    """
    if t_pulse_s <= 0 or t_idle_s < 0:
        raise ValueError("timings must be positive")
    a, b = frame.assignment.singlet_pair
    c = frame.assignment.gauge_dot
    ax_z = grid.live_axis_between(a, b)
    ax_n = grid.live_axis_between(b, c)
    if ax_z is None or ax_n is None:
        raise ValueError("frame axes are dead")
    label = {"z": ax_z.label, "n": ax_n.label}
    pulses = []
    for cl in cliffords:
        for p in decompose_clifford(cl):
            pulses.append(Pulse(label[p.axis_role], p.angle, t_pulse_s, t_idle_s))
    return PulseSeq.of(pulses)
