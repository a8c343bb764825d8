"""2D quantum-dot lattice: dots, exchange axes, TQD enumeration, qubit packing.

Dots live on an n_rows x n_cols grid and are addressed by (row, col).
Nearest-neighbor exchange axes are labeled X<k> for intra-row couplings
(numbered row-major starting at X1) and Y<k> for inter-row couplings
(numbered column-major, continuing the count: a 2x3 grid has X1..X4, Y5..Y7).
Dots also carry P-names P1..P(n*m) in row-major order, so a 2x3 grid is
P1 P2 P3 / P4 P5 P6.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Optional

DotId = tuple[int, int]  # (row, col)

SHAPE_LINEAR_H = "linear-horizontal"
SHAPE_LINEAR_V = "linear-vertical"
SHAPE_ELBOW = "elbow"
_SHAPE_RANK = {SHAPE_LINEAR_H: 0, SHAPE_LINEAR_V: 1, SHAPE_ELBOW: 2}

PERM_12_3 = "(1,2)3"  # singlet on (d1, d2), gauge spin d3
PERM_23_1 = "(2,3)1"  # singlet on (d2, d3), gauge spin d1
PERMUTATIONS = (PERM_12_3, PERM_23_1)


@dataclass(frozen=True)
class ExchangeAxis:
    a: DotId
    b: DotId
    kind: str  # "X" (intra-row) or "Y" (inter-row)
    label: str

    def dots(self) -> frozenset[DotId]:
        return frozenset((self.a, self.b))


@dataclass(frozen=True)
class GridSpec:
    n_rows: int
    n_cols: int
    dead_dots: frozenset[DotId] = field(default_factory=frozenset)
    dead_axes: frozenset[str] = field(default_factory=frozenset)

    def __post_init__(self):
        if self.n_rows < 1 or self.n_cols < 1:
            raise ValueError("grid must have at least one row and column")
        object.__setattr__(self, "dead_dots", frozenset(tuple(d) for d in self.dead_dots))
        object.__setattr__(self, "dead_axes", frozenset(self.dead_axes))
        for d in self.dead_dots:
            if not self.in_bounds(d):
                raise ValueError(f"dead dot {d} out of bounds")
        known = {ax.label for ax in self.all_axes()}
        for lbl in self.dead_axes:
            if lbl not in known:
                raise ValueError(f"dead axis {lbl!r} not an axis of this grid")

    # -- dots ------------------------------------------------------------

    def in_bounds(self, d: DotId) -> bool:
        return 0 <= d[0] < self.n_rows and 0 <= d[1] < self.n_cols

    def dots(self) -> list[DotId]:
        return [(r, c) for r in range(self.n_rows) for c in range(self.n_cols)]

    def live_dots(self) -> list[DotId]:
        return [d for d in self.dots() if d not in self.dead_dots]

    def dot_index(self, d: DotId) -> int:
        """Row-major index of a dot; also its spin index in the simulator."""
        if not self.in_bounds(d):
            raise ValueError(f"dot {d} out of bounds")
        return d[0] * self.n_cols + d[1]

    def dot_name(self, d: DotId) -> str:
        return f"P{self.dot_index(d) + 1}"

    def dot_by_name(self, name: str) -> DotId:
        k = int(name.lstrip("P")) - 1
        if not 0 <= k < self.n_rows * self.n_cols:
            raise ValueError(f"no dot named {name}")
        return (k // self.n_cols, k % self.n_cols)

    # -- axes ------------------------------------------------------------

    def all_axes(self) -> list[ExchangeAxis]:
        axes = []
        k = 1
        for r in range(self.n_rows):
            for c in range(self.n_cols - 1):
                axes.append(ExchangeAxis((r, c), (r, c + 1), "X", f"X{k}"))
                k += 1
        for c in range(self.n_cols):
            for r in range(self.n_rows - 1):
                axes.append(ExchangeAxis((r, c), (r + 1, c), "Y", f"Y{k}"))
                k += 1
        return axes

    @cached_property
    def _axis_by_pair(self) -> dict[frozenset[DotId], ExchangeAxis]:
        return {ax.dots(): ax for ax in self.all_axes()}

    @cached_property
    def _axis_by_label(self) -> dict[str, ExchangeAxis]:
        return {ax.label: ax for ax in self.all_axes()}

    def axis_by_label(self, label: str) -> ExchangeAxis:
        try:
            return self._axis_by_label[label]
        except KeyError:
            raise ValueError(f"no axis labeled {label!r}") from None

    def axis_between(self, a: DotId, b: DotId) -> Optional[ExchangeAxis]:
        return self._axis_by_pair.get(frozenset((a, b)))

    def axis_is_live(self, ax: ExchangeAxis) -> bool:
        # A dead dot kills every incident axis; a dead axis keeps its dots usable.
        if ax.label in self.dead_axes:
            return False
        return ax.a not in self.dead_dots and ax.b not in self.dead_dots

    def live_axes(self) -> list[ExchangeAxis]:
        return [ax for ax in self.all_axes() if self.axis_is_live(ax)]

    def live_axis_between(self, a: DotId, b: DotId) -> Optional[ExchangeAxis]:
        ax = self.axis_between(a, b)
        if ax is not None and self.axis_is_live(ax):
            return ax
        return None

    def live_neighbors(self, d: DotId) -> list[DotId]:
        out = []
        for dr, dc in ((-1, 0), (1, 0), (0, -1), (0, 1)):
            e = (d[0] + dr, d[1] + dc)
            if self.in_bounds(e) and self.live_axis_between(d, e) is not None:
                out.append(e)
        return out


@dataclass(frozen=True)
class Tqd:
    """Three dots forming a simple path d1-d2-d3 over live axes."""

    dots: tuple[DotId, DotId, DotId]

    def __post_init__(self):
        d1, d2, d3 = self.dots
        if len({d1, d2, d3}) != 3:
            raise ValueError("TQD dots must be distinct")

    @property
    def shape(self) -> str:
        d1, d2, d3 = self.dots
        if d1[0] == d2[0] == d3[0]:
            return SHAPE_LINEAR_H
        if d1[1] == d2[1] == d3[1]:
            return SHAPE_LINEAR_V
        return SHAPE_ELBOW

    def dot_set(self) -> frozenset[DotId]:
        return frozenset(self.dots)

    def sort_key(self):
        d1, d2, d3 = self.dots
        return (d2, _SHAPE_RANK[self.shape], d1, d3)


@dataclass(frozen=True)
class QubitAssignment:
    """A TQD plus the DFS permutation naming which pair holds the singlet."""

    tqd: Tqd
    permutation: str  # PERM_12_3 or PERM_23_1

    def __post_init__(self):
        if self.permutation not in PERMUTATIONS:
            raise ValueError(f"unsupported permutation {self.permutation!r}")

    @property
    def singlet_pair(self) -> tuple[DotId, DotId]:
        d1, d2, d3 = self.tqd.dots
        return (d1, d2) if self.permutation == PERM_12_3 else (d2, d3)

    @property
    def gauge_dot(self) -> DotId:
        d1, d2, d3 = self.tqd.dots
        return d3 if self.permutation == PERM_12_3 else d1


@dataclass(frozen=True)
class Placement:
    qubits: tuple[QubitAssignment, ...]
    adjacency_count: int

    def __len__(self) -> int:
        return len(self.qubits)


def enumerate_tqds(grid: GridSpec) -> list[Tqd]:
    """All 3-dot simple paths over live dots and live axes, canonically ordered.

    Each path appears once, direction-canonicalized so d1 < d3; order is
    row-major by the middle dot, then shape, then endpoints.
    """
    tqds = []
    for d2 in grid.live_dots():
        nbrs = grid.live_neighbors(d2)
        for d1, d3 in itertools.combinations(sorted(nbrs), 2):
            tqds.append(Tqd((d1, d2, d3)))
    tqds.sort(key=Tqd.sort_key)
    return tqds


def tqd_count_formula(n: int, m: int) -> int:
    """Closed-form TQD count 6(n-1)(m-1)-2 for a defect-free n x m grid."""
    if n < 2 or m < 2:
        raise ValueError("formula requires n >= 2 and m >= 2; enumerate instead")
    return 6 * (n - 1) * (m - 1) - 2


def enumerate_qubit_assignments(grid: GridSpec) -> list[QubitAssignment]:
    """Two single-axis DFS permutations per TQD, in TQD canonical order."""
    return [
        QubitAssignment(tqd, perm)
        for tqd in enumerate_tqds(grid)
        for perm in PERMUTATIONS
    ]


def count_disjoint_tqd_pairs(grid: GridSpec) -> int:
    """Number of ordered pairs of dot-disjoint TQDs.

    On the defect-free 2x3 grid there are 3 unordered dot-partitions into
    two TQDs, hence 6 ordered pairs.
    """
    tqds = enumerate_tqds(grid)
    n = 0
    for a, b in itertools.permutations(tqds, 2):
        if not (a.dot_set() & b.dot_set()):
            n += 1
    return n


def qubits_adjacent(grid: GridSpec, a: Iterable[DotId], b: Iterable[DotId]) -> bool:
    sa, sb = set(a), set(b)
    for u in sa:
        for v in sb:
            if grid.live_axis_between(u, v) is not None:
                return True
    return False


def _adjacency_count(grid: GridSpec, tqds: list[Tqd]) -> int:
    return sum(
        1
        for a, b in itertools.combinations(tqds, 2)
        if qubits_adjacent(grid, a.dots, b.dots)
    )


def _placement_from_tqds(grid: GridSpec, chosen: list[Tqd]) -> Placement:
    qubits = tuple(QubitAssignment(t, PERM_12_3) for t in sorted(chosen, key=Tqd.sort_key))
    return Placement(qubits, _adjacency_count(grid, list(chosen)))


def _objective(grid: GridSpec, chosen: list[Tqd], with_adjacency: bool):
    if with_adjacency:
        return (len(chosen), _adjacency_count(grid, chosen))
    return (len(chosen),)


def _encoding(chosen: list[Tqd]) -> tuple:
    # Canonical set encoding used for deterministic tie-breaking.
    return tuple(sorted(t.sort_key() for t in chosen))


def pack_qubits(
    grid: GridSpec,
    objective: str = "max-count",
    solver: str = "exact",
) -> Placement:
    """Maximum dot-disjoint TQD packing, optionally tie-broken by adjacency.

    objective: "max-count" or "max-count-then-adjacency".
    solver: "exact" (branch and bound) or "brute-force-oracle" (exhaustive);
    both are provably optimal and agree; the oracle exists for cross-checks.
    Ties between equal-objective placements go to the lexicographically least
    canonical encoding.
    """
    if objective not in ("max-count", "max-count-then-adjacency"):
        raise ValueError(f"unknown objective {objective!r}")
    if solver not in ("exact", "brute-force-oracle"):
        raise ValueError(f"unknown solver {solver!r}")
    with_adj = objective == "max-count-then-adjacency"
    tqds = enumerate_tqds(grid)
    n = len(tqds)
    dot_sets = [t.dot_set() for t in tqds]

    best: dict = {"obj": None, "enc": None, "chosen": []}

    def consider(chosen: list[Tqd]):
        obj = _objective(grid, chosen, with_adj)
        enc = _encoding(chosen)
        if best["obj"] is None or obj > best["obj"] or (obj == best["obj"] and enc < best["enc"]):
            best["obj"] = obj
            best["enc"] = enc
            best["chosen"] = list(chosen)

    if solver == "brute-force-oracle":
        def explore(start: int, chosen: list[Tqd], used: frozenset):
            consider(chosen)
            for i in range(start, n):
                if not (dot_sets[i] & used):
                    chosen.append(tqds[i])
                    explore(i + 1, chosen, used | dot_sets[i])
                    chosen.pop()

        explore(0, [], frozenset())
        return _placement_from_tqds(grid, best["chosen"])

    # Exact branch and bound over the conflict graph of TQDs: TQDs are
    # taken in canonical order; the bound is count-based (remaining TQDs
    # can add at most one qubit each, and at most live_dots//3 total).
    max_possible = len(grid.live_dots()) // 3

    def bnb(start: int, chosen: list[Tqd], used: frozenset):
        consider(chosen)
        if best["obj"] is not None and len(chosen) == max_possible and not with_adj:
            # Count objective already saturated; still recurse for tie-breaks
            # only if a lexicographically smaller encoding could exist, which
            # canonical-order search guarantees it cannot.
            return
        remaining = [i for i in range(start, n) if not (dot_sets[i] & used)]
        if not remaining:
            return
        ub = len(chosen) + min(len(remaining), (len(grid.live_dots()) - 3 * len(chosen)) // 3)
        if best["obj"] is not None and ub < best["obj"][0]:
            return
        for j, i in enumerate(remaining):
            if best["obj"] is not None and len(chosen) + len(remaining) - j < best["obj"][0]:
                break
            chosen.append(tqds[i])
            bnb(i + 1, chosen, used | dot_sets[i])
            chosen.pop()

    bnb(0, [], frozenset())
    return _placement_from_tqds(grid, best["chosen"])
