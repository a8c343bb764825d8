import itertools

import pytest
from hypothesis import given, settings, strategies as st

from eoqsim.lattice import (
    GridSpec,
    Tqd,
    QubitAssignment,
    PERM_12_3,
    PERM_23_1,
    count_disjoint_tqd_pairs,
    enumerate_qubit_assignments,
    enumerate_tqds,
    pack_qubits,
    qubits_adjacent,
    tqd_count_formula,
)


def test_axis_labels_2x3():
    grid = GridSpec(2, 3)
    labels = [ax.label for ax in grid.all_axes()]
    assert labels == ["X1", "X2", "X3", "X4", "Y5", "Y6", "Y7"]
    assert grid.axis_by_label("X2").dots() == frozenset({(0, 1), (0, 2)})
    assert grid.axis_by_label("Y5").dots() == frozenset({(0, 0), (1, 0)})
    assert grid.axis_by_label("Y7").dots() == frozenset({(0, 2), (1, 2)})


def test_dot_names_row_major():
    grid = GridSpec(2, 3)
    assert [grid.dot_name(d) for d in grid.dots()] == ["P1", "P2", "P3", "P4", "P5", "P6"]
    assert grid.dot_by_name("P5") == (1, 1)


def test_2x3_counts():
    grid = GridSpec(2, 3)
    assert len(enumerate_tqds(grid)) == 10
    assert len(enumerate_qubit_assignments(grid)) == 20
    assert count_disjoint_tqd_pairs(grid) == 6


def test_1x3_single_tqd():
    tqds = enumerate_tqds(GridSpec(1, 3))
    assert len(tqds) == 1
    assert tqds[0].shape == "linear-horizontal"


def test_formula_matches_enumeration():
    for n, m in itertools.product(range(2, 7), repeat=2):
        assert len(enumerate_tqds(GridSpec(n, m))) == tqd_count_formula(n, m)


def test_formula_rejects_degenerate_grids():
    with pytest.raises(ValueError):
        tqd_count_formula(1, 5)


def test_tqd_order_canonical():
    tqds = enumerate_tqds(GridSpec(2, 3))
    # direction-canonicalized: endpoints sorted, ordered by middle dot
    for t in tqds:
        assert t.dots[0] < t.dots[2]
    assert [t.sort_key() for t in tqds] == sorted(t.sort_key() for t in tqds)


def test_dead_dot_kills_incident_axes():
    grid = GridSpec(2, 3, dead_dots=frozenset({(0, 0)}))
    assert grid.live_axis_between((0, 0), (0, 1)) is None
    assert grid.live_axis_between((0, 1), (0, 2)) is not None
    assert len(enumerate_tqds(grid)) == 6


def test_dead_axis_keeps_dots():
    grid = GridSpec(2, 3, dead_axes=frozenset({"X1"}))
    assert grid.live_axis_between((0, 0), (0, 1)) is None
    assert (0, 0) in grid.live_dots()
    # (0,0) still reachable through Y5
    assert grid.live_neighbors((0, 0)) == [(1, 0)]


def test_assignment_singlet_pair_and_gauge():
    t = Tqd(((0, 0), (0, 1), (0, 2)))
    a = QubitAssignment(t, PERM_12_3)
    assert a.singlet_pair == ((0, 0), (0, 1)) and a.gauge_dot == (0, 2)
    b = QubitAssignment(t, PERM_23_1)
    assert b.singlet_pair == ((0, 1), (0, 2)) and b.gauge_dot == (0, 0)


def test_pack_2x3_two_qubits():
    placement = pack_qubits(GridSpec(2, 3), objective="max-count-then-adjacency")
    assert len(placement) == 2
    assert placement.adjacency_count == 1
    dots = [d for q in placement.qubits for d in q.tqd.dots]
    assert len(set(dots)) == 6


def test_pack_2x3_one_dead_dot():
    placement = pack_qubits(GridSpec(2, 3, dead_dots=frozenset({(0, 0)})))
    assert len(placement) == 1


def test_pack_exact_matches_oracle_small():
    for dead in [(), ((0, 0),), ((1, 1),), ((0, 0), (1, 2))]:
        grid = GridSpec(2, 3, dead_dots=frozenset(dead))
        a = pack_qubits(grid, solver="exact")
        b = pack_qubits(grid, solver="brute-force-oracle")
        assert len(a) == len(b)
        assert a.qubits == b.qubits  # same tie-break, identical placement


def test_qubits_adjacent():
    grid = GridSpec(2, 3)
    t1 = ((0, 0), (0, 1), (0, 2))
    t2 = ((1, 0), (1, 1), (1, 2))
    assert qubits_adjacent(grid, t1, t2)
    assert not qubits_adjacent(GridSpec(2, 3, dead_axes=frozenset({"Y5", "Y6", "Y7"})), t1, t2)


@given(st.integers(1, 5), st.integers(1, 5))
@settings(max_examples=25, deadline=None)
def test_tqd_paths_are_valid(n, m):
    grid = GridSpec(n, m)
    for t in enumerate_tqds(grid):
        d1, d2, d3 = t.dots
        assert grid.live_axis_between(d1, d2) is not None
        assert grid.live_axis_between(d2, d3) is not None
        assert d1 != d3
