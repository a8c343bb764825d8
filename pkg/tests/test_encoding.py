import numpy as np
import pytest

from eoqsim.encoding import (
    N_AXIS,
    RouteError,
    effective_qubit_hamiltonian,
    encoded_zero,
    frame_for,
    logical_bloch,
    logical_projectors,
    route_singlet,
    route_singlet_to_pair,
)
from eoqsim.lattice import GridSpec, QubitAssignment, Tqd, PERM_12_3, PERM_23_1, \
    enumerate_qubit_assignments
from eoqsim.pulseseq import execute_pulse_seq
from eoqsim.statevec import apply_exchange, measure_singlet, prepare_state

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SZ = np.diag([1.0, -1.0]).astype(complex)

GRID = GridSpec(2, 3)
TOP_ROW = QubitAssignment(Tqd(((0, 0), (0, 1), (0, 2))), PERM_12_3)


def test_frame_binding():
    frame = frame_for(GRID, TOP_ROW)
    assert frame.spins == (0, 1, 2)
    # (2,3)1 permutation: singlet on (d2, d3), gauge spin is d1
    elbow = QubitAssignment(Tqd(((0, 1), (0, 2), (1, 2))), PERM_23_1)
    assert frame_for(GRID, elbow).spins == (2, 5, 1)


def test_frame_rejects_dead_parts():
    dead = GridSpec(2, 3, dead_dots=frozenset({(0, 2)}))
    with pytest.raises(ValueError):
        frame_for(dead, TOP_ROW)
    no_axis = GridSpec(2, 3, dead_axes=frozenset({"X1"}))
    with pytest.raises(ValueError):
        frame_for(no_axis, TOP_ROW)


def test_encoded_zero_reads_north_pole():
    frame = frame_for(GRID, TOP_ROW)
    ro = logical_bloch(encoded_zero(frame, GRID), frame)
    assert np.allclose(ro.bloch, (0, 0, 1), atol=1e-12)
    assert ro.p_leak < 1e-14


def test_z_pulse_is_phase_only():
    frame = frame_for(GRID, TOP_ROW)
    st = apply_exchange(encoded_zero(frame, GRID), (0, 1), 1.1)
    ro = logical_bloch(st, frame)
    assert np.allclose(ro.bloch, (0, 0, 1), atol=1e-12)


def test_n_pulse_pi_lands_on_n_reflection():
    # exchange pi on (b, c) reflects |0> across the n axis: z -> 2(n.z)n - z
    frame = frame_for(GRID, TOP_ROW)
    st = apply_exchange(encoded_zero(frame, GRID), (1, 2), np.pi)
    ro = logical_bloch(st, frame)
    z = np.array([0.0, 0.0, 1.0])
    expected = 2 * float(N_AXIS @ z) * N_AXIS - z
    assert np.allclose(ro.bloch, expected, atol=1e-12)
    assert ro.p_leak < 1e-14


def test_projectors_resolve_identity():
    p0, p1, pq = logical_projectors()
    assert np.allclose(p0 + p1 + pq, np.eye(8), atol=1e-12)
    for p in (p0, p1, pq):
        assert np.allclose(p @ p, p, atol=1e-12)
    assert np.trace(p0).real == pytest.approx(2.0)  # two gauge sectors
    assert np.trace(pq).real == pytest.approx(4.0)


def test_effective_hamiltonian_matches_pauli_form():
    frame = frame_for(GRID, TOP_ROW)
    rng = np.random.default_rng(12)
    sigma_n = float(N_AXIS[0]) * SX + float(N_AXIS[2]) * SZ
    for _ in range(100):
        ji, jj = rng.uniform(-1e8, 1e8, size=2)
        h = effective_qubit_hamiltonian(frame, ji, jj)
        expected = (ji / 2) * SZ + (jj / 2) * sigma_n
        assert np.max(np.abs(h - expected)) < 1e-10 * max(abs(ji), abs(jj), 1.0)


def test_route_examples():
    # P2,P3 -> singlet pair P2,P6 goes through the single inter-row axis Y7
    seq = route_singlet_to_pair(GRID, ((0, 1), (0, 2)), ((0, 1), (1, 2)))
    assert [p.axis_label for p in seq] == ["Y7"]
    seq2 = route_singlet_to_pair(GRID, ((0, 1), (0, 2)), ((0, 0), (0, 1)))
    assert [p.axis_label for p in seq2] == ["X1", "X2"]


def test_route_empty_when_already_there():
    assert len(route_singlet_to_pair(GRID, ((0, 1), (0, 2)), ((0, 2), (0, 1)))) == 0


def test_route_unreachable_raises():
    cut = GridSpec(2, 3, dead_dots=frozenset({(0, 0), (1, 1)}))
    with pytest.raises(RouteError):
        route_singlet_to_pair(cut, ((0, 1), (0, 2)), ((1, 0), (0, 1)))


def test_route_and_reverse_recovers_state_for_all_assignments():
    spam = ((0, 1), (0, 2))
    init = prepare_state(6, (GRID.dot_index(spam[0]), GRID.dot_index(spam[1])))
    for a in enumerate_qubit_assignments(GRID):
        frame = frame_for(GRID, a)
        seq = route_singlet(GRID, spam, frame)
        routed = execute_pulse_seq(init, GRID, seq)
        pair = (GRID.dot_index(a.singlet_pair[0]), GRID.dot_index(a.singlet_pair[1]))
        assert measure_singlet(routed, pair) == pytest.approx(1.0, abs=1e-12)
        back = execute_pulse_seq(routed, GRID, seq.reversed())
        assert back.fidelity(init) == pytest.approx(1.0, abs=1e-12)
