"""Exchange-only spin-qubit simulator and layout toolkit for 2D dot grids."""

from .kernels import BACKEND
from .lattice import (
    DotId,
    ExchangeAxis,
    GridSpec,
    Placement,
    QubitAssignment,
    Tqd,
    count_disjoint_tqd_pairs,
    enumerate_qubit_assignments,
    enumerate_tqds,
    pack_qubits,
    qubits_adjacent,
    tqd_count_formula,
)
from .statevec import (
    FieldSpec,
    NoiseSample,
    PureState,
    apply_exchange,
    evolve_segment,
    exchange_unitary_4,
    measure_singlet,
    pair_propagator_4,
    prepare_state,
)
from .pulseseq import Pulse, PulseSeq, execute_pulse_seq
from .encoding import (
    EncodedFrame,
    LogicalReadout,
    RouteError,
    effective_qubit_hamiltonian,
    encoded_zero,
    frame_for,
    logical_bloch,
    logical_projectors,
    reduced_density_3,
    route_singlet,
    route_singlet_to_pair,
)
from .cliffords import (
    AxisAnglePulse,
    CliffordElement,
    CliffordGroup,
    clifford_group,
    compile_sequence,
    decompose_clifford,
    decompose_rotation,
    decomposition_table,
    pulse_rotation,
)
from .pulses import (
    CalibrationError,
    ExchangeModel,
    FingerprintMap,
    FitNotConvergedError,
    NoscEstimate,
    PulseSpec,
    calibrate_pulse,
    extract_n_osc,
    gaussian_nosc_prediction,
    j_of_v,
    simulate_decay_trace,
    simulate_fingerprint,
)
from .rb import (
    OracleReport,
    RBConfig,
    RBNoise,
    RBRawData,
    RBResult,
    fit_rb,
    pool_results,
    run_rb,
    validate_rb_oracle,
)

__version__ = "0.1.0"
