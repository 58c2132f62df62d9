"""Parameter symmetries of buffered circuits, noisy simulation, hopping.

The package splits into: Pauli algebra (``pauli``), the layered circuit IR
(``circuit``), pulse propagation and parameter symmetries (``pulses``), the
density-matrix simulator (``noise``), cost functions (``costs``), the local
and hopping optimizers (``optimize``), shift rules for alternating-layer
ansatze (``qaoa``) and the experiment harness (``experiments``).
"""

from .circuit import (
    BUFFER_NONE,
    BUFFER_RY,
    BUFFER_RYRX,
    BufferedCircuit,
    CircuitEvaluator,
    Cnot,
    FixedClifford,
    ParameterVector,
    PauliRotation,
    SlotBinding,
    apply_to_state,
    build_unitary,
    circuit_from_json,
    circuit_to_json,
    expand_parameters,
    hardware_efficient_ansatz,
    hva_xxx_ansatz,
    pretty,
    rotation_matrix,
    unbind,
)
from .costs import (
    CompileOverlap,
    Expectation,
    Hamiltonian,
    compile_cost,
    expectation_cost,
    hamiltonian_from_text,
    hamiltonian_to_text,
    improvement_pct,
    w_state,
    xxx_bond_hamiltonians,
    xxx_hamiltonian,
)
from .errors import (
    BindingConflictError,
    CapacityError,
    DimensionError,
    UnabsorbablePulseError,
)
from .noise import (
    AmplitudeDamping,
    CoherentDrift,
    Compose,
    DensityMatrix,
    Dephasing,
    Depolarizing,
    NoiseModel,
    NoisyRunner,
    QuantumChannel,
    UnitalPauli,
    apply_channel,
    channel_from_json,
    channel_superoperator,
    commutator_norm,
    conjugation_superoperator,
    noise_model_from_json,
    pauli_transfer,
    relaxation_channel,
    run_noisy,
    validate_channel,
)
from .optimize import (
    SCHEDULE_CONSTRAINED,
    SCHEDULE_CONSTRAINED_FREE,
    SCHEDULE_CONSTRAINED_SYMH,
    SCHEDULE_FREE,
    SCHEDULES,
    LocalOptimizerConfig,
    OptResult,
    Problem,
    RunRecord,
    SweepConfig,
    SweepResult,
    coordinate_descent,
    local_optimize,
    nelder_mead,
    run_schedule,
    sweep_optimize,
    symh_hop,
)
from .experiments import (
    DEFAULT_NOISE_CONFIG,
    EXPERIMENT_QAOA,
    EXPERIMENT_THEOREMS,
    EXPERIMENT_VQC_W,
    EXPERIMENT_VQE_XXX,
    EXPERIMENTS,
    GRAPHS,
    ExperimentConfig,
    GraphReport,
    SummaryRow,
    SummaryTable,
    TheoremReport,
    breaking_witnesses,
    graph_symmetry_report,
    random_buffered_circuit,
    random_transform_subset,
    read_jsonl,
    run_qaoa_report,
    run_theorem_check,
    run_vqc_w,
    run_vqe_xxx,
    summarize_vqc,
    summarize_vqe,
    write_jsonl,
    write_records_csv,
)
from .pauli import PauliWord, commutes, multiply, to_matrix
from .pulses import (
    Pulse,
    SymmetryTransform,
    absorb_in_buffer,
    apply_transform,
    commute_through_cnot,
    commute_through_fixed_clifford,
    commute_through_rotation,
    create_pulse,
    enumerate_transforms,
    reduce_domain,
    transform_fidelity,
)
from .qaoa import (
    KIND_MIXING_PAIR,
    KIND_PROBLEM_PAIR,
    KIND_PROBLEM_SINGLE,
    MIXING_RULE_NONE,
    MIXING_RULE_PAIR,
    MIXING_RULE_PAIR_NEGATING,
    PROBLEM_RULE_NONE,
    PROBLEM_RULE_PAIR,
    PROBLEM_RULE_SINGLE,
    QaoaReport,
    QaoaTemplate,
    complete_graph_terms,
    mixing_slot,
    problem_slot,
    qaoa_circuit,
    qaoa_symmetries,
    ring_graph_terms,
    star_graph_terms,
)

__all__ = [name for name in dir() if not name.startswith("_")]
