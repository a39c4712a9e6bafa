"""Fourier-state distillation: exact simulation, sparse spectral analysis,
gate-level circuits, and fault-tolerant resource accounting."""

from .arbitrary import (
    KDistillationResult,
    KTarget,
    PreparedKState,
    default_truncate_bits,
    deterministic_transform_note,
    distill_k,
    prepare_approx_k,
    qvr_phase,
)
from .circuits import (
    CircuitRun,
    CloneResult,
    Gate,
    GateCircuit,
    RegisterLayout,
    apply_circuit,
    apply_permutation,
    approx_state_circuit,
    build_adder_circuit,
    build_constant_adder_circuit,
    build_distillation_circuit,
    circuit_to_text,
    clone_fourier_state,
    extract_register,
    modular_add_oracle,
)
from .distill import (
    DistillationOutcome,
    ProtocolResult,
    ProtocolSchedule,
    RoundRecord,
    SparseSpectrum,
    distill_pair,
    extend_register,
    extension_kernel_weight,
    initial_sparse_spectrum,
    plan_schedule,
    repeated_symmetric,
    rounds_required,
    rounds_required_simplified,
    run_protocol_exact,
    run_protocol_sparse,
    sparse_extend,
    sparse_symmetric_round,
    symmetric_round,
    trace_csv_rows,
    trace_json_obj,
)
from .errors import CapacityError, DegenerateInputError, PrecisionWarning
from .fourier import (
    FourierAmplitudes,
    FourierSpectrum,
    PhaseFunctionSpec,
    StateVector,
    alias_fold,
    amplitude_cap,
    approx_initial_state,
    dft_direct,
    fidelity,
    fidelity_threshold,
    from_fourier_basis,
    initial_state_weight,
    phase_staircase_state,
    pure_fourier_state,
    rotation_angles,
    series_coefficient,
    series_weight,
    spectrum_of,
    to_fourier_basis,
)
from .resources import (
    ComparisonRow,
    KickbackCost,
    ResourceReport,
    RoundCost,
    adder_toffoli_count,
    comparison_csv_rows,
    comparison_table,
    epsilon_f_kickback,
    epsilon_f_kickback_approx,
    expected_cost_monte_carlo,
    expected_cost_recursion,
    full_resource_report,
    kickback_rotation_cost,
    resources_csv_rows,
    t_sequence_cost,
    t_sequence_cost_bits,
    toffoli_capped,
    toffoli_closed_form,
    toffoli_sum_direct,
    toffoli_uncapped,
    transform_cost,
)

__version__ = "0.1.0"
