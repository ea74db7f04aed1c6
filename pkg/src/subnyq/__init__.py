"""Sub-Nyquist compressive acquisition simulation and sparse recovery.

The package simulates three acquisition front ends on a Nyquist-rate grid
(dense random projection, serial random demodulator, parallel segmented
sensing), recovers sparse coefficient vectors with greedy and smoothed-norm
gradient solvers, and ships an experiment harness plus a CLI for
reproducible, seeded runs.
"""

from .demodulator import (
    ChippingSequence,
    DemodConfig,
    DemodFilter,
    VMatrix,
    acquire_serial,
    build_v_matrix,
    make_chips,
    reconstruct_serial,
)
from .evaluation import (
    EnergyModel,
    RateReductionReport,
    RecoveryMetrics,
    SweepRow,
    SweepSpec,
    estimate_energy,
    rate_reduction_report,
    run_sweep,
    score,
)
from .estimators import (
    DemodulatorSensing,
    OMPSparseCoder,
    PNormSparseCoder,
    RandomSensing,
    SegmentedSensing,
    SmoothedL1SparseCoder,
)
from .pscs import (
    FingerBank,
    PscsMeasurement,
    WindowPlan,
    acquire_pscs,
    build_pscs_matrix,
    make_finger_bank,
    window_signal,
)
from .sensing import (
    AcquisitionRecord,
    MeasurementOperator,
    coherence,
    compose,
    make_measurement_matrix,
    measure,
)
from .signals import (
    Basis,
    SparsityProfile,
    analyze,
    make_basis,
    sample_sparse_coefficients,
    sparsity,
    support,
    synthesize,
)
from .solvers import (
    ReconstructionResult,
    SolverConfig,
    omp,
    pnorm_gd,
    pnorm_penalty,
    pnorm_penalty_grad,
    smooth_l1,
    smooth_l1_gd,
    smooth_l1_grad,
    solve,
)

__version__ = "0.1.0"

__all__ = [
    "AcquisitionRecord",
    "Basis",
    "ChippingSequence",
    "DemodConfig",
    "DemodFilter",
    "DemodulatorSensing",
    "EnergyModel",
    "FingerBank",
    "MeasurementOperator",
    "OMPSparseCoder",
    "PNormSparseCoder",
    "PscsMeasurement",
    "RandomSensing",
    "RateReductionReport",
    "ReconstructionResult",
    "RecoveryMetrics",
    "SegmentedSensing",
    "SmoothedL1SparseCoder",
    "SolverConfig",
    "SparsityProfile",
    "SweepRow",
    "SweepSpec",
    "VMatrix",
    "WindowPlan",
    "acquire_pscs",
    "acquire_serial",
    "analyze",
    "build_pscs_matrix",
    "build_v_matrix",
    "coherence",
    "compose",
    "estimate_energy",
    "make_basis",
    "make_chips",
    "make_finger_bank",
    "make_measurement_matrix",
    "measure",
    "omp",
    "pnorm_gd",
    "pnorm_penalty",
    "pnorm_penalty_grad",
    "rate_reduction_report",
    "reconstruct_serial",
    "run_sweep",
    "sample_sparse_coefficients",
    "score",
    "smooth_l1",
    "smooth_l1_gd",
    "smooth_l1_grad",
    "solve",
    "sparsity",
    "support",
    "synthesize",
    "window_signal",
]
