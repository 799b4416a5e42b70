"""Periodic standing waves of the focusing generalized NLS equation
i u_t + u_xx + u_yy + |u|^alpha u = 0 and their transverse stability.

The package solves the one-dimensional profile equation on a period cell
by constrained minimization plus Newton polish, assembles the linearized
(Hill) operators, scans transverse wavenumbers for exponential growth,
and cross-checks predicted rates by direct time integration.
"""

from .errors import (
    BasisError,
    ConvergenceError,
    DegenerateSolutionError,
    FormatError,
    GnlstabError,
    IntegratorError,
    InvalidMultiplierError,
    NewtonBasinError,
    NumericalConsistencyError,
    ParameterError,
    ReductionError,
    SingularJacobianError,
    WaveAcceptanceError,
)
from .spectral import (
    COSINE,
    EVEN,
    FULL,
    NONE,
    ODD,
    SINE,
    ParityBasis,
    PeriodicGrid,
    RealField,
    build_grid,
    first_derivative,
    inner,
    integrate,
    l2_norm,
    parity_defect,
    project_parity,
    resample,
    sample_function,
    second_derivative,
)
from .waves import (
    ProblemParams,
    SolverConfig,
    WaveProfile,
    constant_wave,
    functional_B,
    functionals_E_F,
    minimize_constrained,
    newton_refine,
    ode_residual,
    phase_reduce,
    rescale_unit_multiplier,
    solve_wave,
    tau_for_amplitude,
    wave_at_resolution,
)
from .hill import (
    OperatorMatrix,
    PropositionCheck,
    PropositionReport,
    SpectrumSummary,
    build_block,
    build_hill,
    check_propositions,
    default_zero_tolerance,
    shifted_block_spectra,
    spectrum,
)
from .scan import (
    EDGE_LEVEL,
    UNSTABLE_THRESHOLD,
    HypothesisReport,
    InstabilityEigs,
    KappaRecord,
    StabilityScan,
    UnstableMode,
    evolution_block,
    instability_eigs,
    scan_kappa,
    verify_hypotheses,
)
from .evolve import (
    EvolutionConfig,
    GrowthMeasurement,
    evolve_and_fit,
    linearized_rhs,
    rk4_step_matrix,
    splitting_stepper,
)
from . import serialize

__version__ = "0.1.0"

__all__ = [
    "BasisError",
    "ConvergenceError",
    "DegenerateSolutionError",
    "FormatError",
    "GnlstabError",
    "IntegratorError",
    "InvalidMultiplierError",
    "NewtonBasinError",
    "NumericalConsistencyError",
    "ParameterError",
    "ReductionError",
    "SingularJacobianError",
    "WaveAcceptanceError",
    "COSINE",
    "EVEN",
    "FULL",
    "NONE",
    "ODD",
    "SINE",
    "ParityBasis",
    "PeriodicGrid",
    "RealField",
    "build_grid",
    "first_derivative",
    "inner",
    "integrate",
    "l2_norm",
    "parity_defect",
    "project_parity",
    "resample",
    "sample_function",
    "second_derivative",
    "ProblemParams",
    "SolverConfig",
    "WaveProfile",
    "constant_wave",
    "functional_B",
    "functionals_E_F",
    "minimize_constrained",
    "newton_refine",
    "ode_residual",
    "phase_reduce",
    "rescale_unit_multiplier",
    "solve_wave",
    "tau_for_amplitude",
    "wave_at_resolution",
    "OperatorMatrix",
    "PropositionCheck",
    "PropositionReport",
    "SpectrumSummary",
    "build_block",
    "build_hill",
    "check_propositions",
    "default_zero_tolerance",
    "shifted_block_spectra",
    "spectrum",
    "EDGE_LEVEL",
    "UNSTABLE_THRESHOLD",
    "HypothesisReport",
    "InstabilityEigs",
    "KappaRecord",
    "StabilityScan",
    "UnstableMode",
    "evolution_block",
    "instability_eigs",
    "scan_kappa",
    "verify_hypotheses",
    "EvolutionConfig",
    "GrowthMeasurement",
    "evolve_and_fit",
    "linearized_rhs",
    "rk4_step_matrix",
    "splitting_stepper",
    "serialize",
    "__version__",
]
