"""Quantum change-point detection with unambiguous local measurements.

Exact efficiency vectors and success probabilities for the globally optimal
protocol, construction and optimization of online (sequential) measurement
schedules, and seeded Monte Carlo simulation with a numba-accelerated
kernel and a pure-numpy fallback (select with ``QCPD_BACKEND=numba|numpy``).
"""

from .errors import (
    InvalidMeasurementError,
    NumericDomainError,
    OutOfValidityError,
    QcpdError,
    SingularityError,
)
from .core import (
    AliveState,
    DetectionProfile,
    LocalMeasurement,
    OutcomeDistribution,
    Overlap,
    Particle,
    StrengthSchedule,
    alive_step,
    check_strength,
    enumerate_strategy,
    evaluate_strategy,
    outcome_distribution,
)
from .global_bound import (
    EfficiencyVector,
    GramMatrix,
    Regime,
    ValidityReport,
    build_gram,
    critical_overlap,
    global_efficiencies,
    global_efficiencies_direct,
    global_success,
    optimal_global,
    primed_efficiencies,
    primed_success,
    validate_unambiguous,
)
from .online_opt import (
    Method,
    OnlineSolution,
    RationalCoefficients,
    best_online,
    closed_form_strengths,
    coordinate_objective,
    fl_solution,
    fl_success_asymptotic,
    fl_success_exact,
    optimize_strengths,
    recursive_strengths,
    sl_solution,
    sl_success_asymptotic,
    sl_worst_case_gap,
    total_saturation_point,
)
from .montecarlo import SimulationReport, TrialResult, run_experiment, simulate_trial
from .kernels import active_backend

__version__ = "0.1.0"

__all__ = [
    "AliveState",
    "DetectionProfile",
    "EfficiencyVector",
    "GramMatrix",
    "InvalidMeasurementError",
    "LocalMeasurement",
    "Method",
    "NumericDomainError",
    "OnlineSolution",
    "OutOfValidityError",
    "OutcomeDistribution",
    "Overlap",
    "Particle",
    "QcpdError",
    "RationalCoefficients",
    "Regime",
    "SimulationReport",
    "SingularityError",
    "StrengthSchedule",
    "TrialResult",
    "ValidityReport",
    "active_backend",
    "alive_step",
    "best_online",
    "build_gram",
    "check_strength",
    "closed_form_strengths",
    "coordinate_objective",
    "critical_overlap",
    "enumerate_strategy",
    "evaluate_strategy",
    "fl_solution",
    "fl_success_asymptotic",
    "fl_success_exact",
    "global_efficiencies",
    "global_efficiencies_direct",
    "global_success",
    "optimal_global",
    "optimize_strengths",
    "outcome_distribution",
    "primed_efficiencies",
    "primed_success",
    "recursive_strengths",
    "run_experiment",
    "simulate_trial",
    "sl_solution",
    "sl_success_asymptotic",
    "sl_worst_case_gap",
    "total_saturation_point",
    "validate_unambiguous",
    "__version__",
]
