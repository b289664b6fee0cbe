"""Two-regime dam with compound-Poisson inflow: exact stationary law,
heavy-traffic limits, optimal outflow control and a simulation oracle."""

__version__ = "0.1.0"

from ._backend import BACKEND
from .asymptotics import (
    HeavyTrafficParams,
    LimitP,
    Regime,
    RootSolution,
    Side,
    find_root,
    limit_p,
    limit_q,
    limit_q_terms,
    lower_diffusion_limit_p,
    root_expansion,
)
from .control import ControlSolution, SweepRow, minimize_scalar, solve_control, sweep_j2
from .dist import (
    BatchDistribution,
    CoeffSeq,
    ServiceDistribution,
    arrivals_per_service_coeffs,
    batch_pgf,
    compound_poisson_pmf,
    lst,
)
from .errors import (
    ConfigError,
    ConsistencyWarning,
    DamError,
    DomainError,
    NoBracketError,
    NormalizationError,
    SingularError,
    StabilityError,
)
from .model import DamModel
from .objective import (
    CostProfile,
    ObjectiveValue,
    c_star,
    eta,
    exact_objective,
    j_critical,
    j_lower,
    j_upper,
    psi,
)
from .sim import SimulationResult, replicate, simulate
from .stationary import StationaryDistribution, stationary_distribution
from .takacs import BusyTable, LinearReps, busy_table, linear_reps, quasi_linear_nu2, solve_takacs

__all__ = [
    "BACKEND",
    "BatchDistribution",
    "BusyTable",
    "CoeffSeq",
    "ConfigError",
    "ConsistencyWarning",
    "ControlSolution",
    "CostProfile",
    "DamError",
    "DamModel",
    "DomainError",
    "HeavyTrafficParams",
    "LimitP",
    "LinearReps",
    "NoBracketError",
    "NormalizationError",
    "ObjectiveValue",
    "Regime",
    "RootSolution",
    "ServiceDistribution",
    "Side",
    "SimulationResult",
    "SingularError",
    "StabilityError",
    "StationaryDistribution",
    "SweepRow",
    "arrivals_per_service_coeffs",
    "batch_pgf",
    "busy_table",
    "c_star",
    "compound_poisson_pmf",
    "eta",
    "exact_objective",
    "find_root",
    "j_critical",
    "j_lower",
    "j_upper",
    "limit_p",
    "limit_q",
    "limit_q_terms",
    "linear_reps",
    "lower_diffusion_limit_p",
    "lst",
    "minimize_scalar",
    "psi",
    "quasi_linear_nu2",
    "replicate",
    "root_expansion",
    "simulate",
    "solve_control",
    "solve_takacs",
    "stationary_distribution",
    "sweep_j2",
]
