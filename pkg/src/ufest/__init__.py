"""Query-efficient estimation of functions of an unknown unitary."""

__version__ = "0.1.0"

from .circuit import GHadamardInstance, OutcomeDistribution, p_zero_formula, simulate_ghadamard
from .embed import build_embedding, direct_sum_operator, useful_dim
from .errors import (
    BudgetCapError,
    DimensionCapError,
    IllConditionedError,
    IndeterminateError,
    IntertwinerError,
    McEvaluationError,
    NotUnitaryError,
    NumericalError,
    UfestError,
)
from .estimator import (
    EstimationPlan,
    PacResult,
    build_plan,
    conditional_expectation,
    est_inner,
    estimate_pac,
    pac_shots,
    plan_for,
)
from .fourier import RepQuery, complement_norm_sq, rep_epsilon
from .functions import (
    Determinant,
    IrrepEntry,
    Monomial,
    NormalizedTrace,
    UnivariatePoly,
    build_a,
    evaluate,
    q_bound,
)
from .haar import RngStream, mc_integrate, moment_G, sample_haar
from .irreps import IrrepLabel, irrep_u2, solve_intertwiner

__all__ = [
    "BudgetCapError",
    "Determinant",
    "DimensionCapError",
    "EstimationPlan",
    "GHadamardInstance",
    "IllConditionedError",
    "IndeterminateError",
    "IntertwinerError",
    "IrrepEntry",
    "IrrepLabel",
    "McEvaluationError",
    "Monomial",
    "NormalizedTrace",
    "NotUnitaryError",
    "NumericalError",
    "OutcomeDistribution",
    "PacResult",
    "RepQuery",
    "RngStream",
    "UfestError",
    "UnivariatePoly",
    "build_a",
    "build_embedding",
    "build_plan",
    "complement_norm_sq",
    "conditional_expectation",
    "direct_sum_operator",
    "est_inner",
    "estimate_pac",
    "evaluate",
    "irrep_u2",
    "mc_integrate",
    "moment_G",
    "p_zero_formula",
    "pac_shots",
    "plan_for",
    "q_bound",
    "rep_epsilon",
    "sample_haar",
    "simulate_ghadamard",
    "solve_intertwiner",
    "useful_dim",
]
