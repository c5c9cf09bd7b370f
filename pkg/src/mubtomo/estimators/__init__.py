from mubtomo.estimators.bayes import bayes_mean_estimator
from mubtomo.estimators.convex import FreeCoordinates, InfeasibleError
from mubtomo.estimators.full_rank import max_mineig_estimator, max_vn_estimator
from mubtomo.estimators.least_bias import (
    LeastBiasConfig,
    dmu_objective,
    gradient_W,
    lb_iterate,
    least_bias,
    least_bias_exact,
)
from mubtomo.estimators.measures import Measure, predictability, predictability_gradient
from mubtomo.estimators.result import EstimatorResult, shannon_unmeasured, von_neumann_entropy

__all__ = [
    "EstimatorResult",
    "FreeCoordinates",
    "InfeasibleError",
    "LeastBiasConfig",
    "Measure",
    "bayes_mean_estimator",
    "dmu_objective",
    "gradient_W",
    "lb_iterate",
    "least_bias",
    "least_bias_exact",
    "max_mineig_estimator",
    "max_vn_estimator",
    "predictability",
    "predictability_gradient",
    "shannon_unmeasured",
    "von_neumann_entropy",
]
