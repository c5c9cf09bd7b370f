"""Incomplete mutually-unbiased-basis tomography.

Linear inversion from a partial set of MUB, detection of its
unphysicality, and physical least-bias estimators.
"""

from mubtomo.linalg import Tolerances, TOL, eigen_hermitian, hs_inner, min_eig_projector
from mubtomo.mub import MubSet, build_mub, verify_mub, UnsupportedDimensionError
from mubtomo.tomography import (
    ProbabilityTable,
    UlinResult,
    born_probabilities,
    full_reconstruct,
    single_basis_estimator,
    ulin_estimator,
    z_coordinates,
)
from mubtomo.estimators import (
    EstimatorResult,
    LeastBiasConfig,
    bayes_mean_estimator,
    least_bias,
    max_mineig_estimator,
    max_vn_estimator,
    predictability,
    shannon_unmeasured,
    von_neumann_entropy,
)
from mubtomo.negativity import LambdaMinResult, lambda_min_iterate, lambda_min_scan

__version__ = "0.1.0"

__all__ = [
    "TOL",
    "Tolerances",
    "eigen_hermitian",
    "hs_inner",
    "min_eig_projector",
    "MubSet",
    "build_mub",
    "verify_mub",
    "UnsupportedDimensionError",
    "ProbabilityTable",
    "UlinResult",
    "born_probabilities",
    "full_reconstruct",
    "single_basis_estimator",
    "ulin_estimator",
    "z_coordinates",
    "EstimatorResult",
    "LeastBiasConfig",
    "least_bias",
    "max_vn_estimator",
    "max_mineig_estimator",
    "bayes_mean_estimator",
    "predictability",
    "shannon_unmeasured",
    "von_neumann_entropy",
    "LambdaMinResult",
    "lambda_min_iterate",
    "lambda_min_scan",
]
