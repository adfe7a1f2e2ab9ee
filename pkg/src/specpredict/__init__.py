"""Linear prediction for multivariate stationary sequences, computed
directly from the matrix spectral density, with a finite-section projection
oracle for verification."""

from .duality import (
    CyclicModel,
    FiniteSection,
    VerificationReport,
    cyclic_exact_verify,
    cyclic_project,
    dual_infimum_check,
    dual_projection_check,
    gram_project,
    trace_normalized_check,
)
from .errors import SpecPredictError
from .factorization import OuterFactor, factor_residual, factorize, invert_outer
from .index_sets import IndexSetSpec, parse_index_set
from .predictors import (
    PredictionSolution,
    Predictor,
    delta_scalar,
    interpolate_all,
    missing_past_delta,
    nakazi_predict,
    single_future_delta,
    szego_delta,
    szego_functional_probe,
    yaglom_det_ratio,
    yaglom_gap,
)
from .weights import (
    WeightFunction,
    class_membership,
    fourier_coefficient,
    fourier_coefficients,
    inverse_weight,
    log_det_mean,
    mean_integral,
    regularize,
)

__version__ = "0.1.0"

__all__ = [
    "CyclicModel",
    "FiniteSection",
    "IndexSetSpec",
    "OuterFactor",
    "PredictionSolution",
    "Predictor",
    "SpecPredictError",
    "VerificationReport",
    "WeightFunction",
    "class_membership",
    "cyclic_exact_verify",
    "cyclic_project",
    "delta_scalar",
    "dual_infimum_check",
    "dual_projection_check",
    "factor_residual",
    "factorize",
    "fourier_coefficient",
    "fourier_coefficients",
    "gram_project",
    "interpolate_all",
    "invert_outer",
    "inverse_weight",
    "log_det_mean",
    "mean_integral",
    "missing_past_delta",
    "nakazi_predict",
    "parse_index_set",
    "regularize",
    "single_future_delta",
    "szego_delta",
    "szego_functional_probe",
    "trace_normalized_check",
    "yaglom_det_ratio",
    "yaglom_gap",
]
