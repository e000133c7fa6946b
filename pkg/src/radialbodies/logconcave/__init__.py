"""Log-concave functions, generalized covariograms and mollification."""

from .covariograms import (CovariogramFn, FunctionCovariogramFn, MultiCovariogramFn,
                           WeightedCovariogramFn, generalized_covariogram)
from .functions import (ALL_SPACE, CallableFn, ExpNorm, FunctionError, Gaussian, Indicator,
                        LogConcaveFn, Measure, Product, QuadraticExponential, RayProfile,
                        make_function, ray_profile, restrict)
from .mollify import MollifiedFn, MollifyError, argmax_concave, mollify, unique_max
from .validation import ValidationResult, fit_envelope, validate

__all__ = [
    "CovariogramFn", "FunctionCovariogramFn", "MultiCovariogramFn", "WeightedCovariogramFn",
    "generalized_covariogram", "ALL_SPACE", "CallableFn", "ExpNorm", "FunctionError",
    "Gaussian", "Indicator", "LogConcaveFn", "Measure", "Product", "QuadraticExponential",
    "RayProfile", "make_function", "ray_profile", "restrict", "MollifiedFn", "MollifyError",
    "argmax_concave", "mollify", "unique_max", "ValidationResult", "fit_envelope", "validate",
]
