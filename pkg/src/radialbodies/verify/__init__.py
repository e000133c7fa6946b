"""Numerical certification of convexity, inequalities, limits and approximation."""

from .checks import (check_boundary_infinity, check_det_inequality, check_directional_convexity,
                     check_H_inequality, check_ip_properties, check_limits,
                     check_mollify_convergence, check_monotonicity, check_prekopa_marginal,
                     check_subadditivity)
from .report import VerificationReport
from .suite import run_suite
from .smooth2d import (Smooth2DFn, quadratic_exponential_2d, random_quadratic_exponential,
                       smooth2d_from_spec, smoothed_box)

__all__ = [
    "check_boundary_infinity", "check_det_inequality", "check_directional_convexity",
    "check_H_inequality", "check_ip_properties", "check_limits", "check_mollify_convergence",
    "check_monotonicity", "check_prekopa_marginal", "check_subadditivity",
    "VerificationReport", "run_suite", "Smooth2DFn", "quadratic_exponential_2d",
    "random_quadratic_exponential", "smooth2d_from_spec", "smoothed_box",
]
