"""Ball bodies K_p(g): gauges, the I_p functional and the quadrature engine."""

from .gauge import (PIndex, StarGauge, ZERO_BAND, ball_gauge, ball_gauge_unified,
                    euclidean_gauge, gaussian_radius, i_p, radial_samples, ray_gauges)
from .quadrature import QuadratureError, QuadratureSpec

__all__ = ["PIndex", "StarGauge", "ZERO_BAND", "ball_gauge", "ball_gauge_unified",
           "euclidean_gauge", "gaussian_radius", "i_p", "radial_samples", "ray_gauges",
           "QuadratureError", "QuadratureSpec"]
