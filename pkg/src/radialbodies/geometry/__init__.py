"""Convex bodies, covariograms and the limit bodies DK and polar projection."""

from .bodies import (ConvexBody, GeometryError, HalfSpace, MCEstimate, acceptance_rate,
                     ball, ball_volume, body_from_spec, box, halfspace_polytope, interval,
                     minkowski_functional, polar_projection_gauge, polytope,
                     projection_volume, projection_volume_cauchy, random_polygon,
                     sample_point, sample_points, support_function, volume)
from .covariogram import (CovariogramRays, covariogram, difference_body,
                          difference_body_gauge, multi_covariogram)
from .directions import DirectionGrid, random_directions

__all__ = [
    "ConvexBody", "GeometryError", "HalfSpace", "MCEstimate", "acceptance_rate", "ball",
    "ball_volume", "body_from_spec", "box", "halfspace_polytope", "interval",
    "minkowski_functional", "polar_projection_gauge", "polytope", "projection_volume",
    "projection_volume_cauchy", "random_polygon", "sample_point", "sample_points",
    "support_function", "volume", "CovariogramRays", "covariogram", "difference_body",
    "difference_body_gauge", "multi_covariogram", "DirectionGrid", "random_directions",
]
