"""Ball bodies of log-concave functions and radial mean bodies of convex bodies."""

__version__ = "0.1.0"
