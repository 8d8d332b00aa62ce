"""Two-weight classes for fractional-type commutators: classifier, membership tests, operators and norms."""

__version__ = "0.1.0"

from . import geometry, norms, operators, params, weights  # noqa: E402

__all__ = ["__version__", "geometry", "norms", "operators", "params", "weights"]
