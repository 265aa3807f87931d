"""Numerical toolkit for degenerating minitwistor spaces, pluricomplex pencils,
l-hypercomplex limits and monopole spectral curves."""

__version__ = "0.1.0"

from .exceptions import TwistorError  # noqa: E402
from .estimators import LimitExtractor, PointCurveTransformer  # noqa: E402

__all__ = ["TwistorError", "LimitExtractor", "PointCurveTransformer", "__version__"]
