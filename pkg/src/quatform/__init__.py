"""Positive-definite quaternary quadratic forms of prime discriminant.

Exact representation numbers and theta decompositions, Siegel local densities,
explicit lower bounds for r_Q(n) and the constants behind them.
"""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    ArgumentError,
    HypothesisError,
    QuatformError,
    ResourceError,
    UnsupportedFormError,
    VerificationError,
)
from .qform import QuadForm, dual, from_gram, jacobi_decompose, level, min_nonzero  # noqa: E402

__all__ = [
    "__version__",
    "ArgumentError",
    "HypothesisError",
    "QuatformError",
    "ResourceError",
    "UnsupportedFormError",
    "VerificationError",
    "QuadForm",
    "dual",
    "from_gram",
    "jacobi_decompose",
    "level",
    "min_nonzero",
]
