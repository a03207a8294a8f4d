"""Greedy and optimal N-term approximation errors, weighted Lorentz
quasi-norms, and democracy functions for concrete discrete sequence spaces."""

__version__ = "0.1.0"

from .indices import Cube, Pair, Rect, interval
from .lorentz import fundamental_function_check, lorentz_norm, lorentz_norm_dyadic
from .sequences import Sequence, indicator, rearrange
from .spaces import (
    SpaceSpec,
    ambient_norm,
    element_norm,
    parse_space,
    space_norm,
    square_function,
)
from .weights import Weight, classify, geometric_sum_check, lower_dilation_index, parse_weight

__all__ = [
    "Cube",
    "Pair",
    "Rect",
    "Sequence",
    "SpaceSpec",
    "Weight",
    "__version__",
    "ambient_norm",
    "classify",
    "element_norm",
    "fundamental_function_check",
    "geometric_sum_check",
    "indicator",
    "interval",
    "lorentz_norm",
    "lorentz_norm_dyadic",
    "lower_dilation_index",
    "parse_space",
    "parse_weight",
    "rearrange",
    "space_norm",
    "square_function",
]
