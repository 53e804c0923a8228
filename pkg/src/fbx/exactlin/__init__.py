"""Exact arithmetic over Q: polynomials, regular functions on X, truncated
Laurent series and linear algebra."""

from fractions import Fraction as Rat

from .expr import ExpressionError, parse_regfun
from .laurent import INF, PrecisionError, TruncLaurent
from .matrix import Echelon, MatrixQ, SparseEchelon, mat_cokernel, mat_kernel, mat_rank, mat_solve
from .poly import Poly, as_rat
from .regfun import NotInvertibleError, RegFun, label_derivative, laurent_expand, times_label
from .window import Window

__all__ = [
    "Rat",
    "INF",
    "Echelon",
    "ExpressionError",
    "MatrixQ",
    "NotInvertibleError",
    "Poly",
    "PrecisionError",
    "RegFun",
    "SparseEchelon",
    "TruncLaurent",
    "Window",
    "label_derivative",
    "times_label",
    "as_rat",
    "laurent_expand",
    "mat_cokernel",
    "mat_kernel",
    "mat_rank",
    "mat_solve",
    "parse_regfun",
]
