"""Parser for rational-function expressions in t.

Grammar: integers, rationals ``p/q``, the symbol ``t``, ``+ - * /``, integer
powers ``^n`` and parentheses. The text is rewritten to Python syntax and
walked with :mod:`ast`; nothing is evaluated by Python itself.
"""

from __future__ import annotations

import ast
import re
from fractions import Fraction
from typing import Iterable

from .regfun import NotInvertibleError, RegFun


class ExpressionError(ValueError):
    """Malformed expression, or a function that is not regular on X."""


_ALLOWED_CHARS = re.compile(r"^[0-9t+\-*/^()\s]*$")


def parse_regfun(text: str, finite_points: Iterable = ()) -> RegFun:
    """Parse ``text`` into a function regular on P^1 minus (finite_points and inf)."""
    pts = tuple(Fraction(p) for p in finite_points)
    if not isinstance(text, str) or not text.strip():
        raise ExpressionError("empty expression")
    if not _ALLOWED_CHARS.match(text):
        raise ExpressionError(f"unexpected characters in {text!r}")
    if "**" in text:
        raise ExpressionError("use '^' for powers")
    try:
        tree = ast.parse(text.strip().replace("^", "**"), mode="eval")
    except SyntaxError as exc:
        raise ExpressionError(f"cannot parse {text!r}: {exc.msg}") from None
    return _eval(tree.body, pts, text)


def _eval(node: ast.AST, pts: tuple, text: str) -> RegFun:
    if isinstance(node, ast.Constant) and isinstance(node.value, int) and not isinstance(node.value, bool):
        return RegFun.constant(node.value)
    if isinstance(node, ast.Name) and node.id == "t":
        return RegFun.t()
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        val = _eval(node.operand, pts, text)
        return -val if isinstance(node.op, ast.USub) else val
    if isinstance(node, ast.BinOp):
        if isinstance(node.op, ast.Pow):
            exp = _int_exponent(node.right, text)
            base = _eval(node.left, pts, text)
            if exp >= 0:
                return base ** exp
            return _invert(base, pts, text) ** (-exp)
        left = _eval(node.left, pts, text)
        right = _eval(node.right, pts, text)
        if isinstance(node.op, ast.Add):
            return left + right
        if isinstance(node.op, ast.Sub):
            return left - right
        if isinstance(node.op, ast.Mult):
            return left * right
        if isinstance(node.op, ast.Div):
            return left * _invert(right, pts, text)
    raise ExpressionError(f"unsupported construct in {text!r}")


def _int_exponent(node: ast.AST, text: str) -> int:
    sign = 1
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        sign = -1 if isinstance(node.op, ast.USub) else 1
        node = node.operand
    if isinstance(node, ast.Constant) and isinstance(node.value, int):
        return sign * node.value
    raise ExpressionError(f"exponents must be integer literals in {text!r}")


def _invert(f: RegFun, pts: tuple, text: str) -> RegFun:
    if f.is_zero():
        raise ExpressionError(f"division by zero in {text!r}")
    try:
        return f.inverse(pts)
    except NotInvertibleError:
        raise ExpressionError(
            f"denominator in {text!r} vanishes outside the declared boundary points"
        ) from None
