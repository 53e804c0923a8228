"""Dense univariate polynomials over Q in the coordinate t."""

from __future__ import annotations

from fractions import Fraction
from math import comb
from typing import Iterable, Sequence

Rat = Fraction


def as_rat(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"cannot interpret {x!r} as a rational number")


def _strip(coeffs: list[Fraction]) -> tuple[Fraction, ...]:
    n = len(coeffs)
    while n and not coeffs[n - 1]:
        n -= 1
    return tuple(coeffs[:n])


class Poly:
    """Immutable polynomial, coefficients stored from degree 0 upward.

    The highest stored coefficient is always nonzero; the zero polynomial
    has no coefficients.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        object.__setattr__(self, "coeffs", _strip([as_rat(c) for c in coeffs]))

    def __setattr__(self, name, value):
        raise AttributeError("Poly is immutable")

    @classmethod
    def constant(cls, c) -> "Poly":
        return cls([c])

    @classmethod
    def t(cls) -> "Poly":
        return cls([0, 1])

    @classmethod
    def linear_root(cls, c) -> "Poly":
        """The monic polynomial t - c."""
        return cls([-as_rat(c), 1])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def lead(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def __getitem__(self, k: int) -> Fraction:
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        return Fraction(0)

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Poly.constant(other)
        return isinstance(other, Poly) and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __repr__(self) -> str:
        return f"Poly({[str(c) for c in self.coeffs]})"

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        terms = []
        for k, c in enumerate(self.coeffs):
            if not c:
                continue
            mono = "" if k == 0 else ("t" if k == 1 else f"t^{k}")
            if mono and c == 1:
                terms.append(mono)
            elif mono and c == -1:
                terms.append("-" + mono)
            elif mono:
                terms.append(f"{_fmt(c)}*{mono}")
            else:
                terms.append(_fmt(c))
        return " + ".join(terms).replace("+ -", "- ")

    def __neg__(self) -> "Poly":
        return Poly([-c for c in self.coeffs])

    def __add__(self, other) -> "Poly":
        other = _coerce(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return Poly([self[k] + other[k] for k in range(n)])

    __radd__ = __add__

    def __sub__(self, other) -> "Poly":
        return self + (-_coerce(other))

    def __rsub__(self, other) -> "Poly":
        return _coerce(other) - self

    def __mul__(self, other) -> "Poly":
        other = _coerce(other)
        if not self.coeffs or not other.coeffs:
            return Poly()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if not a:
                continue
            for j, b in enumerate(other.coeffs):
                if b:
                    out[i + j] += a * b
        return Poly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "Poly":
        if n < 0:
            raise ValueError("negative power of a polynomial")
        result, base = Poly([1]), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def scale(self, c) -> "Poly":
        c = as_rat(c)
        return Poly([c * a for a in self.coeffs])

    def divmod(self, other: "Poly") -> tuple["Poly", "Poly"]:
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dq = other.degree
        lead = other.lead()
        if len(rem) - 1 < dq:
            return Poly(), self
        quot = [Fraction(0)] * (len(rem) - dq)
        for k in range(len(rem) - 1, dq - 1, -1):
            c = rem[k]
            if not c:
                continue
            q = c / lead
            quot[k - dq] = q
            for j, b in enumerate(other.coeffs):
                rem[k - dq + j] -= q * b
        return Poly(quot), Poly(rem[:dq])

    def __call__(self, x):
        acc = Fraction(0) if isinstance(x, (int, Fraction)) else 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def derivative(self) -> "Poly":
        return Poly([k * c for k, c in enumerate(self.coeffs)][1:])

    def taylor_shift(self, c) -> "Poly":
        """Coefficients of p(c + s) as a polynomial in s."""
        c = as_rat(c)
        n = len(self.coeffs)
        out = [Fraction(0)] * n
        for k, a in enumerate(self.coeffs):
            if not a:
                continue
            cp = Fraction(1)
            for i in range(k, -1, -1):
                # term a * C(k, i) * c^(k - i) * s^i
                out[i] += a * comb(k, i) * cp
                cp *= c
        return Poly(out)

    def reversed_coeffs(self) -> tuple[Fraction, ...]:
        return tuple(reversed(self.coeffs))

    def root_multiplicity(self, c) -> int:
        """Multiplicity of c as a root (0 if not a root, -1 for the zero poly)."""
        if self.is_zero():
            return -1
        shifted = self.taylor_shift(c).coeffs
        m = 0
        while not shifted[m]:
            m += 1
        return m


def _coerce(x) -> Poly:
    return x if isinstance(x, Poly) else Poly.constant(x)


def _fmt(c: Fraction) -> str:
    return str(c) if c.denominator == 1 else f"({c})"


def series_inverse_power(a: Fraction, m: int, n: int) -> list[Fraction]:
    """First n coefficients of (1 - a*s)^(-m)."""
    out = []
    ak = Fraction(1)
    for k in range(n):
        out.append(comb(m + k - 1, k) * ak)
        ak *= a
    return out


def series_mul(x: Sequence[Fraction], y: Sequence[Fraction], n: int) -> list[Fraction]:
    """Product of two power series truncated to n coefficients."""
    out = [Fraction(0)] * n
    for i, a in enumerate(x[:n]):
        if not a:
            continue
        for j in range(min(len(y), n - i)):
            b = y[j]
            if b:
                out[i + j] += a * b
    return out
