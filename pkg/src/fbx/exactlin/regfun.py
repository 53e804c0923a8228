"""Rational functions in t whose poles lie among finitely many rational points."""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping

from .laurent import INF, TruncLaurent
from .poly import Poly, as_rat, series_inverse_power, series_mul

# Partial-fraction basis labels: ("t", k) is t^k (k >= 0), ("p", c, j) is (t - c)^(-j) (j >= 1).
Label = tuple


class NotInvertibleError(ValueError):
    """Division by a function that vanishes somewhere on X."""


class RegFun:
    """A rational function num(t) / prod (t - c)^m, kept in lowest terms.

    ``poles`` is a sorted tuple of (c, m) with m > 0 and num(c) != 0.
    """

    __slots__ = ("num", "poles")

    def __init__(self, num: Poly | Iterable = (), poles: Iterable[tuple] = ()):
        if not isinstance(num, Poly):
            num = Poly(num)
        acc: dict[Fraction, int] = {}
        for c, m in poles:
            c = as_rat(c)
            acc[c] = acc.get(c, 0) + int(m)
        reduced = []
        for c in sorted(acc):
            m = acc[c]
            if m < 0:
                num = num * Poly.linear_root(c) ** (-m)
                continue
            if m and not num.is_zero():
                k = min(num.root_multiplicity(c), m)
                if k:
                    num, rem = num.divmod(Poly.linear_root(c) ** k)
                    assert rem.is_zero()
                    m -= k
            if m and not num.is_zero():
                reduced.append((c, m))
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "poles", tuple(reduced))

    def __setattr__(self, name, value):
        raise AttributeError("RegFun is immutable")

    @classmethod
    def constant(cls, c) -> "RegFun":
        return cls(Poly.constant(c))

    @classmethod
    def t(cls) -> "RegFun":
        return cls(Poly.t())

    @classmethod
    def pole(cls, c, j: int = 1) -> "RegFun":
        """(t - c)^(-j)."""
        return cls(Poly.constant(1), [(c, j)])

    @classmethod
    def from_label(cls, label: Label) -> "RegFun":
        if label[0] == "t":
            return cls(Poly([0] * label[1] + [1]))
        return cls.pole(label[1], label[2])

    @classmethod
    def from_partial_fractions(cls, coords: Mapping[Label, Fraction]) -> "RegFun":
        out = RegFun()
        for label, c in coords.items():
            if c:
                out = out + cls.from_label(label) * c
        return out

    @property
    def denominator(self) -> Poly:
        den = Poly.constant(1)
        for c, m in self.poles:
            den = den * Poly.linear_root(c) ** m
        return den

    @property
    def numerator(self) -> Poly:
        return self.num

    def pole_points(self) -> tuple[Fraction, ...]:
        return tuple(c for c, _ in self.poles)

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_constant(self) -> bool:
        return not self.poles and self.num.degree <= 0

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = RegFun.constant(other)
        return isinstance(other, RegFun) and self.num == other.num and self.poles == other.poles

    def __hash__(self) -> int:
        return hash((self.num, self.poles))

    def __repr__(self) -> str:
        return f"RegFun({self})"

    def __str__(self) -> str:
        if not self.poles:
            return str(self.num)
        den = " * ".join(
            f"(t - {c})" + (f"^{m}" if m > 1 else "") if c else ("t" + (f"^{m}" if m > 1 else ""))
            for c, m in self.poles
        )
        return f"({self.num}) / ({den})"

    def __neg__(self) -> "RegFun":
        return RegFun(-self.num, self.poles)

    def __add__(self, other) -> "RegFun":
        other = _coerce(other)
        ma, mb = dict(self.poles), dict(other.poles)
        pts = set(ma) | set(mb)
        na, nb = self.num, other.num
        for c in pts:
            top = max(ma.get(c, 0), mb.get(c, 0))
            if top > ma.get(c, 0):
                na = na * Poly.linear_root(c) ** (top - ma.get(c, 0))
            if top > mb.get(c, 0):
                nb = nb * Poly.linear_root(c) ** (top - mb.get(c, 0))
        return RegFun(na + nb, [(c, max(ma.get(c, 0), mb.get(c, 0))) for c in pts])

    __radd__ = __add__

    def __sub__(self, other) -> "RegFun":
        return self + (-_coerce(other))

    def __rsub__(self, other) -> "RegFun":
        return _coerce(other) - self

    def __mul__(self, other) -> "RegFun":
        other = _coerce(other)
        return RegFun(self.num * other.num, self.poles + other.poles)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "RegFun":
        if n < 0:
            return self.inverse() ** (-n)
        out = RegFun.constant(1)
        for _ in range(n):
            out = out * self
        return out

    def inverse(self, allowed_points: Iterable | None = None) -> "RegFun":
        """Multiplicative inverse, which must again be regular on X.

        The numerator has to factor as a constant times linear factors at
        ``allowed_points`` (defaults to no points: only constants and pure
        pole factors are units then).
        """
        if self.is_zero():
            raise ZeroDivisionError("inverse of the zero function")
        num = self.num
        new_poles = [(c, -m) for c, m in self.poles]
        for c in allowed_points or ():
            c = as_rat(c)
            k = num.root_multiplicity(c)
            if k > 0:
                num, _ = num.divmod(Poly.linear_root(c) ** k)
                new_poles.append((c, k))
        if num.degree > 0:
            raise NotInvertibleError(
                f"{self} vanishes at a point outside the declared boundary points"
            )
        return RegFun(Poly.constant(1 / num.lead()), new_poles)

    def divide(self, other, allowed_points: Iterable | None = None) -> "RegFun":
        other = _coerce(other)
        return self * other.inverse(allowed_points)

    def __truediv__(self, other) -> "RegFun":
        if isinstance(other, (int, Fraction)):
            return self * (1 / as_rat(other))
        return self.divide(other, self._all_points(other))

    def __rtruediv__(self, other) -> "RegFun":
        return _coerce(other).divide(self, self.pole_points())

    def _all_points(self, other: "RegFun") -> tuple:
        return tuple(sorted(set(self.pole_points()) | set(other.pole_points())))

    def derivative(self) -> "RegFun":
        if not self.poles:
            return RegFun(self.num.derivative())
        prod_lin = Poly.constant(1)
        for c, _ in self.poles:
            prod_lin = prod_lin * Poly.linear_root(c)
        acc = self.num.derivative() * prod_lin
        for c, m in self.poles:
            others, _ = prod_lin.divmod(Poly.linear_root(c))
            acc = acc - self.num * others * m
        return RegFun(acc, [(c, m + 1) for c, m in self.poles])

    def __call__(self, x):
        x = as_rat(x)
        val = self.num(x)
        for c, m in self.poles:
            if x == c:
                raise ZeroDivisionError(f"pole at t = {c}")
            val /= (x - c) ** m
        return val

    def pole_order_at(self, point) -> int:
        """Order of the pole at a finite point or at INF (negative for zeros)."""
        if point is INF:
            if self.is_zero():
                return -(10**9)
            return self.num.degree - sum(m for _, m in self.poles)
        point = as_rat(point)
        for c, m in self.poles:
            if c == point:
                return m
        return -max(self.num.root_multiplicity(point), 0)

    def valuation_at(self, point) -> int:
        """Valuation in the local parameter (t - c, or 1/t at INF)."""
        return -self.pole_order_at(point)

    def partial_fractions(self) -> dict[Label, Fraction]:
        return dict(_partial_fractions(self))

    def expand(self, point, order: int) -> TruncLaurent:
        return laurent_expand(self, point, order)


def _coerce(x) -> RegFun:
    if isinstance(x, RegFun):
        return x
    if isinstance(x, Poly):
        return RegFun(x)
    return RegFun.constant(as_rat(x))


def laurent_expand(f: RegFun, point, order: int) -> TruncLaurent:
    """Expansion of f in s = t - c (or s = 1/t at INF) through s^order."""
    if not isinstance(f, RegFun):
        f = _coerce(f)
    if f.is_zero():
        return TruncLaurent.zero(order)
    if point is INF:
        # f(1/s) = s^(M - d) * rev(num)(s) * prod (1 - c s)^(-m)
        d = f.num.degree
        total = sum(m for _, m in f.poles)
        val = total - d
        n = order - val + 1
        if n <= 0:
            return TruncLaurent.zero(order)
        series = list(f.num.reversed_coeffs()[:n])
        for c, m in f.poles:
            series = series_mul(series, series_inverse_power(c, m, n), n)
        return TruncLaurent(val, series, order)
    c = as_rat(point)
    m0 = 0
    for cc, m in f.poles:
        if cc == c:
            m0 = m
    shifted = f.num.taylor_shift(c).coeffs
    n = order + m0 + 1
    if n <= 0:
        return TruncLaurent.zero(order)
    series = list(shifted[:n])
    for cc, m in f.poles:
        if cc == c:
            continue
        # (s + (c - cc))^(-m) = (c - cc)^(-m) * (1 - s / (cc - c))^(-m)
        delta = c - cc
        factor = series_inverse_power(-1 / delta, m, n)
        scale = delta ** (-m)
        series = series_mul(series, [scale * x for x in factor], n)
    return TruncLaurent(-m0, series, order)


@lru_cache(maxsize=200_000)
def _partial_fractions(f: RegFun) -> tuple:
    out: list[tuple[Label, Fraction]] = []
    total = sum(m for _, m in f.poles)
    if f.num.degree >= total:
        # polynomial part = principal part at infinity, where t^k = s^-k
        at_inf = laurent_expand(f, INF, 0)
        for k in range(f.num.degree - total + 1):
            c = at_inf.coeff(-k)
            if c:
                out.append((("t", k), c))
    for c, m in f.poles:
        principal = laurent_expand(f, c, -1)
        for j in range(1, m + 1):
            coef = principal.coeff(-j)
            if coef:
                out.append((("p", c, j), coef))
    return tuple(out)


def label_point(label: Label):
    return INF if label[0] == "t" else label[1]


def label_order(label: Label) -> int:
    """Pole order contributed by a basis label at its own point."""
    return label[1] if label[0] == "t" else label[2]


@lru_cache(maxsize=500_000)
def _times_label(f: RegFun, label: Label) -> tuple:
    return _partial_fractions(f * RegFun.from_label(label))


def times_label(f: RegFun, label: Label) -> dict[Label, Fraction]:
    """Partial-fraction coordinates of f times the basis element ``label``."""
    return dict(_times_label(f, label))


@lru_cache(maxsize=100_000)
def _label_derivative(label: Label) -> tuple:
    return _partial_fractions(RegFun.from_label(label).derivative())


def label_derivative(label: Label) -> dict[Label, Fraction]:
    return dict(_label_derivative(label))
