"""Truncated Laurent series in a local parameter s."""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping

from .poly import as_rat


class PrecisionError(ValueError):
    """A coefficient was requested beyond the known precision."""


class _Infinity:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "INF"

    def __str__(self) -> str:
        return "inf"

    def __reduce__(self):
        return (_Infinity, ())


INF = _Infinity()


class TruncLaurent:
    """A Laurent series known modulo s^(prec+1).

    ``prec=None`` marks an exact Laurent polynomial. Coefficients are stored
    from the valuation upward; the leading stored coefficient is nonzero.
    """

    __slots__ = ("start", "coeffs", "prec")

    def __init__(self, start: int, coeffs: Iterable = (), prec: int | None = None):
        cs = [as_rat(c) for c in coeffs]
        if prec is not None:
            cs = cs[: max(0, prec - start + 1)]
        i = 0
        while i < len(cs) and not cs[i]:
            i += 1
        cs = cs[i:]
        start += i
        if prec is None:
            while cs and not cs[-1]:
                cs.pop()
        if not cs:
            start = 0 if prec is None else prec + 1
        object.__setattr__(self, "start", start)
        object.__setattr__(self, "coeffs", tuple(cs))
        object.__setattr__(self, "prec", prec)

    def __setattr__(self, name, value):
        raise AttributeError("TruncLaurent is immutable")

    @classmethod
    def from_dict(cls, terms: Mapping[int, Fraction], prec: int | None = None) -> "TruncLaurent":
        terms = {e: c for e, c in terms.items() if c and (prec is None or e <= prec)}
        if not terms:
            return cls(0, (), prec)
        lo, hi = min(terms), max(terms)
        if prec is not None:
            hi = prec
        return cls(lo, [terms.get(e, 0) for e in range(lo, hi + 1)], prec)

    @classmethod
    def monomial(cls, e: int, c=1, prec: int | None = None) -> "TruncLaurent":
        return cls(e, [c], prec)

    @classmethod
    def zero(cls, prec: int | None = None) -> "TruncLaurent":
        return cls(0, (), prec)

    @property
    def valuation(self) -> int | None:
        """Exponent of the first nonzero coefficient, None for (known) zero."""
        return self.start if self.coeffs else None

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_exact(self) -> bool:
        return self.prec is None

    def _lowest(self) -> int:
        # lower bound on the true valuation, usable in precision arithmetic
        if self.coeffs:
            return self.start
        return self.prec + 1 if self.prec is not None else 10**9

    def coeff(self, e: int) -> Fraction:
        if self.prec is not None and e > self.prec:
            raise PrecisionError(f"coefficient of s^{e} unknown (precision {self.prec})")
        k = e - self.start
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        return Fraction(0)

    def terms(self) -> dict[int, Fraction]:
        return {self.start + k: c for k, c in enumerate(self.coeffs) if c}

    def truncate(self, prec: int) -> "TruncLaurent":
        if self.prec is not None and prec > self.prec:
            raise PrecisionError(f"cannot raise precision {self.prec} to {prec}")
        return TruncLaurent(self.start, self.coeffs, prec)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, TruncLaurent)
            and self.prec == other.prec
            and self.terms() == other.terms()
        )

    def __hash__(self) -> int:
        return hash((tuple(sorted(self.terms().items())), self.prec))

    def agrees_with(self, other: "TruncLaurent", upto: int | None = None) -> bool:
        """Equality of coefficients up to the common known precision."""
        bound = _min_prec(self.prec, other.prec)
        if upto is not None:
            bound = upto if bound is None else min(bound, upto)
        a, b = self.terms(), other.terms()
        for e in set(a) | set(b):
            if bound is None or e <= bound:
                if a.get(e, 0) != b.get(e, 0):
                    return False
        return True

    def __repr__(self) -> str:
        body = " + ".join(f"{c}*s^{e}" for e, c in sorted(self.terms().items())) or "0"
        tail = "" if self.prec is None else f" + O(s^{self.prec + 1})"
        return f"TruncLaurent({body}{tail})"

    def __neg__(self) -> "TruncLaurent":
        return TruncLaurent(self.start, [-c for c in self.coeffs], self.prec)

    def __add__(self, other) -> "TruncLaurent":
        if not isinstance(other, TruncLaurent):
            other = TruncLaurent(0, [as_rat(other)])
        prec = _min_prec(self.prec, other.prec)
        terms = self.terms()
        for e, c in other.terms().items():
            terms[e] = terms.get(e, 0) + c
        return TruncLaurent.from_dict(terms, prec)

    __radd__ = __add__

    def __sub__(self, other) -> "TruncLaurent":
        return self + (-other if isinstance(other, TruncLaurent) else -as_rat(other))

    def __rsub__(self, other) -> "TruncLaurent":
        return (-self) + other

    def __mul__(self, other) -> "TruncLaurent":
        if not isinstance(other, TruncLaurent):
            c = as_rat(other)
            return TruncLaurent(self.start, [c * a for a in self.coeffs], self.prec)
        # a known mod s^(pa+1), b mod s^(pb+1): product known mod s^(min(pa+vb, pb+va)+1)
        cands = []
        if self.prec is not None:
            cands.append(self.prec + other._lowest())
        if other.prec is not None:
            cands.append(other.prec + self._lowest())
        prec = min(cands) if cands else None
        if not self.coeffs or not other.coeffs:
            return TruncLaurent.zero(prec)
        start = self.start + other.start
        n = len(self.coeffs) + len(other.coeffs) - 1
        if prec is not None:
            n = min(n, prec - start + 1)
        if n <= 0:
            return TruncLaurent.zero(prec)
        out = [Fraction(0)] * n
        bc = other.coeffs
        for i, a in enumerate(self.coeffs[:n]):
            if not a:
                continue
            for j in range(min(len(bc), n - i)):
                b = bc[j]
                if b:
                    out[i + j] += a * b
        return TruncLaurent(start, out, prec)

    __rmul__ = __mul__

    def shift(self, k: int) -> "TruncLaurent":
        """Multiply by s^k."""
        return TruncLaurent(
            self.start + k, self.coeffs, None if self.prec is None else self.prec + k
        )

    def derivative(self) -> "TruncLaurent":
        """d/ds; precision drops by one."""
        terms = {e - 1: e * c for e, c in self.terms().items() if e}
        return TruncLaurent.from_dict(terms, None if self.prec is None else self.prec - 1)

    def residue(self) -> Fraction:
        """Coefficient of s^-1."""
        return self.coeff(-1)


def _min_prec(a: int | None, b: int | None) -> int | None:
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)
