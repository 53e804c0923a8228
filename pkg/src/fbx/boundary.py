"""The formal boundary: connections over Q((s)) at each point of D.

All local linear algebra is done for the operator L = Den(s) * nabla, where
Den(s) = s^q * Q(s) is the common denominator of the local matrix B(s) and
Q(0) != 0. Since Den is s^q times a unit of Q[[s]], L has the same kernel as
nabla and multiplication by Den identifies their cokernels, but L has
polynomial coefficients, so the truncated systems are banded.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Mapping, Sequence

from .connection import Connection, DivisorPoint
from .exactlin import (
    INF,
    Echelon,
    MatrixQ,
    Poly,
    PrecisionError,
    RegFun,
    SparseEchelon,
    TruncLaurent,
    as_rat,
    laurent_expand,
)

DEFAULT_CAP = 4096
IRREGULAR_SLACK = 16


class BoundaryError(ValueError):
    pass


class StabilizationError(RuntimeError):
    """Local or global cohomology did not stabilize below the truncation cap."""

    def __init__(self, message: str, diagnostics: Mapping):
        super().__init__(f"{message}; diagnostics: {dict(diagnostics)}")
        self.diagnostics = dict(diagnostics)


# ---------------------------------------------------------------------------
# coordinate change


def to_local_parameter(f: RegFun, point) -> RegFun:
    """f rewritten as a rational function of the local parameter s at ``point``.

    At a finite c this is f(c + s); at INF it is f(1/s). No differential is
    attached (see :func:`restrict` for the chain rule).
    """
    if point is INF:
        if f.is_zero():
            return RegFun()
        d = f.num.degree
        total = sum(m for _, m in f.poles)
        # f(1/s) = s^(total - d) rev(num)(s) prod (1 - c s)^(-m)
        num = Poly(f.num.reversed_coeffs())
        poles = [(0, d - total)]
        for c, m in f.poles:
            if c:
                # (1 - c s)^(-m) = (-c)^(-m) (s - 1/c)^(-m)
                num = num.scale((-c) ** (-m))
                poles.append((1 / c, m))
        return RegFun(num, poles)
    c = as_rat(point)
    return RegFun(f.num.taylor_shift(c), [(cc - c, m) for cc, m in f.poles])


@lru_cache(maxsize=4096)
def _expand_matrix(source: tuple, order: int) -> tuple:
    return tuple(tuple(laurent_expand(f, 0, order) for f in row) for row in source)


@dataclass(frozen=True)
class LocalConnection:
    """nabla = d/ds + B(s) on Q((s))^r, with B stored exactly as rational functions of s."""

    point: DivisorPoint
    source: tuple[tuple[RegFun, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(f if isinstance(f, RegFun) else RegFun.constant(f) for f in row) for row in self.source)
        if not rows or any(len(row) != len(rows) for row in rows):
            raise BoundaryError("local connection matrix must be square and nonempty")
        object.__setattr__(self, "source", rows)

    @classmethod
    def from_matrix(cls, entries: Sequence[Sequence], point: DivisorPoint | None = None) -> "LocalConnection":
        """Local connection with B given directly as functions of s (expanded at s = 0)."""
        return cls(point or DivisorPoint(0), tuple(tuple(entries_row) for entries_row in entries))

    @property
    def rank(self) -> int:
        return len(self.source)

    def matrix_expansion(self, order: int) -> tuple[tuple[TruncLaurent, ...], ...]:
        """B(s) through s^order."""
        return _expand_matrix(self.source, order)

    @property
    def pole_order(self) -> int:
        return max([0] + [f.pole_order_at(0) for row in self.source for f in row if not f.is_zero()])

    @property
    def q1(self) -> int:
        return max(1, self.pole_order)

    def leading_matrix(self) -> MatrixQ:
        """Coefficient of s^(-q) in B, with q = max(1, pole order)."""
        q = self.q1
        exp = self.matrix_expansion(-q)
        return MatrixQ(self.rank, self.rank, [[x.coeff(-q) for x in row] for row in exp])

    @property
    def indicial_bound(self) -> int:
        """N_int: how far exponents of solutions may sit below the naive window."""
        return _indicial_bound(self.source)

    def v_min(self) -> int:
        return -(self.pole_order + 1) * self.rank - self.indicial_bound

    def operator(self) -> "_LocalOperator":
        return _local_operator(self.source)

    def apply(self, vec: Sequence[TruncLaurent]) -> tuple[TruncLaurent, ...]:
        """nabla(v) as the ds-coefficient vector, with honest precision."""
        vals = [v.valuation for v in vec if v.valuation is not None]
        lo = min(vals) if vals else 0
        top = max((v.prec for v in vec if v.prec is not None), default=lo + 8)
        order = top - lo + 1
        B = self.matrix_expansion(order)
        out = []
        for i in range(self.rank):
            acc = vec[i].derivative()
            for k in range(self.rank):
                acc = acc + B[i][k] * vec[k]
            out.append(acc)
        return tuple(out)


@lru_cache(maxsize=1024)
def _indicial_bound(source: tuple) -> int:
    L = LocalConnection(DivisorPoint(0), source)
    r, q = L.rank, L.pole_order
    if q >= 2:
        lead = L.leading_matrix()
        return 0 if lead.rank() == r else IRREGULAR_SLACK
    B1 = L.leading_matrix() if q == 1 else MatrixQ.zeros(r, r)
    bound = max([sum(abs(x) for x in row) for row in B1.entries] + [0])
    best = 0
    for j in range(-math.ceil(bound), math.ceil(bound) + 1):
        shifted = MatrixQ(r, r, [[B1[a, b] + (j if a == b else 0) for b in range(r)] for a in range(r)])
        if shifted.rank() < r:
            best = max(best, abs(j))
    return best


class _LocalOperator:
    """L = Den d/ds + P with Den = s^q Q(s) polynomial and P a polynomial matrix."""

    def __init__(self, source: tuple):
        den: dict[Fraction, int] = {}
        for row in source:
            for f in row:
                for c, m in f.poles:
                    den[c] = max(den.get(c, 0), m)
        D = Poly.constant(1)
        for c, m in sorted(den.items()):
            D = D * Poly.linear_root(c) ** m
        self.den = D
        self.q = den.get(Fraction(0), 0)
        self.r = len(source)
        self.P = []
        for row in source:
            prow = []
            for f in row:
                g = f * RegFun(D)
                assert not g.poles
                prow.append(g.num)
            self.P.append(prow)

    def column(self, j: int, i: int, top: int | None = None) -> dict:
        """L(s^j e_i) as {(exponent, component): coefficient}, dropping exponents above top."""
        out: dict = {}
        if j:
            for m, d in enumerate(self.den.coeffs):
                if d:
                    out[(j - 1 + m, i)] = out.get((j - 1 + m, i), 0) + j * d
        for k in range(self.r):
            for m, p in enumerate(self.P[k][i].coeffs):
                if p:
                    out[(j + m, k)] = out.get((j + m, k), 0) + p
        return {key: c for key, c in out.items() if c and (top is None or key[0] <= top)}

    def times_den(self, vec: Sequence[TruncLaurent], top: int) -> dict:
        """Den * g as sparse coordinates through exponent top."""
        out: dict = {}
        for i, g in enumerate(vec):
            for e, c in g.terms().items():
                for m, d in enumerate(self.den.coeffs):
                    if d and e + m <= top:
                        out[(e + m, i)] = out.get((e + m, i), 0) + c * d
        return {k: c for k, c in out.items() if c}


@lru_cache(maxsize=1024)
def _local_operator(source: tuple) -> _LocalOperator:
    return _LocalOperator(source)


def restrict(E: Connection, p: DivisorPoint) -> LocalConnection:
    """The local connection at p, in the local parameter s."""
    if not isinstance(p, DivisorPoint):
        p = DivisorPoint(p)
    if p not in E.curve.points():
        raise BoundaryError(f"{p} is not a boundary point of {E.curve}")
    if p.is_infinity:
        minus_s2 = RegFun(Poly.constant(-1), [(0, 2)])
        src = tuple(tuple(to_local_parameter(f, INF) * minus_s2 for f in row) for row in E.matrix)
    else:
        src = tuple(tuple(to_local_parameter(f, p.location) for f in row) for row in E.matrix)
    return LocalConnection(p, src)


def restrict_function(f: RegFun, p: DivisorPoint, order: int) -> TruncLaurent:
    """Expansion of a function in the local parameter at p."""
    return laurent_expand(f, p.location, order)


def restrict_form(f: RegFun, p: DivisorPoint, order: int) -> TruncLaurent:
    """The ds-coefficient of f dt at p through s^order (dt = -s^-2 ds at infinity)."""
    if not p.is_infinity:
        return laurent_expand(f, p.location, order)
    return -laurent_expand(f, INF, order + 2).shift(-2)


# ---------------------------------------------------------------------------
# local H^0


def _vector(coords: Mapping, r: int, prec: int | None) -> tuple[TruncLaurent, ...]:
    return tuple(
        TruncLaurent.from_dict({e: c for (e, i), c in coords.items() if i == k}, prec) for k in range(r)
    )


@dataclass(frozen=True)
class LocalH0:
    basis: tuple[tuple[TruncLaurent, ...], ...]
    truncation: int
    valid_to: int

    @property
    def dim(self) -> int:
        return len(self.basis)

    def min_valuation(self) -> int | None:
        vals = [v.valuation for vec in self.basis for v in vec if v.valuation is not None]
        return min(vals) if vals else None


def _h0_low(L: LocalConnection, N: int, n0: int) -> int:
    # the search window grows with the doubling loop
    return L.v_min() - max(0, N // max(n0, 1) - 1)


def initial_truncation(L: LocalConnection) -> int:
    return 2 * L.rank * (L.pole_order + 2) + 8


def local_h0(L: LocalConnection, N: int) -> LocalH0:
    """Horizontal sections, as truncated series, from the kernel of the truncated recursion."""
    op = L.operator()
    r, q1 = L.rank, L.q1
    margin = 2 * r * q1 + 2
    a = _h0_low(L, N, initial_truncation(L))
    U = max(N, a + 2 * margin + 2)
    ech = SparseEchelon(priority=lambda k: k)
    relations = []
    for j in range(a, U + 1):
        for i in range(r):
            rel = ech.add(op.column(j, i, top=U - 1), {(j, i): Fraction(1)})
            if rel is not None:
                relations.append(rel)
    valid = U - margin
    basis_ech = Echelon(priority=lambda k: k)
    for rel in relations:
        basis_ech.add({k: c for k, c in rel.items() if k[0] <= valid})
    basis = tuple(_vector(basis_ech.rows[p], r, valid) for p in basis_ech.pivots())
    return LocalH0(basis, N, valid)


# ---------------------------------------------------------------------------
# local H^1


def _rep_order(lo: int, hi: int) -> list[int]:
    """Exponents in [lo, hi] ordered -1, -2, 0, -3, 1, ..."""
    return sorted(range(lo, hi + 1), key=lambda e: (abs(e + 1), e))


class LocalH1:
    """Cokernel of nabla on forms with valuation >= -M, modulo forms above s^top."""

    def __init__(self, L: LocalConnection, N: int):
        self.L = L
        op = L.operator()
        self.op = op
        r, q = L.rank, op.q
        self.M = N
        self.top = N
        self.truncation = N
        low_cut = -self.M + q
        top_L = self.top + q
        self._top_L = top_L
        slack = (L.pole_order + 1) * r + L.indicial_bound
        a = -self.M - slack
        U = top_L + 1

        def prio(key):
            return (0 if key[0] < low_cut else 1, key[0], key[1])

        ech = SparseEchelon(priority=prio)
        for j in range(a, U + 1):
            for i in range(r):
                ech.add(op.column(j, i, top=top_L), {(j, i): Fraction(1)})
        mid_total = (top_L - low_cut + 1) * r
        image_mid = sum(1 for p in ech.rows if p[0] >= low_cut)
        self.dim = mid_total - image_mid
        reps = []
        if self.dim:
            for e in _rep_order(-self.M, self.top):
                for i in range(r):
                    unit = TruncLaurent.monomial(e)
                    vec = tuple(unit if k == i else TruncLaurent.zero() for k in range(r))
                    if ech.add(op.times_den(vec, top_L), {("rep", len(reps)): Fraction(1)}) is None:
                        reps.append(vec)
                    if len(reps) == self.dim:
                        break
                if len(reps) == self.dim:
                    break
        if len(reps) != self.dim:
            raise StabilizationError(
                "could not complete a cokernel basis", {"point": str(L.point), "N": N, "dim": self.dim}
            )
        self.basis = tuple(reps)
        self._ech = ech
        self.primitive_precision = self.top - r * L.q1

    def reduce(self, g: Sequence[TruncLaurent]) -> tuple[tuple[Fraction, ...], tuple[TruncLaurent, ...]]:
        """Coordinates c and primitive v with nabla(v) = g - sum c_k basis_k modulo high order."""
        r = self.L.rank
        if len(g) != r:
            raise BoundaryError("form has the wrong rank")
        for x in g:
            val = x.valuation
            if val is not None and val < -self.M:
                raise PrecisionError(f"form has a pole of order {-val} beyond the window {self.M}")
            if x.prec is not None and x.prec < self.top:
                raise PrecisionError(f"form known only through s^{x.prec}, need s^{self.top}")
        coords = self._ech.express(self.op.times_den(g, self._top_L))
        if coords is None:
            raise StabilizationError("form does not reduce in the truncated cokernel", {"N": self.truncation})
        c = tuple(coords.get(("rep", k), Fraction(0)) for k in range(self.dim))
        prim = {key: x for key, x in coords.items() if key[0] != "rep"}
        return c, _vector(prim, r, self.primitive_precision)


def local_h1(L: LocalConnection, N: int) -> LocalH1:
    return LocalH1(L, N)


# ---------------------------------------------------------------------------
# stabilization


@dataclass(frozen=True)
class LocalCohomology:
    point: DivisorPoint
    h0_basis: tuple
    h1_basis: tuple
    truncation_used: int
    stabilized: bool
    h0: LocalH0 = field(repr=False, compare=False, default=None)
    h1: LocalH1 = field(repr=False, compare=False, default=None)
    history: tuple = ()

    @property
    def dims(self) -> tuple[int, int]:
        return (len(self.h0_basis), len(self.h1_basis))

    def reduce(self, g):
        return self.h1.reduce(g)


def stabilized_cohomology(
    L: LocalConnection, min_truncation: int | None = None, cap: int = DEFAULT_CAP
) -> LocalCohomology:
    """Local H^0 and H^1, doubling the truncation until two rounds agree and the index is zero."""
    N = max(initial_truncation(L), min_truncation or 0)
    history = []
    prev = None
    while N <= cap:
        h0, h1 = local_h0(L, N), local_h1(L, N)
        dims = (h0.dim, h1.dim)
        history.append((N, dims))
        if prev is not None and prev == dims and dims[0] == dims[1]:
            return LocalCohomology(L.point, h0.basis, h1.basis, N, True, h0, h1, tuple(history))
        prev = dims
        N *= 2
    raise StabilizationError(
        f"local cohomology at {L.point} did not stabilize below N = {cap}",
        {"point": str(L.point), "last_rounds": history[-2:], "pole_order": L.pole_order},
    )


# ---------------------------------------------------------------------------
# residues


def residue(form, trace: bool = False) -> Fraction:
    """Coefficient of s^-1 ds; with trace=True, ``form`` is a square matrix of series and is traced first."""
    if trace:
        return sum((residue(form[i][i]) for i in range(len(form))), Fraction(0))
    if not isinstance(form, TruncLaurent):
        raise BoundaryError("residue expects a series, or a matrix with trace=True")
    if form.prec is not None and form.prec < -1:
        raise PrecisionError("precision window excludes the s^-1 coefficient")
    return form.coeff(-1)


def residue_pairing(a: Sequence[TruncLaurent], b: Sequence[TruncLaurent]) -> Fraction:
    """res(a^T b) for a function vector and a form vector (or vice versa)."""
    total = Fraction(0)
    for x, y in zip(a, b):
        total += residue(x * y)
    return total
