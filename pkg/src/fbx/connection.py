"""Curves X = P^1 minus D over Q and connections d/dt + A(t) on O_X^r."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .exactlin import INF, MatrixQ, RegFun, Window, as_rat, label_derivative, times_label
from .gmc import DeRhamGMC, GMCError, natural_form_window


class CurveError(ValueError):
    pass


@dataclass(frozen=True)
class CurveSpec:
    """X = Spec Q[t, 1/q] with q = prod (t - c_i); infinity is always removed."""

    finite_points: tuple[Fraction, ...] = ()
    include_infinity: bool = True

    def __post_init__(self):
        pts = tuple(as_rat(c) for c in self.finite_points)
        if len(set(pts)) != len(pts):
            raise CurveError("boundary points must be pairwise distinct")
        if not self.include_infinity:
            raise CurveError("infinity must be a boundary point (X is a subset of A^1)")
        object.__setattr__(self, "finite_points", tuple(sorted(pts)))

    @classmethod
    def affine_line(cls) -> "CurveSpec":
        return cls(())

    @classmethod
    def gm(cls) -> "CurveSpec":
        return cls((Fraction(0),))

    def points(self) -> list["DivisorPoint"]:
        return [DivisorPoint(c) for c in self.finite_points] + [DivisorPoint(INF)]

    def euler_characteristic(self) -> int:
        return 2 - len(self.points())

    def __str__(self) -> str:
        pts = ", ".join(str(c) for c in self.finite_points)
        return f"P1 - {{{pts + ', ' if pts else ''}inf}}"


@dataclass(frozen=True)
class DivisorPoint:
    """A point of D with local parameter s = t - c, or s = 1/t at infinity."""

    location: object

    def __post_init__(self):
        if self.location is not INF:
            object.__setattr__(self, "location", as_rat(self.location))

    @property
    def is_infinity(self) -> bool:
        return self.location is INF

    def __str__(self) -> str:
        return "inf" if self.is_infinity else str(self.location)

    def sort_key(self):
        return (1, 0) if self.is_infinity else (0, self.location)


Matrix = tuple[tuple[RegFun, ...], ...]


@dataclass(frozen=True)
class Connection:
    """nabla(v) = (dv/dt + A v) dt on O_X^rank."""

    curve: CurveSpec
    matrix: Matrix

    def __post_init__(self):
        rows = tuple(tuple(f if isinstance(f, RegFun) else RegFun.constant(f) for f in row) for row in self.matrix)
        r = len(rows)
        if r == 0 or any(len(row) != r for row in rows):
            raise CurveError("connection matrix must be square and nonempty")
        allowed = set(self.curve.finite_points)
        for row in rows:
            for f in row:
                bad = [c for c in f.pole_points() if c not in allowed]
                if bad:
                    raise CurveError(f"entry {f} has poles outside D at {bad}")
        object.__setattr__(self, "matrix", rows)

    @property
    def rank(self) -> int:
        return len(self.matrix)

    @classmethod
    def trivial(cls, curve: CurveSpec, rank: int = 1) -> "Connection":
        return cls(curve, tuple(tuple(RegFun() for _ in range(rank)) for _ in range(rank)))

    @classmethod
    def from_entries(cls, curve: CurveSpec, entries: Sequence[Sequence]) -> "Connection":
        return cls(curve, tuple(tuple(_to_regfun(x) for x in row) for row in entries))

    def entries(self) -> list[RegFun]:
        return [f for row in self.matrix for f in row]

    def is_trivial(self) -> bool:
        return all(f.is_zero() for f in self.entries())

    def pole_order(self, point: DivisorPoint) -> int:
        """Largest pole order of an entry of A at a point, in the coordinate t (0 if none)."""
        loc = point.location
        return max([0] + [f.pole_order_at(loc) for f in self.entries() if not f.is_zero()])

    def apply(self, vec: Sequence[RegFun]) -> tuple[RegFun, ...]:
        """nabla(v) as the coefficient vector of dt."""
        out = []
        for i in range(self.rank):
            acc = vec[i].derivative()
            for k in range(self.rank):
                if not self.matrix[i][k].is_zero():
                    acc = acc + self.matrix[i][k] * vec[k]
            out.append(acc)
        return tuple(out)

    def natural_form_window(self, window: Window) -> Window:
        return natural_form_window(window, (self.matrix,), self.curve.finite_points)


def _to_regfun(x) -> RegFun:
    return x if isinstance(x, RegFun) else RegFun.constant(as_rat(x))


def dual(E: Connection) -> Connection:
    """The dual connection, with matrix -A^T."""
    r = E.rank
    return Connection(E.curve, tuple(tuple(-E.matrix[j][i] for j in range(r)) for i in range(r)))


def tensor(E: Connection, F: Connection) -> Connection:
    """E (x) F with matrix A_E (x) I + I (x) A_F, Kronecker (row-major) basis e_i (x) f_j -> i*r_F + j."""
    if E.curve != F.curve:
        raise CurveError("tensor product of connections on different curves")
    rE, rF = E.rank, F.rank
    n = rE * rF
    rows = []
    for a in range(n):
        i, j = divmod(a, rF)
        row = []
        for b in range(n):
            k, l = divmod(b, rF)
            val = RegFun()
            if j == l:
                val = val + E.matrix[i][k]
            if i == k:
                val = val + F.matrix[j][l]
            row.append(val)
        rows.append(tuple(row))
    return Connection(E.curve, tuple(rows))


def end(E: Connection) -> Connection:
    """End(E) = E^dual (x) E."""
    return tensor(dual(E), E)


def default_window(E: Connection, bound: int = 3) -> Window:
    return Window.uniform(E.curve.finite_points, bound)


def de_rham_gmc(E: Connection, window: Window | int = 3, form_window: Window | None = None) -> DeRhamGMC:
    """Truncated de Rham module of E.

    Weight 0 (degree 0) is spanned by the window basis times e_i, weight 1
    (degree -1) by ``form_window`` times e_i dt, and eps is nabla. If the form
    window is omitted the smallest one containing nabla(window) is used; an
    explicit form window that is too small raises GMCError.
    """
    if isinstance(window, int):
        window = default_window(E, window)
    if form_window is None:
        form_window = E.natural_form_window(window)
    r = E.rank
    fbasis = [(lab, i) for lab in window.labels() for i in range(r)]
    wbasis = [(lab, i) for lab in form_window.labels() for i in range(r)]
    widx = {b: k for k, b in enumerate(wbasis)}
    rows = [[Fraction(0)] * len(fbasis) for _ in range(len(wbasis))]
    for c, (lab, i) in enumerate(fbasis):
        def put(key, x):
            if key not in widx:
                raise GMCError(f"nabla({key[0]} e{key[1]}) leaves the form window; enlarge the window")
            rows[widx[key]][c] += x

        for l2, x in label_derivative(lab).items():
            put((l2, i), x)
        for k in range(r):
            f = E.matrix[k][i]
            if not f.is_zero():
                for l2, x in times_label(f, lab).items():
                    put((l2, k), x)
    eps = MatrixQ(len(wbasis), len(fbasis), rows)
    return DeRhamGMC(
        pieces={(0, 0): len(fbasis), (-1, 1): len(wbasis)},
        eps={(0, 0): eps},
        labels={(0, 0): tuple(fbasis), (-1, 1): tuple(wbasis)},
        rank=r,
        window=window,
        form_window=form_window,
        finite_points=E.curve.finite_points,
    )
