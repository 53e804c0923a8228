"""Global, boundary and compactly supported de Rham cohomology of a connection.

Global computations use the operator L = Den * nabla, where Den is the
common denominator of A. Den is a unit on X, so L has the same kernel as
nabla and multiplication by Den identifies the cokernels; in the
partial-fraction basis L is banded, which keeps elimination cheap.

Compact supports follow the mapping-cone model of the fiber of
H(X, E) -> H(boundary, E): a degree-n cochain is a pair (x, h) with x global
of degree n and h local of degree n - 1, and d(x, h) = (nabla x, R(x) - nabla h).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Mapping, Sequence

from .boundary import (
    DEFAULT_CAP,
    LocalCohomology,
    StabilizationError,
    residue,
    restrict,
    restrict_form,
    restrict_function,
    stabilized_cohomology,
)
from .connection import Connection, CurveSpec, DivisorPoint, dual, end
from .exactlin import (
    INF,
    Echelon,
    MatrixQ,
    Poly,
    PrecisionError,
    RegFun,
    SparseEchelon,
    TruncLaurent,
    Window,
    label_derivative,
    mat_kernel,
    times_label,
)
from .exactlin.regfun import label_order

DEFAULT_WINDOW_CAP = 512


class InvariantError(RuntimeError):
    """A check that must hold mathematically failed; this indicates a defect."""

    def __init__(self, message: str, diagnostics: Mapping | None = None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})


# ---------------------------------------------------------------------------
# the global operator L = Den * nabla


def _label_key(label) -> tuple:
    return (1, 0) if label[0] == "t" else (0, label[1])


def _preference(label) -> tuple:
    """t^0, then (t - c)^-1 for each c, then t^1, (t - c)^-2, ..."""
    if label[0] == "t":
        return (label[1], 0, 0)
    return (label[2] - 1, 1, label[1])


class GlobalOperator:
    def __init__(self, E: Connection):
        self.E = E
        self.r = E.rank
        self.points = E.curve.finite_points
        self.den_orders = {c: E.pole_order(DivisorPoint(c)) for c in self.points}
        den = Poly.constant(1)
        for c, m in self.den_orders.items():
            den = den * Poly.linear_root(c) ** m
        self.den = RegFun(den)
        self.P = [[self.den * f for f in row] for row in E.matrix]
        assert all(not f.poles for row in self.P for f in row)
        degs = [f.num.degree for row in self.P for f in row if not f.is_zero()]
        self.degree_shift = max([den.degree - 1] + degs)

    def column(self, label, i: int) -> dict:
        """L(label * e_i) in partial-fraction coordinates."""
        out: dict = {}
        for l2, x in label_derivative(label).items():
            for l3, y in times_label(self.den, l2).items():
                _acc(out, (l3, i), x * y)
        for k in range(self.r):
            f = self.P[k][i]
            if not f.is_zero():
                for l2, y in times_label(f, label).items():
                    _acc(out, (l2, k), y)
        return {key: c for key, c in out.items() if c}

    def times_den(self, vec: Sequence[RegFun]) -> dict:
        out: dict = {}
        for i, f in enumerate(vec):
            for lab, c in (self.den * f).partial_fractions().items():
                _acc(out, (lab, i), c)
        return {key: c for key, c in out.items() if c}


def _acc(target: dict, key, x) -> None:
    target[key] = target.get(key, 0) + x


def _to_vector(coords: Mapping, r: int) -> tuple[RegFun, ...]:
    parts: list[dict] = [{} for _ in range(r)]
    for (lab, i), c in coords.items():
        parts[i][lab] = parts[i].get(lab, 0) + c
    return tuple(RegFun.from_partial_fractions(p) for p in parts)


@lru_cache(maxsize=256)
def _operator(E: Connection) -> GlobalOperator:
    return GlobalOperator(E)


def _local_bounds(E: Connection) -> dict:
    """Per point: (pole order q, N_int, v_min) of the local connection."""
    out = {}
    for p in E.curve.points():
        L = restrict(E, p)
        out[p] = (L.pole_order, L.indicial_bound, L.v_min())
    return out


# ---------------------------------------------------------------------------
# H^0(X, E)


@dataclass(frozen=True)
class GlobalH0:
    basis: tuple[tuple[RegFun, ...], ...]
    window: Window

    @property
    def dim(self) -> int:
        return len(self.basis)


def _kernel_on(op: GlobalOperator, window: Window) -> list[dict]:
    ech = SparseEchelon(priority=lambda key: (-label_order(key[0]), _label_key(key[0]), key[1]))
    rels = []
    for lab in sorted(window.labels(), key=_preference):
        for i in range(op.r):
            rel = ech.add(op.column(lab, i), {(lab, i): Fraction(1)})
            if rel is not None:
                rels.append(rel)
    return rels


def global_h0(E: Connection) -> GlobalH0:
    """Horizontal sections, by an exact kernel computation on a pole-bounded window.

    The bound at each point is -v_min of the local connection; the window is
    then doubled once and the dimension must not change.
    """
    op = _operator(E)
    bounds = _local_bounds(E)

    def window(scale: int) -> Window:
        return Window.make(
            scale * max(0, -bounds[DivisorPoint(INF)][2]),
            {c: scale * max(0, -bounds[DivisorPoint(c)][2]) for c in E.curve.finite_points},
        )

    results = []
    for scale in (1, 2):
        W = window(scale)
        rels = _kernel_on(op, W)
        ech = Echelon(priority=lambda key: (_preference(key[0]), key[1]))
        for rel in rels:
            ech.add(rel)
        results.append((W, [_to_vector(ech.rows[p], E.rank) for p in ech.pivots()]))
    (W1, b1), (W2, b2) = results
    if len(b1) != len(b2):
        raise StabilizationError(
            "horizontal sections not captured by the pole bounds", {"dims": [len(b1), len(b2)]}
        )
    for v in b1:
        if any(not x.is_zero() for x in E.apply(v)):
            raise InvariantError("computed horizontal section is not horizontal", {"section": str(v)})
    return GlobalH0(tuple(b1), W1)


# ---------------------------------------------------------------------------
# H^1(X, E)


class GlobalH1Window:
    """Cokernel of L on a form window W, with primitives drawn from a larger window V.

    Image vectors with coordinates outside W are eliminated first, so the rows
    pivoting inside W span L(V) intersected with the W-span exactly.
    """

    def __init__(self, E: Connection, M: Mapping[DivisorPoint, int], bounds: Mapping):
        op = _operator(E)
        self.E, self.op, self.M = E, op, dict(M)
        r = E.rank
        inf = DivisorPoint(INF)
        slack = {p: (q + 1) * r + nint for p, (q, nint, _) in bounds.items()}
        self.W = Window.make(
            M[inf] + max(op.degree_shift, 0),
            {c: M[DivisorPoint(c)] for c in E.curve.finite_points},
        )
        self.V = Window.make(
            M[inf] + slack[inf],
            {c: M[DivisorPoint(c)] + slack[DivisorPoint(c)] + op.den_orders[c] for c in E.curve.finite_points},
        )
        W = self.W

        def prio(key):
            lab, i = key
            return (1 if W.contains(lab) else 0, -label_order(lab), _label_key(lab), i)

        ech = SparseEchelon(priority=prio)
        for lab in sorted(self.V.labels(), key=_preference):
            for i in range(r):
                ech.add(op.column(lab, i), {(lab, i): Fraction(1)})
        image_mid = sum(1 for lab, _ in ech.rows if W.contains(lab))
        self.dim = len(W) * r - image_mid
        reps: list[tuple[RegFun, ...]] = []
        for lab in sorted(W.labels(), key=_preference):
            if len(reps) == self.dim:
                break
            for i in range(r):
                vec = tuple(RegFun.from_label(lab) if k == i else RegFun() for k in range(r))
                img = op.times_den(vec)
                if not all(W.contains(l2) for l2, _ in img):
                    continue
                if ech.add(img, {("rep", len(reps)): Fraction(1)}) is None:
                    reps.append(vec)
                if len(reps) == self.dim:
                    break
        if len(reps) != self.dim:
            raise StabilizationError("could not complete an H^1 basis", {"window": W.as_dict(), "dim": self.dim})
        self.basis = tuple(reps)
        self._ech = ech

    def reduce(self, g: Sequence[RegFun]) -> tuple[tuple[Fraction, ...], tuple[RegFun, ...]]:
        """Coordinates c and exact primitive v with nabla(v) = g - sum c_k basis_k."""
        img = self.op.times_den(g)
        if not all(self.W.contains(lab) for lab, _ in img):
            raise PrecisionError("form lies outside the H^1 window")
        coords = self._ech.express(img)
        if coords is None:
            raise StabilizationError("form does not reduce in the H^1 window", {"window": self.W.as_dict()})
        c = tuple(coords.get(("rep", k), Fraction(0)) for k in range(self.dim))
        prim = _to_vector({k: x for k, x in coords.items() if k[0] != "rep"}, self.E.rank)
        lhs = self.E.apply(prim)
        for i in range(self.E.rank):
            rhs = g[i]
            for k, ck in enumerate(c):
                if ck:
                    rhs = rhs - self.basis[k][i] * ck
            if lhs[i] != rhs:
                raise InvariantError("H^1 reduction produced a wrong primitive")
        return c, prim


def global_h1(E: Connection, window_cap: int = DEFAULT_WINDOW_CAP, start: int | None = None) -> GlobalH1Window:
    """H^1 by windowed reduction, doubling the window until two rounds agree."""
    bounds = _local_bounds(E)
    r = E.rank
    M = {p: max(start or 0, (max(1, q) + 1) * r + nint + 2) for p, (q, nint, _) in bounds.items()}
    history = []
    prev = None
    while max(M.values()) <= window_cap:
        h = GlobalH1Window(E, M, bounds)
        history.append((max(M.values()), h.dim))
        if prev is not None and prev.dim == h.dim:
            h.history = tuple(history)
            return h
        prev = h
        M = {p: 2 * m for p, m in M.items()}
    raise StabilizationError("global H^1 did not stabilize", {"rounds": history[-2:]})


@dataclass(frozen=True)
class GlobalCohomology:
    h0: GlobalH0
    h1: GlobalH1Window

    @property
    def dims(self) -> tuple[int, int]:
        return (self.h0.dim, self.h1.dim)


def global_h(E: Connection, window_cap: int = DEFAULT_WINDOW_CAP) -> GlobalCohomology:
    return _global_h(E, window_cap)


@lru_cache(maxsize=256)
def _global_h(E: Connection, window_cap: int) -> GlobalCohomology:
    return GlobalCohomology(global_h0(E), global_h1(E, window_cap))


# ---------------------------------------------------------------------------
# boundary cohomology and the restriction maps


def boundary_h(E: Connection, truncation: int | None = None, cap: int = DEFAULT_CAP) -> dict:
    """Stabilized local cohomology at every boundary point."""
    return _boundary_h(E, truncation, cap)


@lru_cache(maxsize=256)
def _boundary_h(E: Connection, truncation: int | None, cap: int) -> dict:
    return {p: stabilized_cohomology(restrict(E, p), truncation, cap) for p in E.curve.points()}


def _h0_pivot(vec: Sequence[TruncLaurent]) -> tuple:
    keys = [(v.valuation, i) for i, v in enumerate(vec) if v.valuation is not None]
    return min(keys)


def local_h0_coordinates(lc: LocalCohomology, vec: Sequence[TruncLaurent]) -> tuple[Fraction, ...]:
    """Coordinates of a local horizontal section in the (reduced echelon) local basis."""
    coords = []
    for b in lc.h0_basis:
        e, i = _h0_pivot(b)
        coords.append(vec[i].coeff(e))
    valid = lc.h0.valid_to
    for i in range(len(vec)):
        approx = TruncLaurent.zero(valid)
        for c, b in zip(coords, lc.h0_basis):
            approx = approx + b[i] * TruncLaurent(0, [c])
        if not vec[i].truncate(valid).agrees_with(approx):
            raise InvariantError("restricted section is not a combination of local horizontal sections")
    return tuple(coords)


def _form_order_needed(lc: LocalCohomology) -> int:
    return lc.h1.top


def restrict_section(v: Sequence[RegFun], p: DivisorPoint, order: int) -> tuple[TruncLaurent, ...]:
    return tuple(restrict_function(f, p, order) for f in v)


def restrict_forms(w: Sequence[RegFun], p: DivisorPoint, order: int) -> tuple[TruncLaurent, ...]:
    return tuple(restrict_form(f, p, order) for f in w)


def _rank(columns: list[list[Fraction]], rows: int) -> int:
    if not columns:
        return 0
    return MatrixQ.from_columns(columns, rows).rank()


@dataclass
class ConeClass:
    """A cocycle (x, h) of the cone: x global, h per-point local data with nabla h = R(x)."""

    degree: int
    global_part: tuple[RegFun, ...]
    boundary_part: dict
    global_is_form: bool

    @property
    def boundary_primitive(self) -> dict:
        return self.boundary_part

    def check(self, E: Connection) -> bool:
        """Cocycle condition to the recorded precision (degree 1 only carries a condition)."""
        if self.degree != 1:
            return True
        for p, h in self.boundary_part.items():
            L = restrict(E, p)
            lhs = L.apply(h)
            top = min((x.prec for x in lhs if x.prec is not None), default=0)
            rhs = restrict_forms(self.global_part, p, top)
            if not all(a.agrees_with(b) for a, b in zip(lhs, rhs)):
                return False
        return True


@dataclass
class CompactCohomology:
    dims: tuple[int, int, int]
    classes: dict
    rho0: list
    rho1: list
    rank_rho0: int
    rank_rho1: int
    boundary: dict


def _complement(columns: list[list[Fraction]], n: int) -> list[int]:
    """Indices of unit vectors completing span(columns) to Q^n, chosen greedily."""
    ech = Echelon()
    for col in columns:
        ech.add({k: x for k, x in enumerate(col) if x})
    out = []
    for k in range(n):
        if ech.add({k: Fraction(1)}) is None:
            out.append(k)
    return out


def compact_h(E: Connection, truncation: int | None = None, cap: int = DEFAULT_CAP) -> CompactCohomology:
    return _compact_h(E, truncation, cap)


@lru_cache(maxsize=256)
def _compact_h(E: Connection, truncation: int | None, cap: int) -> CompactCohomology:
    G = global_h(E)
    # the local H^1 windows must hold the poles of the restricted global representatives
    need = truncation or 0
    for w in G.h1.basis:
        for p in E.curve.points():
            vals = [restrict_form(f, p, 0).valuation for f in w if not f.is_zero()]
            vals = [v for v in vals if v is not None]
            if vals:
                need = max(need, 2 - min(vals))
    B = boundary_h(E, need or None, cap)
    points = E.curve.points()
    r = E.rank

    # rho0: H^0(X) -> sum_p H^0(p)
    h0_slots = [(p, k) for p in points for k in range(len(B[p].h0_basis))]
    rho0 = []
    for v in G.h0.basis:
        col = []
        for p in points:
            lc = B[p]
            if lc.h0_basis:
                col.extend(local_h0_coordinates(lc, restrict_section(v, p, lc.h0.valid_to)))
        rho0.append(col)
    # rho1: H^1(X) -> sum_p H^1(p), recording local primitives
    h1_slots = [(p, k) for p in points for k in range(len(B[p].h1_basis))]
    rho1 = []
    primitives = []
    for w in G.h1.basis:
        col, prim = [], {}
        for p in points:
            lc = B[p]
            c, h = lc.reduce(restrict_forms(w, p, lc.h1.top))
            col.extend(c)
            prim[p] = h
        rho1.append(col)
        primitives.append(prim)
    n0, n1 = len(h0_slots), len(h1_slots)
    rank0, rank1 = _rank(rho0, n0), _rank(rho1, n1)
    if rank0 != G.h0.dim:
        raise InvariantError("restriction of horizontal sections is not injective", {"rank": rank0})

    classes: dict[int, list[ConeClass]] = {0: [], 1: [], 2: []}
    zero_form = tuple(RegFun() for _ in range(r))
    for idx in _complement(rho0, n0):
        p, k = h0_slots[idx]
        h = {q: tuple(TruncLaurent.zero(B[q].h0.valid_to) for _ in range(r)) for q in points}
        h[p] = B[p].h0_basis[k]
        classes[1].append(ConeClass(1, zero_form, h, True))
    if rho1:
        M = MatrixQ.from_columns(rho1, n1) if n1 else MatrixQ(0, len(rho1))
        for a in mat_kernel(M):
            omega = tuple(
                sum((G.h1.basis[j][i] * a[j] for j in range(len(a)) if a[j]), RegFun()) for i in range(r)
            )
            h = {}
            for p in points:
                lc = B[p]
                c, prim = lc.reduce(restrict_forms(omega, p, lc.h1.top))
                if any(c):
                    raise InvariantError("kernel class has nonzero local obstruction")
                h[p] = prim
            classes[1].append(ConeClass(1, omega, h, True))
    for idx in _complement(rho1, n1):
        p, k = h1_slots[idx]
        eta = {q: tuple(TruncLaurent.zero() for _ in range(r)) for q in points}
        eta[p] = B[p].h1_basis[k]
        classes[2].append(ConeClass(2, zero_form, eta, True))
    dims = (G.h0.dim - rank0, len(classes[1]), len(classes[2]))
    return CompactCohomology(dims, classes, rho0, rho1, rank0, rank1, B)


# ---------------------------------------------------------------------------
# orientation and pairings


def orientation(forms: Mapping) -> Fraction:
    """Sum over boundary points of the residues of per-point 1-forms (ds-coefficients)."""
    return sum((residue(f) for f in forms.values()), Fraction(0))


def global_residue_sum(f: RegFun, curve: CurveSpec) -> Fraction:
    """orientation of the restriction of the global form f dt."""
    return orientation({p: restrict_form(f, p, 0) for p in curve.points()})


def _res_pair(a: Sequence[TruncLaurent], b: Sequence[TruncLaurent]) -> Fraction:
    total = Fraction(0)
    for x, y in zip(a, b):
        if x.is_zero() or y.is_zero():
            continue
        total += residue(x * y)
    return total


def _pair_global(local: Sequence[TruncLaurent], y: Sequence[RegFun], p: DivisorPoint, form: bool) -> Fraction:
    """res_p(local^T R_p(y)), expanding y far enough for the s^-1 coefficient."""
    vals = [x.valuation for x in local if x.valuation is not None]
    if not vals:
        return Fraction(0)
    order = -1 - min(vals) + 1
    Ry = restrict_forms(y, p, order) if form else restrict_section(y, p, order)
    return _res_pair(local, Ry)


@dataclass
class PairingResult:
    name: str
    matrix: list
    rows: int
    cols: int
    rank: int

    @property
    def square(self) -> bool:
        return self.rows == self.cols

    @property
    def perfect(self) -> bool:
        return self.square and self.rank == self.rows

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "shape": [self.rows, self.cols],
            "rank": self.rank,
            "perfect": self.perfect,
            "matrix": [[str(x) for x in row] for row in self.matrix],
        }


def _pairing(name: str, matrix: list, rows: int, cols: int) -> PairingResult:
    rank = MatrixQ(rows, cols, matrix).rank() if rows and cols else 0
    return PairingResult(name, matrix, rows, cols, rank)


def boundary_pairing(E: Connection, truncation: int | None = None, cap: int = DEFAULT_CAP) -> dict:
    """H^0(bd, E) x H^1(bd, E^dual) and H^1(bd, E) x H^0(bd, E^dual), via sum of residues of v^T w."""
    BE, BD = compact_h(E, truncation, cap).boundary, compact_h(dual(E), truncation, cap).boundary
    out = {}
    for i in (0, 1):
        rows_e = [(p, v) for p in E.curve.points() for v in (BE[p].h0_basis if i == 0 else BE[p].h1_basis)]
        cols_d = [(p, w) for p in E.curve.points() for w in (BD[p].h1_basis if i == 0 else BD[p].h0_basis)]
        matrix = [[_res_pair(v, w) if p == q else Fraction(0) for q, w in cols_d] for p, v in rows_e]
        out[i] = _pairing(f"H{i}(bd,E) x H{1 - i}(bd,E*)", matrix, len(rows_e), len(cols_d))
    return out


def duality_pairing_c(E: Connection, truncation: int | None = None, cap: int = DEFAULT_CAP) -> dict:
    """H^i_c(E) x H^(2-i)(X, E^dual) -> Q, (x, h), y  |->  sum_p res_p(h^T R_p(y))."""
    C = compact_h(E, truncation, cap)
    GD = global_h(dual(E))
    points = E.curve.points()
    out = {}
    out[0] = _pairing("H0_c(E) x H2(X,E*)", [], len(C.classes[0]), 0)
    m1 = []
    for cls in C.classes[1]:
        m1.append([sum((_pair_global(cls.boundary_part[p], y, p, True) for p in points), Fraction(0)) for y in GD.h1.basis])
    out[1] = _pairing("H1_c(E) x H1(X,E*)", m1, len(C.classes[1]), GD.h1.dim)
    m2 = []
    for cls in C.classes[2]:
        m2.append([sum((_pair_global(cls.boundary_part[p], y, p, False) for p in points), Fraction(0)) for y in GD.h0.basis])
    out[2] = _pairing("H2_c(E) x H0(X,E*)", m2, len(C.classes[2]), GD.h0.dim)
    return out


def pairing_well_defined(E: Connection, truncation: int | None = None, cap: int = DEFAULT_CAP) -> bool:
    """The compact pairing ignores coboundaries on either side.

    Moving (x, h) by d(f, 0) = (nabla f, R(f)) changes the value by the residue
    sum of the global form f^T y; moving y by nabla z changes it by
    sum_p res_p(h^T R(nabla z)), which must vanish because nabla h = R(x).
    Both are tested with small monomial vectors f, z.
    """
    C = compact_h(E, truncation, cap)
    D = dual(E)
    GD = global_h(D)
    r = E.rank
    probes = [
        tuple(RegFun.from_label(lab) if j == i else RegFun() for j in range(r))
        for i in range(r)
        for lab in [("t", 0), ("t", 1)] + [("p", c, 1) for c in E.curve.finite_points]
    ]
    for y in GD.h1.basis:
        for f in probes:
            total = sum((f[i] * y[i] for i in range(r)), RegFun())
            if global_residue_sum(total, E.curve):
                return False
    for cls in C.classes[1]:
        for z in probes:
            nz = D.apply(z)
            val = sum((_pair_global(cls.boundary_part[p], nz, p, True) for p in E.curve.points()), Fraction(0))
            if val:
                return False
    return True


# ---------------------------------------------------------------------------
# reports


def tangent_complex(E: Connection) -> dict[int, int]:
    """dims of T^i = H^(i+1)(X, End E) for i = -1, 0, 1."""
    G = global_h(end(E))
    return {-1: G.h0.dim, 0: G.h1.dim, 1: 0}


@dataclass
class FredholmReport:
    fredholm: bool
    end_dims: tuple[int, int]
    h1_rounds: tuple


def fredholm_check(E: Connection) -> FredholmReport:
    try:
        G = global_h(end(E))
    except StabilizationError as exc:
        raise InvariantError(
            "End-cohomology failed to stabilize; over a field it is always finite, so this is a defect",
            exc.diagnostics,
        ) from exc
    return FredholmReport(True, G.dims, getattr(G.h1, "history", ()))


def injectivity_check(E: Connection) -> bool:
    """H^0(X, End E) -> sum_p H^0(bd_p, End E) has full column rank."""
    F = end(E)
    G = global_h(F)
    B = boundary_h(F)
    cols = []
    for v in G.h0.basis:
        col = []
        for p in F.curve.points():
            lc = B[p]
            if lc.h0_basis:
                col.extend(local_h0_coordinates(lc, restrict_section(v, p, lc.h0.valid_to)))
        cols.append(col)
    rows = sum(len(B[p].h0_basis) for p in F.curve.points())
    return _rank(cols, rows) == len(cols)


@dataclass
class CohomologyReport:
    connection: Connection
    h_X: GlobalCohomology
    h_boundary: dict
    h_c: CompactCohomology
    euler: dict
    les: dict
    truncation: dict = field(default_factory=dict)

    @property
    def boundary_total(self) -> tuple[int, int]:
        return (
            sum(lc.dims[0] for lc in self.h_boundary.values()),
            sum(lc.dims[1] for lc in self.h_boundary.values()),
        )


def cohomology_report(
    E: Connection, truncation: int | None = None, cap: int = DEFAULT_CAP, with_dual: bool = True
) -> CohomologyReport:
    G = global_h(E)
    C = compact_h(E, truncation, cap)
    B = C.boundary
    h0, h1 = G.dims
    b0 = sum(lc.dims[0] for lc in B.values())
    b1 = sum(lc.dims[1] for lc in B.values())
    c0, c1, c2 = C.dims
    seq = [c0, h0, b0, c1, h1, b1, c2]
    alt = sum((-1) ** k * d for k, d in enumerate(seq))
    les = {
        "sequence": seq,
        "alternating_sum": alt,
        "rank_rho0": C.rank_rho0,
        "rank_rho1": C.rank_rho1,
        "ranks_consistent": (
            c0 == h0 - C.rank_rho0
            and c1 == (b0 - C.rank_rho0) + (h1 - C.rank_rho1)
            and c2 == b1 - C.rank_rho1
        ),
    }
    les["ok"] = alt == 0 and les["ranks_consistent"]
    euler = {
        "chi_X": h0 - h1,
        "chi_c": c0 - c1 + c2,
        "chi_boundary": b0 - b1,
        "chi_boundary_per_point": {str(p): lc.dims[0] - lc.dims[1] for p, lc in B.items()},
    }
    if with_dual:
        GD = global_h(dual(E))
        euler["chi_X_dual"] = GD.dims[0] - GD.dims[1]
        euler["chi_c_equals_chi_X_dual"] = euler["chi_c"] == euler["chi_X_dual"]
    truncation_info = {
        "local": {str(p): lc.truncation_used for p, lc in B.items()},
        "global_h0_window": G.h0.window.as_dict(),
        "global_h1_window": G.h1.W.as_dict(),
    }
    return CohomologyReport(E, G, B, C, euler, les, truncation_info)
