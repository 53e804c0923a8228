"""Graded mixed complexes over Q, their realization and Hom complexes.

Conventions: a graded mixed complex has pieces E^n(w) (cohomological degree
n, weight w >= 0), a differential d of bidegree (+1, 0) and a mixed
structure eps of bidegree (-1, +1). The realization places E(i) in
cohomological shift 2i, so eps raises total degree by one. For de Rham
algebras this puts the weight-w piece in degree -w and |DR(E)| is the
usual two-term de Rham complex.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .exactlin import Echelon, MatrixQ, RegFun, Window, label_derivative, times_label

Bidegree = tuple[int, int]


class GMCError(ValueError):
    """A graded mixed complex or chain complex violates its identities."""


def _zero_map(rows: int, cols: int) -> MatrixQ:
    return MatrixQ.zeros(rows, cols)


def _compose(a: MatrixQ | None, b: MatrixQ | None) -> MatrixQ | None:
    if a is None or b is None:
        return None
    return a @ b


def _add(a: MatrixQ | None, b: MatrixQ | None) -> MatrixQ | None:
    if a is None:
        return b
    if b is None:
        return a
    return MatrixQ(a.rows, a.cols, [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(a.entries, b.entries)])


@dataclass(frozen=True)
class GradedMixedComplex:
    """Finite-dimensional graded mixed complex with chosen bases.

    ``pieces`` maps (n, w) to a dimension; ``d[(n, w)]`` is the matrix
    E^n(w) -> E^{n+1}(w) and ``eps[(n, w)]`` is E^n(w) -> E^{n-1}(w+1).
    Missing maps are zero. The identities d^2 = 0, eps^2 = 0 and
    d eps + eps d = 0 are verified on construction.
    """

    pieces: Mapping[Bidegree, int]
    d: Mapping[Bidegree, MatrixQ] = field(default_factory=dict)
    eps: Mapping[Bidegree, MatrixQ] = field(default_factory=dict)
    labels: Mapping[Bidegree, tuple] = field(default_factory=dict)

    def __post_init__(self):
        pieces = {k: v for k, v in self.pieces.items() if v}
        object.__setattr__(self, "pieces", pieces)
        for (n, w) in pieces:
            if w < 0:
                raise GMCError(f"negative weight {w}")
        for name, maps, shift in (("d", self.d, (1, 0)), ("eps", self.eps, (-1, 1))):
            for src, m in maps.items():
                tgt = (src[0] + shift[0], src[1] + shift[1])
                if (m.rows, m.cols) != (self.dim(tgt), self.dim(src)):
                    raise GMCError(f"{name}{src} has shape {m.rows}x{m.cols}, expected "
                                   f"{self.dim(tgt)}x{self.dim(src)}")
        self._check_identities()

    def dim(self, key: Bidegree) -> int:
        return self.pieces.get(key, 0)

    def d_map(self, key: Bidegree) -> MatrixQ | None:
        m = self.d.get(key)
        return None if m is None or m.is_zero() else m

    def eps_map(self, key: Bidegree) -> MatrixQ | None:
        m = self.eps.get(key)
        return None if m is None or m.is_zero() else m

    def weights(self) -> list[int]:
        return sorted({w for _, w in self.pieces})

    def _check_identities(self) -> None:
        for (n, w) in self.pieces:
            dd = _compose(self.d_map((n + 1, w)), self.d_map((n, w)))
            if dd is not None and not dd.is_zero():
                raise GMCError(f"d^2 != 0 on piece {(n, w)}")
            ee = _compose(self.eps_map((n - 1, w + 1)), self.eps_map((n, w)))
            if ee is not None and not ee.is_zero():
                raise GMCError(f"eps^2 != 0 on piece {(n, w)}")
            mixed = _add(
                _compose(self.d_map((n - 1, w + 1)), self.eps_map((n, w))),
                _compose(self.eps_map((n + 1, w)), self.d_map((n, w))),
            )
            if mixed is not None and not mixed.is_zero():
                raise GMCError(f"d eps + eps d != 0 on piece {(n, w)}")

    def direct_sum(self, other: "GradedMixedComplex") -> "GradedMixedComplex":
        keys = set(self.pieces) | set(other.pieces)
        pieces = {k: self.dim(k) + other.dim(k) for k in keys}

        def block(a_maps, b_maps, shift):
            out = {}
            for k in keys:
                tgt = (k[0] + shift[0], k[1] + shift[1])
                a = a_maps.get(k) or _zero_map(self.dim(tgt), self.dim(k))
                b = b_maps.get(k) or _zero_map(other.dim(tgt), other.dim(k))
                rows = [list(r) + [0] * b.cols for r in a.entries]
                rows += [[0] * a.cols + list(r) for r in b.entries]
                out[k] = MatrixQ(a.rows + b.rows, a.cols + b.cols, rows)
            return out

        return GradedMixedComplex(pieces, block(self.d, other.d, (1, 0)), block(self.eps, other.eps, (-1, 1)))


def unit() -> GradedMixedComplex:
    """Q in degree 0, weight 0."""
    return GradedMixedComplex({(0, 0): 1})


@dataclass(frozen=True)
class ChainComplex:
    """Cochain complex of finite-dimensional Q-spaces, differential of degree +1."""

    dims: Mapping[int, int]
    diff: Mapping[int, MatrixQ] = field(default_factory=dict)

    def __post_init__(self):
        dims = {k: v for k, v in self.dims.items() if v}
        object.__setattr__(self, "dims", dims)
        for n, m in self.diff.items():
            if (m.rows, m.cols) != (self.dim(n + 1), self.dim(n)):
                raise GMCError(f"differential in degree {n} has wrong shape")
        for n in dims:
            a, b = self.diff.get(n), self.diff.get(n + 1)
            if a is not None and b is not None and not (b @ a).is_zero():
                raise GMCError(f"d^2 != 0 in degree {n}")

    def dim(self, n: int) -> int:
        return self.dims.get(n, 0)

    def degrees(self) -> list[int]:
        return sorted(self.dims)


def realization(E: GradedMixedComplex) -> ChainComplex:
    """|E| = prod_i E(i)[-2i] with total differential d + eps."""
    # layout of degree n: concatenation over weights i of E^{n-2i}(i)
    layout: dict[int, list[tuple[Bidegree, int]]] = {}
    for (m, w) in sorted(E.pieces, key=lambda k: (k[1], k[0])):
        n = m + 2 * w
        layout.setdefault(n, [])
    for n in layout:
        offset = 0
        entries = []
        for w in E.weights():
            key = (n - 2 * w, w)
            if E.dim(key):
                entries.append((key, offset))
                offset += E.dim(key)
        layout[n] = entries
    dims = {n: sum(E.dim(k) for k, _ in blocks) for n, blocks in layout.items()}
    diff = {}
    for n, blocks in layout.items():
        if not dims.get(n + 1):
            continue
        rows = [[Fraction(0)] * dims[n] for _ in range(dims[n + 1])]
        tgt_off = dict(layout.get(n + 1, []))
        for key, off in blocks:
            for m, tgt in ((E.d_map(key), (key[0] + 1, key[1])), (E.eps_map(key), (key[0] - 1, key[1] + 1))):
                if m is None:
                    continue
                toff = tgt_off[tgt]
                for i, row in enumerate(m.entries):
                    for j, x in enumerate(row):
                        if x:
                            rows[toff + i][off + j] += x
        diff[n] = MatrixQ(dims[n + 1], dims[n], rows)
    return ChainComplex(dims, diff)


@dataclass(frozen=True)
class CohomologyGroup:
    dim: int
    cocycles: tuple[tuple[Fraction, ...], ...]


def cohomology(C: ChainComplex) -> dict[int, CohomologyGroup]:
    """Dimensions and representing cocycles, degree by degree."""
    out = {}
    for n in C.degrees():
        dn = C.diff.get(n)
        size = C.dim(n)
        if dn is None:
            kernel = [tuple(Fraction(int(i == j)) for i in range(size)) for j in range(size)]
        else:
            from .exactlin import mat_kernel

            kernel = mat_kernel(dn)
        image = Echelon()
        prev = C.diff.get(n - 1)
        if prev is not None:
            for j in range(prev.cols):
                image.add({i: x for i, x in enumerate(prev.column(j)) if x})
        reps = []
        for vec in kernel:
            if image.add({i: x for i, x in enumerate(vec) if x}) is None:
                reps.append(vec)
        out[n] = CohomologyGroup(len(reps), tuple(reps))
    return out


def cohomology_dims(C: ChainComplex) -> dict[int, int]:
    return {n: g.dim for n, g in cohomology(C).items() if g.dim}


# ---------------------------------------------------------------------------
# Hom complexes


def hom_complex(E: GradedMixedComplex, F: GradedMixedComplex) -> ChainComplex:
    """The complex prod_{p>=0} Hom_gr(E, F(p))[-2p] with D f = T_F f - (-1)^|f| f T_E.

    T = d + eps is the total structure of each side. When both arguments are
    de Rham modules (see :class:`DeRhamGMC`), graded maps are taken linear over
    the de Rham algebra instead of over Q.
    """
    if isinstance(E, DeRhamGMC) and isinstance(F, DeRhamGMC):
        return _de_rham_hom(E, F)
    if isinstance(E, DeRhamGMC) != isinstance(F, DeRhamGMC):
        raise GMCError("cannot mix de Rham modules with plain graded mixed complexes")
    wE, wF = E.weights(), F.weights()
    if not wE or not wF:
        return ChainComplex({})
    max_p = max(wF) - min(wE)
    # basis of component (p, src, m): elementary maps E^src -> F^{src_n + m}(src_w + p)
    comps: dict[int, list[tuple[int, Bidegree, int]]] = {}
    for p in range(max_p + 1):
        for src in sorted(E.pieces):
            for tgt in sorted(F.pieces):
                if tgt[1] != src[1] + p:
                    continue
                m = tgt[0] - src[0]
                comps.setdefault(m + 2 * p, []).append((p, src, m))
    index: dict[int, dict[tuple, int]] = {}
    for deg, items in comps.items():
        off, idx = 0, {}
        for p, src, m in items:
            tgt = (src[0] + m, src[1] + p)
            idx[(p, src, m)] = off
            off += F.dim(tgt) * E.dim(src)
        index[deg] = idx
    dims = {deg: sum(F.dim((s[0] + m, s[1] + p)) * E.dim(s) for p, s, m in items) for deg, items in comps.items()}

    def coord(deg, p, src, m, i, j):
        # entry (i, j) of a map E^src -> F^tgt
        return index[deg][(p, src, m)] + i * E.dim(src) + j

    diff = {}
    for deg, items in comps.items():
        if not dims.get(deg + 1):
            continue
        cols = []
        for p, src, m in items:
            tgt = (src[0] + m, src[1] + p)
            sign = -1 if m % 2 else 1
            for i in range(F.dim(tgt)):
                for j in range(E.dim(src)):
                    col: dict[int, Fraction] = {}
                    # T_F o f: f = e_i e_j^T, so T_F f has column j = T_F e_i
                    for mat, ntgt, dp, dm in (
                        (F.d_map(tgt), (tgt[0] + 1, tgt[1]), 0, 1),
                        (F.eps_map(tgt), (tgt[0] - 1, tgt[1] + 1), 1, -1),
                    ):
                        if mat is None:
                            continue
                        for k in range(mat.rows):
                            x = mat.entries[k][i]
                            if x:
                                key = coord(deg + 1, p + dp, src, m + dm, k, j)
                                col[key] = col.get(key, 0) + x
                    # f o T_E: f T_E has row i = row j of T_E, from the preimage piece
                    for nsrc, mat, dp, dm in (
                        ((src[0] - 1, src[1]), E.d_map((src[0] - 1, src[1])), 0, 1),
                        ((src[0] + 1, src[1] - 1), E.eps_map((src[0] + 1, src[1] - 1)), 1, -1),
                    ):
                        if mat is None:
                            continue
                        for k in range(mat.cols):
                            x = mat.entries[j][k]
                            if x:
                                key = coord(deg + 1, p + dp, nsrc, m + dm, i, k)
                                col[key] = col.get(key, 0) - sign * x
                    cols.append(col)
        rows = [[Fraction(0)] * len(cols) for _ in range(dims[deg + 1])]
        for c, col in enumerate(cols):
            for r, x in col.items():
                rows[r][c] += x
        diff[deg] = MatrixQ(dims[deg + 1], dims[deg], rows)
    return ChainComplex(dims, diff)


# ---------------------------------------------------------------------------
# de Rham modules: DR_X tensor a free O_X-module, truncated to pole windows


@dataclass(frozen=True)
class DeRhamGMC(GradedMixedComplex):
    """Truncation of DR_X (x) O_X^r with eps coming from a connection.

    Weight 0 sits in degree 0 with basis ``window`` x {e_1..e_r}; weight 1 sits
    in degree -1 with basis ``form_window`` x {e_1..e_r} dt. Basis order is
    function-label major, generator minor. ``finite_points`` records the
    boundary points used by the partial-fraction basis.
    """

    rank: int = 1
    window: Window | None = None
    form_window: Window | None = None
    finite_points: tuple[Fraction, ...] = ()

    def function_basis(self) -> list[tuple]:
        return [(lab, i) for lab in self.window.labels() for i in range(self.rank)]

    def form_basis(self) -> list[tuple]:
        return [(lab, i) for lab in self.form_window.labels() for i in range(self.rank)]


def recover_connection(E: DeRhamGMC) -> list[list[RegFun]]:
    """Read the connection matrix A off the mixed structure.

    eps(1 (x) e_i) = A e_i dt gives column i. The rest of eps is checked
    against the Leibniz rule eps(f e_i) = f' e_i + f A e_i, which is what
    makes E free over the de Rham algebra; anything else is rejected.
    """
    if not isinstance(E, DeRhamGMC) or E.window is None:
        raise GMCError("recover_connection needs a de Rham module with a window")
    if set(E.pieces) - {(0, 0), (-1, 1)}:
        raise GMCError("de Rham module must live in bidegrees (0,0) and (-1,1)")
    r = E.rank
    fbasis = E.function_basis()
    wbasis = E.form_basis()
    if E.dim((0, 0)) != len(fbasis) or E.dim((-1, 1)) != len(wbasis):
        raise GMCError("pieces are not free of the declared rank over the window")
    const = ("t", 0)
    if not E.window.contains(const):
        raise GMCError("window must contain the constant functions")
    eps = E.eps.get((0, 0)) or MatrixQ.zeros(len(wbasis), len(fbasis))
    fidx = {b: k for k, b in enumerate(fbasis)}
    A = [[RegFun() for _ in range(r)] for _ in range(r)]
    for i in range(r):
        col = eps.column(fidx[(const, i)])
        coords: dict[int, dict] = {}
        for (lab, k), x in zip(wbasis, col):
            if x:
                coords.setdefault(k, {})[lab] = x
        for k, pf in coords.items():
            A[k][i] = RegFun.from_partial_fractions(pf)
    # Leibniz check on every basis element
    widx = {b: k for k, b in enumerate(wbasis)}
    for (lab, i), j in fidx.items():
        expected: dict[int, Fraction] = {}
        for l2, x in label_derivative(lab).items():
            _acc(expected, widx, (l2, i), x)
        for k in range(r):
            if A[k][i].is_zero():
                continue
            for l2, x in times_label(A[k][i], lab).items():
                _acc(expected, widx, (l2, k), x)
        actual = {n: x for n, x in enumerate(eps.column(j)) if x}
        if {k: v for k, v in expected.items() if v} != actual:
            raise GMCError(f"mixed structure is not a connection on a free module (basis {lab}, e{i})")
    return A


def _acc(target: dict, index: Mapping, key, x) -> None:
    if key not in index:
        raise GMCError(f"image {key} leaves the form window; enlarge the window")
    k = index[key]
    target[k] = target.get(k, 0) + x


def hom_connection_matrix(A_E, A_F, M):
    """Apply D(M) = M' + A_F M - M A_E to a matrix of functions (result as RegFun matrix)."""
    rF, rE = len(A_F), len(A_E)
    out = []
    for i in range(rF):
        row = []
        for j in range(rE):
            val = M[i][j].derivative()
            for k in range(rF):
                val = val + A_F[i][k] * M[k][j]
            for k in range(rE):
                val = val - M[i][k] * A_E[k][j]
            row.append(val)
        out.append(row)
    return out


def natural_form_window(window: Window, matrices, finite_points) -> Window:
    """Smallest window containing nabla(window) for connection matrices given."""
    entries = [f for A in matrices for row in A for f in row if not f.is_zero()]
    from .exactlin import INF

    d_inf = max([-1] + [f.pole_order_at(INF) for f in entries])
    d_fin = {c: max([1] + [f.pole_order_at(c) for f in entries]) for c in finite_points}
    return window.widen(d_inf, d_fin)


def _de_rham_hom(E: DeRhamGMC, F: DeRhamGMC) -> ChainComplex:
    if E.finite_points != F.finite_points:
        raise GMCError("de Rham modules live on different curves")
    A_E = recover_connection(E)
    A_F = recover_connection(F)
    rE, rF = E.rank, F.rank
    window = E.window
    form_window = natural_form_window(window, (A_E, A_F), E.finite_points)
    src = [(lab, i, j) for lab in window.labels() for i in range(rF) for j in range(rE)]
    tgt = [(lab, i, j) for lab in form_window.labels() for i in range(rF) for j in range(rE)]
    tidx = {b: k for k, b in enumerate(tgt)}
    rows = [[Fraction(0)] * len(src) for _ in range(len(tgt))]
    for c, (lab, i, j) in enumerate(src):
        # f_0 = b * E_ij; D f_0 = f_0' + A_F f_0 - f_0 A_E (the eps_E term enters with a sign)
        def put(l2, a, b, x):
            rows[tidx[(l2, a, b)]][c] += x

        for l2, x in label_derivative(lab).items():
            put(l2, i, j, x)
        for k in range(rF):
            if not A_F[k][i].is_zero():
                for l2, x in times_label(A_F[k][i], lab).items():
                    put(l2, k, j, x)
        for k in range(rE):
            if not A_E[j][k].is_zero():
                for l2, x in times_label(A_E[j][k], lab).items():
                    put(l2, i, k, -x)
    return ChainComplex({0: len(src), 1: len(tgt)}, {0: MatrixQ(len(tgt), len(src), rows)})
