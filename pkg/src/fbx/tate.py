"""Finite-stage pro, ind and Tate linear algebra, and refined compact cohomology on P^1.

A line bundle O(b) on P^1 is handled on the two standard charts: sections
are polynomials f(t) of degree <= b, and near infinity a section is
trivialized as u^b f(1/u) with u = 1/t. H^1(P^1, O(b)) has the Cech basis
t^k for b < k < 0.

Stage m of the refined compact cohomology is the fiber of
H(P^1, O(b)) -> H^0(D_(m), O(b)), where D_(m) carries the jets of order < m
at each point of D. The jet map has no H^1 target, so

    H^0_c = ker(jets),   H^1_c = coker(jets) + H^1(P^1, O(b)).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Mapping, Sequence

from .connection import Connection, CurveSpec
from .exactlin import INF, Echelon, MatrixQ, mat_kernel, mat_solve


class TateError(ValueError):
    pass


# ---------------------------------------------------------------------------
# towers


def _check_maps(dims: Sequence[int], maps: Sequence[MatrixQ], forward: bool) -> None:
    if len(maps) != max(0, len(dims) - 1):
        raise TateError("a tower of n stages needs n - 1 transition maps")
    for m, f in enumerate(maps):
        src, dst = (dims[m], dims[m + 1]) if forward else (dims[m + 1], dims[m])
        if (f.rows, f.cols) != (dst, src):
            raise TateError(f"transition map {m} has shape {f.rows}x{f.cols}, expected {dst}x{src}")


@dataclass(frozen=True)
class ProSpace:
    """Stages V_1 <- V_2 <- ... <- V_n; maps[m] is V_(m+2) -> V_(m+1) (0-based: stage m+1 -> stage m)."""

    dims: tuple[int, ...]
    maps: tuple[MatrixQ, ...]

    def __post_init__(self):
        if not self.dims:
            raise TateError("depth must be at least 1")
        _check_maps(self.dims, self.maps, forward=False)

    @property
    def depth(self) -> int:
        return len(self.dims)

    def composite(self, hi: int, lo: int) -> MatrixQ:
        """The map V_hi -> V_lo for stage indices hi >= lo (0-based)."""
        out = MatrixQ.identity(self.dims[hi])
        for m in range(hi - 1, lo - 1, -1):
            out = self.maps[m] @ out
        return out


@dataclass(frozen=True)
class IndSpace:
    """Stages W_1 -> W_2 -> ... -> W_n; maps[m] is stage m -> stage m+1 (0-based)."""

    dims: tuple[int, ...]
    maps: tuple[MatrixQ, ...]

    def __post_init__(self):
        if not self.dims:
            raise TateError("depth must be at least 1")
        _check_maps(self.dims, self.maps, forward=True)

    @property
    def depth(self) -> int:
        return len(self.dims)

    def maps_injective(self) -> bool:
        return all(f.rank() == f.cols for f in self.maps)

    def colimit_dim(self) -> int:
        """Dimension of the colimit of the truncated tower (its last stage modulo kernels of earlier maps)."""
        return self.dims[-1]


def pro_dual(P: ProSpace) -> IndSpace:
    return IndSpace(P.dims, tuple(f.transpose() for f in P.maps))


def ind_dual(I: IndSpace) -> ProSpace:
    return ProSpace(I.dims, tuple(f.transpose() for f in I.maps))


@dataclass(frozen=True)
class TateObject:
    """Per stage an exact sequence 0 -> sub_m -> total_m -> quotient_m -> 0."""

    sub: ProSpace
    quotient: IndSpace
    total_dims: tuple[int, ...]
    inclusions: tuple[MatrixQ, ...]
    projections: tuple[MatrixQ, ...]

    def stage_exact(self, m: int) -> bool:
        i, p = self.inclusions[m], self.projections[m]
        n = self.total_dims[m]
        if (i.rows, i.cols) != (n, self.sub.dims[m]) or (p.rows, p.cols) != (self.quotient.dims[m], n):
            return False
        return i.rank() == i.cols and p.rank() == p.rows and (p @ i).is_zero() and i.cols + p.rows == n

    def exact(self) -> bool:
        return all(self.stage_exact(m) for m in range(len(self.total_dims)))


def laurent_tate(depth: int) -> TateObject:
    """Q((s)) at stages m = 1..depth: Q[[s]]/s^m inside s^-m Q[[s]]/s^m, quotient s^-m Q[[s]]/Q[[s]].

    Total coordinates are the exponents -m..m-1; the sub-tower maps are the
    truncations and the quotient tower maps are the inclusions of tails.
    """
    if depth < 1:
        raise TateError("depth must be at least 1")
    subs, quots, totals, incs, projs = [], [], [], [], []
    for m in range(1, depth + 1):
        exps = list(range(-m, m))
        subs.append(m)
        quots.append(m)
        totals.append(2 * m)
        incs.append(MatrixQ(2 * m, m, [[1 if e == k else 0 for k in range(m)] for e in exps]))
        projs.append(MatrixQ(m, 2 * m, [[1 if e == -j else 0 for e in exps] for j in range(1, m + 1)]))
    sub_maps = tuple(
        MatrixQ(m, m + 1, [[1 if a == b else 0 for b in range(m + 1)] for a in range(m)]) for m in range(1, depth)
    )
    quot_maps = tuple(
        MatrixQ(m + 1, m, [[1 if a == b else 0 for b in range(m)] for a in range(m + 1)]) for m in range(1, depth)
    )
    return TateObject(
        ProSpace(tuple(subs), sub_maps),
        IndSpace(tuple(quots), quot_maps),
        tuple(totals),
        tuple(incs),
        tuple(projs),
    )


# ---------------------------------------------------------------------------
# coherent cohomology of O(b) on P^1 with jets along D


def _points(D: CurveSpec) -> list:
    return list(D.finite_points) + [INF]


def h1_dim(b: int) -> int:
    return max(0, -b - 1)


def h0_dim(b: int) -> int:
    return max(0, b + 1)


def jet_matrix(b: int, orders: Mapping) -> MatrixQ:
    """H^0(P^1, O(b)) -> sum_p O(b)/I_p^(m_p); rows are (point, order) jets, columns t^0..t^b."""
    rows = []
    ncols = h0_dim(b)
    for p, m in orders.items():
        for j in range(m):
            if p is INF:
                # u^b (1/u)^k = u^(b-k)
                rows.append([1 if b - k == j else 0 for k in range(ncols)])
            else:
                rows.append([comb(k, j) * Fraction(p) ** (k - j) if k >= j else 0 for k in range(ncols)])
    return MatrixQ(len(rows), ncols, rows)


def _jet_slots(orders: Mapping) -> list:
    return [(p, j) for p, m in orders.items() for j in range(m)]


@dataclass
class CoherentStage:
    """One stage: kernel basis (in t^k coordinates), cokernel complement jets, and dims."""

    orders: dict
    kernel: list
    complement: list
    image_rank: int
    h1_part: int

    @property
    def dims(self) -> tuple[int, int]:
        return (len(self.kernel), len(self.complement) + self.h1_part)


def coherent_stage(b: int, orders: Mapping) -> CoherentStage:
    J = jet_matrix(b, orders)
    kernel = mat_kernel(J) if J.cols else []
    n = J.rows
    cols = [J.column(k) for k in range(J.cols)]
    ech = Echelon()
    for col in cols:
        ech.add({i: x for i, x in enumerate(col) if x})
    rank = len(ech)
    complement = []
    for i in range(n):
        if ech.add({i: Fraction(1)}) is None:
            complement.append(i)
    return CoherentStage(dict(orders), kernel, complement, rank, h1_dim(b))


def _kernel_transition(hi: CoherentStage, lo: CoherentStage, ncols: int) -> MatrixQ:
    """Inclusion ker_hi -> ker_lo in the chosen bases."""
    if not lo.kernel or not hi.kernel:
        return MatrixQ(len(lo.kernel), len(hi.kernel))
    B = MatrixQ.from_columns(lo.kernel, ncols)
    cols = []
    for v in hi.kernel:
        x = mat_solve(B, v)
        if x is None:
            raise TateError("kernel of a deeper stage is not inside the shallower kernel")
        cols.append(x)
    return MatrixQ.from_columns(cols, len(lo.kernel))


def _coker_transition(b: int, hi: CoherentStage, lo: CoherentStage) -> MatrixQ:
    """coker_hi -> coker_lo induced by truncating jets; identity on the Cech part."""
    J_lo = jet_matrix(b, lo.orders)
    slots_hi, slots_lo = _jet_slots(hi.orders), _jet_slots(lo.orders)
    index_lo = {s: i for i, s in enumerate(slots_lo)}
    n_lo = len(slots_lo)
    basis_cols = [J_lo.column(k) for k in range(J_lo.cols)]
    basis_cols += [[1 if i == c else 0 for i in range(n_lo)] for c in lo.complement]
    A = MatrixQ.from_columns(basis_cols, n_lo) if basis_cols else MatrixQ(n_lo, 0)
    out_cols = []
    for c in hi.complement:
        p, j = slots_hi[c]
        target = [0] * n_lo
        if (p, j) in index_lo:
            target[index_lo[(p, j)]] = 1
        x = mat_solve(A, target) if n_lo else ()
        if x is None:
            raise TateError("jet truncation left the stage")
        coords = list(x[J_lo.cols:])
        out_cols.append(coords + [0] * hi.h1_part)
    for k in range(hi.h1_part):
        out_cols.append([0] * len(lo.complement) + [1 if i == k else 0 for i in range(lo.h1_part)])
    rows = len(lo.complement) + lo.h1_part
    return MatrixQ.from_columns(out_cols, rows) if out_cols else MatrixQ(rows, 0)


def _towers(b: int, stage_orders: Sequence[Mapping]) -> dict[int, ProSpace]:
    stages = [coherent_stage(b, o) for o in stage_orders]
    n = h0_dim(b)
    h0_maps = tuple(_kernel_transition(stages[m + 1], stages[m], n) for m in range(len(stages) - 1))
    h1_maps = tuple(_coker_transition(b, stages[m + 1], stages[m]) for m in range(len(stages) - 1))
    return {
        0: ProSpace(tuple(s.dims[0] for s in stages), h0_maps),
        1: ProSpace(tuple(s.dims[1] for s in stages), h1_maps),
    }


def refined_compact_coherent(a: int, D: CurveSpec, depth: int) -> dict[int, ProSpace]:
    """Pro-towers (degrees 0 and 1) of the refined compact cohomology of O(a), stages m = 1..depth."""
    if depth < 1:
        raise TateError("depth must be at least 1")
    pts = _points(D)
    return _towers(a, [{p: m for p in pts} for m in range(1, depth + 1)])


# ---------------------------------------------------------------------------
# Serre duality, stage by stage


def pole_filtration_basis(n_inf: int, pole: int, finite_points: Sequence) -> list[dict]:
    """Basis of rational functions with poles of order <= pole at the finite points and degree <= n_inf.

    Vectors are partial-fraction coordinates. When n_inf < 0 the functions
    must also vanish at infinity to order -n_inf, which is imposed as a kernel.
    """
    labels = [("t", k) for k in range(max(n_inf, -1) + 1)]
    labels += [("p", c, j) for c in finite_points for j in range(1, pole + 1)]
    if n_inf >= -1:
        return [{lab: Fraction(1)} for lab in labels]
    # expansion at infinity of (t - c)^-j = u^j (1 - c u)^-j; impose zero u^i for 1 <= i < -n_inf
    conditions = []
    for i in range(1, -n_inf):
        conditions.append([_inf_coeff(lab, i) for lab in labels])
    if not labels:
        return []
    K = mat_kernel(MatrixQ(len(conditions), len(labels), conditions)) if conditions else []
    return [{lab: x for lab, x in zip(labels, v) if x} for v in K]


def _inf_coeff(label, i: int) -> Fraction:
    """Coefficient of u^i in the expansion of a partial-fraction label at infinity."""
    if label[0] == "t":
        return Fraction(1) if label[1] == -i else Fraction(0)
    _, c, j = label
    k = i - j
    if k < 0:
        return Fraction(0)
    return comb(j + k - 1, k) * Fraction(c) ** k


def _local_jet_pairing(b: int, a: int, slot, g: Mapping) -> Fraction:
    """Residue pairing of the unit jet at ``slot`` against the section g of O(-a)(mD).

    With b = a - 2 the product is a section of O(-2) = omega, i.e. a form
    f g dt; at infinity f g dt = -(jet)(u) ghat(u) du with ghat = u^(-a) g(1/u).
    """
    p, j = slot
    if p is INF:
        # res_u of u^j * ghat(u) du, with a minus sign from dt = -du/u^2
        return -_ghat_coeff(a, g, -1 - j)
    # res_{t=c} of (t-c)^j g dt
    total = Fraction(0)
    for lab, x in g.items():
        total += x * _laurent_coeff_at(lab, p, -1 - j)
    return total


def _ghat_coeff(a: int, g: Mapping, e: int) -> Fraction:
    """Coefficient of u^e in u^(-a) g(1/u)."""
    total = Fraction(0)
    for lab, x in g.items():
        # u^(-a) * lab(1/u): coefficient of u^(e + a) in lab(1/u)
        total += x * _inf_coeff(lab, e + a)
    return total


def _laurent_coeff_at(label, c, e: int) -> Fraction:
    """Coefficient of (t - c)^e in the expansion of a label at the finite point c."""
    if label[0] == "t":
        k = label[1]
        return comb(k, e) * Fraction(c) ** (k - e) if 0 <= e <= k else Fraction(0)
    _, c2, j = label
    if c2 == c:
        return Fraction(1) if e == -j else Fraction(0)
    if e < 0:
        return Fraction(0)
    # (s + d)^-j with d = c - c2 expanded in s = t - c
    d = Fraction(c) - c2
    return _binom_neg(j, e) * d ** (-j - e)


def _binom_neg(j: int, e: int) -> Fraction:
    """Binomial coefficient C(-j, e)."""
    return Fraction((-1) ** e * comb(j + e - 1, e))


@dataclass
class SerreStage:
    m: int
    h0_c: int
    h1_c: int
    filtration_dim: int
    expected_h1: int
    expected_h0: int
    pairing_rank: int
    pairing_kernel: int
    ok: bool


@dataclass
class SerreReport:
    a: int
    points: list
    depth: int
    stages: list
    ind_injective: bool
    ok: bool

    def as_dict(self) -> dict:
        return {
            "twist": self.a,
            "points": [str(p) for p in self.points],
            "depth": self.depth,
            "ind_maps_injective": self.ind_injective,
            "ok": self.ok,
            "stages": [
                {
                    "m": s.m,
                    "h0_c": s.h0_c,
                    "h1_c": s.h1_c,
                    "filtration_dim": s.filtration_dim,
                    "pairing_rank": s.pairing_rank,
                    "ok": s.ok,
                }
                for s in self.stages
            ],
        }


def serre_duality_stage_check(a: int, D: CurveSpec, depth: int) -> SerreReport:
    """Compare the duals of the H^1_c stages of O(a) (x) omega = O(a-2) with the pole filtration of H^0(X, O(-a)).

    Per stage m: dim H^1_c,m(O(a-2)) must equal dim F_m, where F_m consists of
    sections of O(-a) with poles of order <= m along D; the residue pairing
    between jets and F_m must vanish on the image of global sections and have
    exactly H^0(P^1, O(-a)) as its kernel on the F_m side; and the dual tower
    must have injective transition maps, so the colimit is the union of the F_m.
    """
    if depth < 1:
        raise TateError("depth must be at least 1")
    b = a - 2
    pts = _points(D)
    towers = refined_compact_coherent(b, D, depth)
    dual_tower = pro_dual(towers[1])
    nD = len(pts)
    stages = []
    all_ok = True
    for m in range(1, depth + 1):
        st = coherent_stage(b, {p: m for p in pts})
        h0c, h1c = st.dims
        F = pole_filtration_basis(-a + m, m, D.finite_points)
        slots = _jet_slots(st.orders)
        P = MatrixQ(len(slots), len(F), [[_local_jet_pairing(b, a, s, g) for g in F] for s in slots])
        J = jet_matrix(b, st.orders)
        vanishes_on_image = (J.transpose() @ P).is_zero() if J.cols and F else True
        rank = P.rank() if slots and F else 0
        kernel = len(F) - rank
        ok = (
            h1c == len(F) == max(0, -a + m * nD + 1)
            and h0c == max(0, a - m * nD - 1)
            and vanishes_on_image
            and rank == len(st.complement)
            and kernel == h0_dim(-a)
        )
        all_ok = all_ok and ok
        stages.append(SerreStage(m, h0c, h1c, len(F), max(0, -a + m * nD + 1), max(0, a - m * nD - 1), rank, kernel, ok))
    inj = dual_tower.maps_injective()
    return SerreReport(a, pts, depth, stages, inj, all_ok and inj)


# ---------------------------------------------------------------------------
# Hodge pieces of the refined de Rham cohomology


@dataclass
class HodgePieces:
    rank: int
    depth: int
    shifts: dict
    piece0: dict
    piece1: dict
    chi_sum: list
    chi_c: int | None
    matches: bool
    notes: list = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "rank": self.rank,
            "depth": self.depth,
            "jet_shift": {str(p): d for p, d in self.shifts.items()},
            "piece0_dims": {str(k): list(v.dims) for k, v in self.piece0.items()},
            "piece1_dims": {str(k): list(v.dims) for k, v in self.piece1.items()},
            "chi_sum": self.chi_sum,
            "chi_c": self.chi_c,
            "matches": self.matches,
            "notes": self.notes,
        }


def _scale(P: ProSpace, r: int) -> ProSpace:
    """P tensored with Q^r (block diagonal maps)."""
    def block(f: MatrixQ) -> MatrixQ:
        rows = []
        for i in range(r):
            for row in f.entries:
                rows.append([0] * (i * f.cols) + list(row) + [0] * ((r - i - 1) * f.cols))
        return MatrixQ(r * f.rows, r * f.cols, rows)

    return ProSpace(tuple(r * d for d in P.dims), tuple(block(f) for f in P.maps))


def hodge_pieces(E: Connection, depth: int = 4, chi_c: int | None = None) -> HodgePieces:
    """Graded pieces of the Hodge filtration on the refined compact de Rham cohomology.

    Piece 0 is the refined compact cohomology of the trivial extension O^r on
    P^1 with jets of order m at every point. Piece 1 is that of omega^r = O(-2)^r
    with jets of order m - delta_p, where delta_p = max(1, q_p) is how far nabla
    lowers the jet order at p; it sits in cohomological degree one higher. When
    ``chi_c`` is given (the Euler characteristic of compact de Rham cohomology)
    the stage-wise Euler characteristic of the total is compared with it.
    """
    from .boundary import restrict

    r = E.rank
    pts = E.curve.points()
    shifts = {p: max(1, restrict(E, p).pole_order) for p in pts}
    start = max(shifts.values())
    stages0 = [{p.location: m for p in pts} for m in range(start, start + depth)]
    stages1 = [{p.location: m - shifts[p] for p in pts} for m in range(start, start + depth)]
    piece0 = {k: _scale(v, r) for k, v in _towers(0, stages0).items()}
    piece1 = {k: _scale(v, r) for k, v in _towers(-2, stages1).items()}
    chi = []
    for m in range(depth):
        chi0 = piece0[0].dims[m] - piece0[1].dims[m]
        chi1 = piece1[0].dims[m] - piece1[1].dims[m]
        chi.append(chi0 - chi1)
    matches = chi_c is not None and all(x == chi_c for x in chi)
    notes = []
    if chi_c is not None and not matches:
        notes.append("Euler characteristics differ: the trivial lattice is not adapted to nabla at some point")
    return HodgePieces(r, depth, shifts, piece0, piece1, chi, chi_c, matches, notes)
