from __future__ import annotations

import random
from fractions import Fraction
from math import factorial

import pytest

from fbx.boundary import (
    BoundaryError,
    LocalConnection,
    StabilizationError,
    local_h0,
    local_h1,
    residue,
    restrict,
    restrict_form,
    stabilized_cohomology,
)
from fbx.connection import Connection, CurveSpec, DivisorPoint, dual
from fbx.exactlin import INF, PrecisionError, RegFun, TruncLaurent
from fbx.samples import exponential, kummer, random_connection

F = Fraction
ZERO, AT_INF = DivisorPoint(F(0)), DivisorPoint(INF)
HALF = F(1, 2)


def local(entry):
    return LocalConnection.from_matrix([[entry]])


def B_const(c):
    return local(RegFun.constant(c))


def exact_part(x: TruncLaurent, upto: int) -> dict:
    return {e: c for e, c in x.terms().items() if e <= upto}


def test_restrict_examples():
    assert restrict(Connection.trivial(CurveSpec.gm()), ZERO).pole_order == 0
    B0 = restrict(kummer(HALF), ZERO).matrix_expansion(4)[0][0]
    assert B0.terms() == {-1: HALF}
    Binf = restrict(kummer(HALF), AT_INF).matrix_expansion(4)[0][0]
    assert Binf.terms() == {-1: -HALF}
    # d + d(1/t) at infinity is d/ds + 1
    assert restrict(exponential(), AT_INF).matrix_expansion(3)[0][0].terms() == {0: 1}
    with pytest.raises(BoundaryError):
        restrict(kummer(), DivisorPoint(F(5)))


def test_local_h0_examples():
    assert local_h0(B_const(0), 20).dim == 1
    assert local_h0(local(RegFun.pole(0) * HALF), 20).dim == 0
    h0 = local_h0(B_const(1), 24)
    (v,) = h0.basis
    scale = v[0].coeff(0)
    for m in range(10):
        assert v[0].coeff(m) == scale * F((-1) ** m, factorial(m))


def test_local_h1_examples():
    h = local_h1(B_const(0), 20)
    assert h.dim == 1
    assert exact_part(h.basis[0][0], 10) == {-1: 1}
    for k in (-5, -2, 0, 3):
        coords, prim = h.reduce((TruncLaurent.monomial(k, 1),))
        assert coords == (0,)
        assert exact_part(prim[0], 8) == {k + 1: F(1, k + 1)}
    coords, _ = h.reduce((TruncLaurent.monomial(-1, 3),))
    assert coords == (3,)
    assert local_h1(local(RegFun.pole(0) * HALF), 20).dim == 0
    assert local_h1(local(RegFun.pole(0, 2) * -1), 20).dim == 0


@pytest.mark.parametrize(
    "L,dims",
    [
        (B_const(0), (1, 1)),
        (local(RegFun.pole(0) * HALF), (0, 0)),
        (local(RegFun.pole(0, 2) * -1), (0, 0)),
        (local(RegFun.pole(0) * 3), (1, 1)),
        (LocalConnection.from_matrix([[RegFun(), RegFun()], [RegFun(), RegFun()]]), (2, 2)),
    ],
)
def test_stabilized_examples(L, dims):
    lc = stabilized_cohomology(L)
    assert lc.dims == dims and lc.stabilized


def test_stabilization_cap():
    with pytest.raises(StabilizationError) as info:
        stabilized_cohomology(local(RegFun.pole(0, 3)), cap=8)
    assert "last_rounds" in info.value.diagnostics


def test_residue_examples():
    assert residue(TruncLaurent.monomial(-1, 1, 4)) == 1
    for k in (-3, 0, 2):
        assert residue(TruncLaurent.monomial(k, 1, 4)) == 0
    assert residue(restrict_form(RegFun.pole(0), AT_INF, 2)) == -1
    with pytest.raises(PrecisionError):
        residue(TruncLaurent.zero(-3))
    m = [[TruncLaurent.monomial(-1, 2, 3), TruncLaurent.zero(3)], [TruncLaurent.zero(3), TruncLaurent.monomial(-1, 5, 3)]]
    assert residue(m, trace=True) == 7


def test_horizontal_sections_are_horizontal():
    rng = random.Random(11)
    curve = CurveSpec((F(0), F(1)))
    for _ in range(8):
        E = random_connection(rng, curve, 2)
        for p in curve.points():
            L = restrict(E, p)
            lc = stabilized_cohomology(L)
            for v in lc.h0_basis:
                assert all(x.is_zero() for x in L.apply(v))


def test_reduce_gives_primitives():
    rng = random.Random(12)
    curve = CurveSpec.gm()
    for _ in range(8):
        E = random_connection(rng, curve, 2)
        for p in curve.points():
            L = restrict(E, p)
            lc = stabilized_cohomology(L)
            g = tuple(TruncLaurent.from_dict({e: F(rng.randint(-3, 3)) for e in range(-4, 4)}) for _ in range(2))
            coords, prim = lc.reduce(g)
            nabla = L.apply(prim)
            for i in range(2):
                target = g[i] - sum((c * w[i] for c, w in zip(coords, lc.h1_basis)), TruncLaurent.zero())
                upto = min(nabla[i].prec, target.prec if target.prec is not None else 10**6)
                assert exact_part(nabla[i] - target, upto) == {}


def test_index_zero_and_local_duality():
    rng = random.Random(13)
    curve = CurveSpec((F(0), F(1)))
    for _ in range(8):
        E = random_connection(rng, curve, 2)
        for p in curve.points():
            a = stabilized_cohomology(restrict(E, p))
            b = stabilized_cohomology(restrict(dual(E), p))
            assert a.dims[0] == a.dims[1] == b.dims[1] == b.dims[0]


def test_doubling_reproduces_dimensions():
    for E in (kummer(), exponential(), Connection.trivial(CurveSpec.gm(), 2)):
        for p in E.curve.points():
            L = restrict(E, p)
            lc = stabilized_cohomology(L)
            again = stabilized_cohomology(L, min_truncation=2 * lc.truncation_used)
            assert again.dims == lc.dims


def test_residue_theorem_on_random_forms():
    rng = random.Random(14)
    curve = CurveSpec((F(0), F(1), F(-2)))
    for _ in range(20):
        f = random_connection(rng, curve, 1, max_degree=3, max_pole=3, density=1).matrix[0][0]
        assert sum(residue(restrict_form(f, p, 0)) for p in curve.points()) == 0
