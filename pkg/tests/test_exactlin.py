from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fbx.exactlin import (
    INF,
    ExpressionError,
    MatrixQ,
    Poly,
    PrecisionError,
    RegFun,
    SparseEchelon,
    TruncLaurent,
    laurent_expand,
    mat_cokernel,
    mat_kernel,
    mat_rank,
    mat_solve,
    parse_regfun,
)

from conftest import regfuns

F = Fraction


def series(terms, prec=None):
    return TruncLaurent.from_dict({e: F(c) for e, c in terms.items()}, prec)


# -- matrices ---------------------------------------------------------------


def test_kernel_examples():
    assert mat_kernel(MatrixQ(0, 0, [])) == []
    assert mat_kernel(MatrixQ.identity(3)) == []
    (v,) = mat_kernel(MatrixQ(2, 2, [[1, 1], [2, 2]]))
    assert v[0] == -v[1] != 0


def test_cokernel_examples():
    assert mat_cokernel(MatrixQ.identity(2))[0] == 0
    assert mat_cokernel(MatrixQ.zeros(2, 0))[0] == 2
    dim, proj = mat_cokernel(MatrixQ(2, 1, [[1], [1]]))
    assert dim == 1
    assert (proj @ MatrixQ(2, 1, [[1], [1]])).is_zero()


matrices = st.integers(0, 4).flatmap(
    lambda r: st.integers(0, 4).flatmap(
        lambda c: st.lists(
            st.lists(st.integers(-3, 3), min_size=c, max_size=c), min_size=r, max_size=r
        ).map(lambda rows: MatrixQ(r, c, rows))
    )
)


@given(matrices)
@settings(max_examples=60, deadline=None)
def test_rank_nullity(m):
    rank = mat_rank(m)
    kernel = mat_kernel(m)
    assert len(kernel) + rank == m.cols
    for v in kernel:
        assert all(x == 0 for x in m.apply(v))
    dim, proj = mat_cokernel(m)
    assert dim + rank == m.rows
    assert proj.rows == dim and (m.cols == 0 or (proj @ m).is_zero())
    assert mat_rank(proj) == dim


@given(matrices, st.lists(st.integers(-3, 3), min_size=4, max_size=4))
@settings(max_examples=40, deadline=None)
def test_solve_consistent(m, x):
    x = x[: m.cols]
    rhs = m.apply(x)
    sol = mat_solve(m, rhs)
    assert sol is not None and m.apply(sol) == rhs


def test_sparse_echelon_express():
    ech = SparseEchelon(priority=lambda k: k)
    assert ech.add({0: 1, 1: 1}, {"a": 1}) is None
    assert ech.add({1: 1, 2: 1}, {"b": 1}) is None
    combo = ech.express({0: 1, 2: -1})
    assert combo == {"a": 1, "b": -1}
    assert ech.express({3: 1}) is None
    assert ech.add({0: 2, 1: 3, 2: 1}, {"c": 1}) == {"c": 1, "a": -2, "b": -1}


# -- Laurent expansion -------------------------------------------------------


def test_laurent_expand_examples():
    assert laurent_expand(parse_regfun("1/t", [0]), F(0), 3).terms() == {-1: 1}
    assert laurent_expand(parse_regfun("1/t", [0]), INF, 3).terms() == {1: 1}
    got = laurent_expand(parse_regfun("1/(t*(t-1))", [0, 1]), F(0), 2)
    assert got == series({-1: -1, 0: -1, 1: -1, 2: -1}, 2)


@given(regfuns(), regfuns(), st.sampled_from([F(0), F(1), INF]))
@settings(max_examples=60, deadline=None)
def test_expansion_is_ring_homomorphism(f, g, point):
    n = 6
    ef, eg = laurent_expand(f, point, n), laurent_expand(g, point, n)
    prod = ef * eg
    direct = laurent_expand(f * g, point, n + 10)
    assert prod.agrees_with(direct)
    assert laurent_expand(f + g, point, n) == (ef + eg).truncate(n)


def test_precision_rules():
    a = series({0: 1, 1: 2}, 3)
    b = series({-1: 1}, 5)
    assert (a + b).prec == 3
    assert (a * b).prec == 2
    with pytest.raises(PrecisionError):
        a.coeff(4)
    assert TruncLaurent.zero(4).valuation is None


# -- regular functions -------------------------------------------------------


@given(regfuns(), regfuns())
@settings(max_examples=50, deadline=None)
def test_partial_fractions_round_trip(f, g):
    h = f * g + f
    assert RegFun.from_partial_fractions(h.partial_fractions()) == h


@given(regfuns(), st.integers(2, 7))
@settings(max_examples=40, deadline=None)
def test_evaluation_matches_arithmetic(f, x):
    g = f * f - f
    assert g(F(x)) == f(F(x)) ** 2 - f(F(x))


def test_derivative():
    f = parse_regfun("t^3 + 1/(t-1)^2", [1])
    assert f.derivative() == parse_regfun("3*t^2 - 2/(t-1)^3", [1])


# -- expression grammar ------------------------------------------------------


@pytest.mark.parametrize(
    "text,points,value_at_2",
    [
        ("1/2 * 1/t", [0], F(1, 4)),
        ("(t+1)^2 - 3/4", [], F(33, 4)),
        ("-1/t^2", [0], F(-1, 4)),
        ("  t / (t - 1) ", [1], F(2)),
    ],
)
def test_parse_examples(text, points, value_at_2):
    assert parse_regfun(text, points)(F(2)) == value_at_2


@pytest.mark.parametrize(
    "text,points",
    [("1/(t-2)", [0]), ("", []), ("t**2", []), ("sin(t)", []), ("1/(t^2-1)", [1]), ("t^(1/2)", []), ("1/0", [])],
)
def test_parse_rejects(text, points):
    with pytest.raises(ExpressionError):
        parse_regfun(text, points)


def test_poly_basics():
    p = Poly([1, 0, 1])
    q, r = (p * Poly([-1, 1]) + Poly([3])).divmod(Poly([-1, 1]))
    assert q == p and r == Poly([3])
    assert p.taylor_shift(1) == Poly([2, 2, 1])
