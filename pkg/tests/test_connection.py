from __future__ import annotations

import random
from fractions import Fraction

import pytest

from fbx.connection import Connection, CurveError, CurveSpec, DivisorPoint, de_rham_gmc, dual, end, tensor
from fbx.exactlin import INF, RegFun, Window, parse_regfun
from fbx.gmc import GMCError
from fbx.samples import kummer, random_connection

F = Fraction
GM = CurveSpec.gm()


def conn(curve, rows):
    return Connection.from_entries(curve, [[parse_regfun(x, curve.finite_points) for x in row] for row in rows])


def test_curve_validation():
    with pytest.raises(CurveError):
        CurveSpec((F(0), F(0)))
    with pytest.raises(CurveError):
        CurveSpec((), include_infinity=False)
    assert [str(p) for p in CurveSpec((F(1), F(0))).points()] == ["0", "1", "inf"]
    assert DivisorPoint(INF).is_infinity


def test_connection_rejects_poles_off_boundary():
    with pytest.raises(CurveError):
        Connection.from_entries(GM, [[RegFun.pole(F(2))]])


def test_dual_examples():
    assert dual(Connection.trivial(GM)).is_trivial()
    assert dual(kummer(F(1, 2))) == kummer(F(-1, 2))
    E = conn(GM, [["0", "1"], ["t + 1/t", "0"]])
    assert dual(E) == conn(GM, [["0", "-t - 1/t"], ["-1", "0"]])


def test_tensor_examples():
    E = conn(GM, [["1/t", "t"], ["2", "0"]])
    assert tensor(Connection.trivial(GM), E) == E
    assert tensor(kummer(F(1, 3)), kummer(F(1, 4))) == kummer(F(7, 12))
    assert end(kummer()).is_trivial()


def test_dual_properties():
    rng = random.Random(3)
    for _ in range(10):
        E = random_connection(rng, CurveSpec((F(0), F(1))), 2)
        G = random_connection(rng, CurveSpec((F(0), F(1))), 2)
        assert dual(dual(E)) == E
        assert dual(tensor(E, G)) == tensor(dual(E), dual(G))
        assert tensor(tensor(E, G), E).rank == 8
        assert tensor(tensor(E, G), E) == tensor(E, tensor(G, E))


def test_tensor_curve_mismatch():
    with pytest.raises(CurveError):
        tensor(Connection.trivial(GM), Connection.trivial(CurveSpec.affine_line()))


def test_de_rham_trivial_is_derivative():
    D = de_rham_gmc(Connection.trivial(CurveSpec.affine_line()), Window.make(3, {}))
    eps = D.eps[(0, 0)]
    funcs = [lab for lab, _ in D.function_basis()]
    forms = [lab for lab, _ in D.form_basis()]
    for j, lab in enumerate(funcs):
        k = lab[1]
        col = {forms[i]: x for i, x in enumerate(eps.column(j)) if x}
        assert col == ({("t", k - 1): k} if k else {})


def test_de_rham_kummer_formula():
    alpha = F(1, 2)
    D = de_rham_gmc(kummer(alpha), Window.make(2, {0: 2}))
    funcs = [lab for lab, _ in D.function_basis()]
    forms = [lab for lab, _ in D.form_basis()]
    eps = D.eps[(0, 0)]
    for j, lab in enumerate(funcs):
        k = lab[1] if lab[0] == "t" else -lab[2]
        col = {forms[i]: x for i, x in enumerate(eps.column(j)) if x}
        target = ("t", k - 1) if k >= 1 else ("p", F(0), 1 - k)
        assert col == {target: k + alpha}


def test_de_rham_form_window_too_small():
    with pytest.raises(GMCError):
        de_rham_gmc(kummer(), Window.make(2, {0: 2}), form_window=Window.make(1, {0: 1}))
