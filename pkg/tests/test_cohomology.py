from __future__ import annotations

import random
from fractions import Fraction

import pytest

from fbx.boundary import restrict_form
from fbx.cohomology import (
    InvariantError,
    boundary_pairing,
    cohomology_report,
    compact_h,
    duality_pairing_c,
    fredholm_check,
    global_h,
    global_residue_sum,
    injectivity_check,
    orientation,
    pairing_well_defined,
    tangent_complex,
)
from fbx.connection import Connection, CurveSpec, DivisorPoint, dual, end
from fbx.exactlin import INF, RegFun, TruncLaurent
from fbx.samples import EXAMPLES, exponential, kummer, random_connection, trivial_affine_line, trivial_gm

F = Fraction

GOLDEN = {
    "trivial-A1": ((1, 0), {"inf": (1, 1)}, (0, 0, 1)),
    "trivial-Gm": ((1, 1), {"0": (1, 1), "inf": (1, 1)}, (0, 1, 1)),
    "kummer-half": ((0, 0), {"0": (0, 0), "inf": (0, 0)}, (0, 0, 0)),
    "exponential": ((0, 1), {"0": (0, 0), "inf": (1, 1)}, (0, 1, 0)),
}


@pytest.mark.parametrize("name", sorted(GOLDEN))
def test_golden_dimensions(name):
    E = EXAMPLES[name]()
    R = cohomology_report(E)
    hx, hb, hc = GOLDEN[name]
    assert R.h_X.dims == hx
    assert {str(p): lc.dims for p, lc in R.h_boundary.items()} == hb
    assert R.h_c.dims == hc
    assert R.les["ok"] and R.les["alternating_sum"] == 0
    assert R.euler["chi_boundary"] == 0 and R.euler["chi_c_equals_chi_X_dual"]


def test_global_sections_and_forms_are_cocycles():
    E = exponential()
    G = global_h(E)
    (w,) = G.h1.basis
    assert w == (RegFun.constant(1),)
    for v in global_h(trivial_gm()).h0.basis:
        assert all(x.is_zero() for x in trivial_gm().apply(v))


def test_global_reduce_is_exact():
    rng = random.Random(5)
    curve = CurveSpec((F(0), F(1)))
    for _ in range(6):
        E = random_connection(rng, curve, 2)
        H = global_h(E).h1
        g = tuple(random_connection(rng, curve, 1, density=1).matrix[0][0] for _ in range(2))
        coords, prim = H.reduce(g)
        lhs = E.apply(prim)
        rhs = tuple(g[i] - sum((c * w[i] for c, w in zip(coords, H.basis)), RegFun()) for i in range(2))
        assert lhs == rhs


def test_cone_classes_are_cocycles():
    for f in EXAMPLES.values():
        E = f()
        for items in compact_h(E).classes.values():
            for c in items:
                assert c.check(E)


def test_orientation_examples():
    s_inv = TruncLaurent.monomial(-1, 1, 3)
    assert orientation({DivisorPoint(F(0)): s_inv, DivisorPoint(INF): TruncLaurent.zero(3)}) == 1
    f = RegFun.pole(F(0))
    residues = {str(p): restrict_form(f, p, 1).coeff(-1) for p in CurveSpec.gm().points()}
    assert residues == {"0": 1, "inf": -1}
    assert global_residue_sum(f, CurveSpec.gm()) == 0


def test_boundary_pairing_examples():
    bp = boundary_pairing(trivial_gm())
    assert bp[0].perfect and bp[1].perfect and bp[0].rows == 2
    assert all(v.rows == 0 and v.perfect for v in boundary_pairing(kummer()).values())
    bp = boundary_pairing(exponential())
    assert bp[0].rank == 1 and bp[1].rank == 1


def test_compact_pairing_examples():
    dp = duality_pairing_c(trivial_affine_line())
    assert dp[2].matrix != [] and dp[2].rank == 1
    dp = duality_pairing_c(trivial_gm())
    assert dp[1].rank == 1 and dp[2].rank == 1
    assert duality_pairing_c(exponential())[1].rank == 1
    for f in EXAMPLES.values():
        assert pairing_well_defined(f())


def test_duality_on_random_connections():
    rng = random.Random(6)
    for curve in (CurveSpec.gm(), CurveSpec((F(0), F(1)))):
        for _ in range(3):
            E = random_connection(rng, curve, 2)
            C, D = compact_h(E), global_h(dual(E))
            # H^2(X, E dual) = 0 on an affine curve
            assert C.dims == (0, D.dims[1], D.dims[0])
            assert all(v.perfect for v in duality_pairing_c(E).values())
            assert all(v.perfect for v in boundary_pairing(E).values())


def test_tangent_examples():
    assert tangent_complex(trivial_gm()) == {-1: 1, 0: 1, 1: 0}
    assert tangent_complex(trivial_affine_line()) == {-1: 1, 0: 0, 1: 0}
    assert tangent_complex(kummer(F(1, 3))) == tangent_complex(kummer(F(2, 5)))


def test_fredholm_examples():
    assert fredholm_check(trivial_affine_line()).end_dims == (1, 0)
    assert fredholm_check(kummer()).end_dims == (1, 1)
    rng = random.Random(8)
    E = random_connection(rng, CurveSpec.gm(), 2)
    assert fredholm_check(E).fredholm


def test_injectivity_examples():
    assert injectivity_check(trivial_affine_line())
    assert injectivity_check(trivial_gm())
    rng = random.Random(9)
    assert injectivity_check(random_connection(rng, CurveSpec((F(0), F(1))), 2))


def test_end_of_trivial_rank_two():
    E = Connection.trivial(CurveSpec.gm(), 2)
    assert global_h(end(E)).dims == (4, 4)
    assert cohomology_report(E).h_c.dims == (0, 2, 2)


def test_fredholm_failure_is_an_invariant_error(monkeypatch):
    import fbx.cohomology as coh
    from fbx.boundary import StabilizationError

    def boom(*args, **kwargs):
        raise StabilizationError("forced", {})

    monkeypatch.setattr(coh, "global_h", boom)
    with pytest.raises(InvariantError):
        coh.fredholm_check(kummer(F(1, 7)))
