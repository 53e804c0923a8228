"""Reference connections: the four worked examples and a seeded random generator."""

from __future__ import annotations

import random
from fractions import Fraction

from .connection import Connection, CurveSpec
from .exactlin import Poly, RegFun


def trivial_affine_line() -> Connection:
    return Connection.trivial(CurveSpec.affine_line())


def trivial_gm() -> Connection:
    return Connection.trivial(CurveSpec.gm())


def kummer(alpha=Fraction(1, 2)) -> Connection:
    """d + alpha dt/t on G_m."""
    return Connection.from_entries(CurveSpec.gm(), [[RegFun(Poly.constant(alpha), [(0, 1)])]])


def exponential() -> Connection:
    """d + d(1/t) on G_m, i.e. A = -1/t^2."""
    return Connection.from_entries(CurveSpec.gm(), [[RegFun(Poly.constant(-1), [(0, 2)])]])


EXAMPLES = {
    "trivial-A1": trivial_affine_line,
    "trivial-Gm": trivial_gm,
    "kummer-half": kummer,
    "exponential": exponential,
}


def random_connection(
    rng: random.Random,
    curve: CurveSpec,
    rank: int,
    max_degree: int = 2,
    max_pole: int = 2,
    coeff_range: int = 3,
    density: float = 0.7,
) -> Connection:
    """Entries num / prod (t - c)^m with small integer coefficients; about ``density`` of them nonzero."""
    rows = []
    for _ in range(rank):
        row = []
        for _ in range(rank):
            if rng.random() > density:
                row.append(RegFun())
                continue
            deg = rng.randint(0, max_degree)
            num = Poly([rng.randint(-coeff_range, coeff_range) for _ in range(deg + 1)])
            poles = [(c, rng.randint(0, max_pole)) for c in curve.finite_points]
            row.append(RegFun(num, poles))
        rows.append(row)
    return Connection.from_entries(curve, rows)
