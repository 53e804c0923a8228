from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import strategies as st

from fbx.connection import CurveSpec
from fbx.exactlin import Poly, RegFun

CURVES = [CurveSpec.affine_line(), CurveSpec.gm(), CurveSpec((Fraction(0), Fraction(1)))]


@st.composite
def regfuns(draw, points=(Fraction(0), Fraction(1)), max_degree=3, max_pole=2):
    """Random functions regular on P^1 minus (points and infinity)."""
    num = Poly([draw(st.integers(-4, 4)) for _ in range(draw(st.integers(0, max_degree)) + 1)])
    poles = [(c, draw(st.integers(0, max_pole))) for c in points]
    return RegFun(num, poles)


@pytest.fixture
def rng():
    return random.Random(20261016)
