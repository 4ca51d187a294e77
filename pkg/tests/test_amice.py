import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from overconv.amice import (AmiceFunction, act_right, amice_from_values, basis_values, evaluate,
                            lambda_valuation, restriction_scale)
from overconv.monoid import MonoidMatrix
from overconv.padic import PadicContext, valuation
from overconv.rings import CoeffRing
from overconv.weights import integer_weight

CTX = PadicContext(3, 12)
R = CoeffRing.qp(CTX)


def _coeffs(f):
    return [c.lift() for c in f.coeffs]


def test_interpolation_examples():
    assert _coeffs(amice_from_values([1] * 6, 1, R)) == [1, 0, 0, 0, 0, 0]
    assert _coeffs(amice_from_values(list(range(6)), 0, R)) == [0, 1, 0, 0, 0, 0]
    e3 = [math.comb(x, 3) for x in range(9)]  # e_3^1 = 1! binom(x, 3) for p = 3
    assert _coeffs(amice_from_values(e3, 1, R)) == [0, 0, 0, 1, 0, 0, 0, 0, 0]


def test_evaluate_examples():
    one = amice_from_values([1] * 5, 1, R)
    assert all((evaluate(one, x) - 1).is_zero() for x in (0, 7, 123))
    for j in range(1, 8):
        assert evaluate(AmiceFunction.basis(R, 1, j, 8), 0).is_zero()


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2), st.lists(st.integers(0, 3 ** 12 - 1), min_size=1, max_size=27))
def test_roundtrip(s, values):
    f = amice_from_values(values, s, R)
    for x, v in enumerate(values):
        y = evaluate(f, x)
        assert y.residue(y.prec) == v % 3 ** y.prec


def test_integral_coefficients_give_integral_values():
    # e_j^s(Z_p + p^s Z_p) lies in Z_p
    rng = random.Random(0)
    for s in (0, 1, 2):
        for x in [rng.randrange(10 ** 6) for _ in range(10)]:
            assert all(isinstance(v, int) for v in basis_values(x, 40, s, 3))


def test_restriction_scale_examples():
    assert restriction_scale(0, 1, 3) == 1
    assert restriction_scale(3, 1, 3) == 6
    assert restriction_scale(9, 1, 3) == math.factorial(9) // math.factorial(3)
    assert valuation(restriction_scale(9, 1, 3), 3) == 3 == lambda_valuation(9, 1, 3)
    for j in range(60):
        assert valuation(restriction_scale(j, 2, 3), 3) == lambda_valuation(j, 2, 3)


def test_act_right_identity_and_translation():
    w2 = integer_weight(2, CTX)
    f = amice_from_values(list(range(8)), 0, R)
    assert _coeffs(act_right(f, w2, MonoidMatrix(1, 0, 0, 1, 3))) == _coeffs(f)
    g = act_right(f, w2, MonoidMatrix(1, 1, 0, 1, 3))
    assert _coeffs(g)[:3] == [1, 1, 0]


def test_act_right_unipotent_is_translation():
    w2 = integer_weight(2, CTX)
    rng = random.Random(3)
    f = AmiceFunction(R, 1, tuple(R(rng.randrange(3 ** 12)) for _ in range(12)))
    g = act_right(f, w2, MonoidMatrix(1, 5, 0, 1, 3))
    for x in range(50):
        a, b = evaluate(g, x), evaluate(f, x + 5)
        assert (a - b).is_zero()


def test_act_right_weight_factor():
    w = integer_weight(4, CTX)
    f = AmiceFunction(R, 1, tuple(R(1) if j == 0 else R(0) for j in range(12)))
    gamma = MonoidMatrix(1, 0, 3, 2, 3)
    g = act_right(f, w, gamma)
    for x in range(12):
        assert (evaluate(g, x) - (3 * x + 2) ** 2).is_zero()


def test_act_right_rejects_non_monoid():
    with pytest.raises(ValueError):
        MonoidMatrix(1, 0, 1, 1, 3)  # c is not divisible by p
