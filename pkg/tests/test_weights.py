import random

import pytest

from overconv.monoid import MonoidMatrix, PeriodPoint
from overconv.padic import PadicContext
from overconv.rings import CoeffRing
from overconv.weights import (AFFINOID, Weight, WeightError, char_extend, char_of_mobius_factor, integer_weight,
                              s_min)


def test_integer_weight_examples():
    ctx = PadicContext(3, 5)
    w2 = integer_weight(2, ctx)
    assert w2.t == 0 and (w2.c - 1).is_zero()
    assert integer_weight(4, ctx).c.lift() == 16


@pytest.mark.parametrize("p", [3, 5])
def test_integer_weight_is_a_power(p):
    ctx = PadicContext(p, 12)
    rng = random.Random(p)
    for k in range(2, 9):
        w = integer_weight(k, ctx)
        for _ in range(30):
            b = rng.randrange(1, p ** 12)
            if b % p:
                v = char_extend(w, b)
                assert v.residue(v.prec) == pow(b, k - 2, p ** v.prec)
                assert v.prec >= ctx.N - 3


def test_s_min_examples():
    ctx = PadicContext(3, 10)
    R = CoeffRing.qp(ctx)
    assert s_min(Weight(R, 0, 1)) == 0
    assert all(s_min(integer_weight(k, ctx)) == 0 for k in range(2, 10))
    assert s_min(Weight(R, 0, 4)) == 0
    with pytest.raises(WeightError):
        Weight(R, 0, 2)


def test_char_extend_examples():
    ctx = PadicContext(3, 10)
    R = CoeffRing.qp(ctx)
    assert (char_extend(integer_weight(5, ctx), 1) - 1).is_zero()
    w = Weight(R, 0, 4)  # the projection to one-units
    v = char_extend(w, 10)
    assert (v - 10).is_zero()


def test_char_extend_multiplicative():
    ctx = PadicContext(5, 10)
    R = CoeffRing.qp(ctx)
    rng = random.Random(1)
    for _ in range(20):
        w = Weight(R, rng.randrange(4), 1 + 5 * rng.randrange(1, 5 ** 9))
        a, b = rng.randrange(1, 5 ** 10), rng.randrange(1, 5 ** 10)
        if a % 5 and b % 5:
            d = char_extend(w, a * b) - char_extend(w, a) * char_extend(w, b)
            assert d.is_zero()


def test_mobius_factor_examples_and_cocycle():
    p = 3
    ctx = PadicContext(p, 10)
    w = integer_weight(5, ctx)
    z = PeriodPoint.make(ctx, 6)
    assert (char_of_mobius_factor(w, MonoidMatrix(1, 0, 0, 1, p), z) - 1).is_zero()
    g = MonoidMatrix(2, 5, 3, 7, p)
    assert (char_of_mobius_factor(w, g, z) - (5 * 6 + 7) ** 3).is_zero()
    from overconv.eichler_shimura import mobius_period
    rng = random.Random(2)
    for _ in range(25):
        g1 = MonoidMatrix(1 + 3 * rng.randrange(9), rng.randrange(9), 3 * rng.randrange(9), 1 + 3 * rng.randrange(9), p)
        g2 = MonoidMatrix(1 + 3 * rng.randrange(9), rng.randrange(9), 3 * rng.randrange(9), 1 + 3 * rng.randrange(9), p)
        if not (g1.in_K0p() and g2.in_K0p()):
            continue
        lhs = char_of_mobius_factor(w, g1 @ g2, z)
        rhs = char_of_mobius_factor(w, g1, z) * char_of_mobius_factor(w, g2, mobius_period(g1, z))
        assert (lhs - rhs).is_zero()


def test_affinoid_kind_needs_qp():
    ctx = PadicContext(3, 6)
    with pytest.raises(WeightError):
        Weight(CoeffRing.iwasawa(ctx, 1, 2), 0, 4, AFFINOID)


def test_weight_roundtrip():
    ctx = PadicContext(3, 6)
    w = Weight(CoeffRing.qp(ctx), 1, 31)
    assert Weight.from_data(w.to_data()) == w
