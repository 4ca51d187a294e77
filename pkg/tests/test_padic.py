import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from overconv.padic import (PadicContext, PadicElement, PadicError, eta, legendre, parse, serialize,
                            teichmuller, valp_factorial_floor, valuation)


def test_factorial_floor_examples():
    assert valp_factorial_floor(0, 1, PadicContext(3, 5)) == 0
    assert valp_factorial_floor(9, 1, PadicContext(3, 5)) == 1
    assert valp_factorial_floor(25, 0, PadicContext(5, 5)) == 6


@pytest.mark.parametrize("p", [3, 5, 7])
def test_factorial_floor_bound(p):
    ctx = PadicContext(p, 5)
    for s in range(4):
        for j in range(201):
            v = valp_factorial_floor(j, s, ctx)
            assert v == valuation(math.factorial(j // p ** s), p)
            assert v <= Fraction(j, p ** s * (p - 1))


def test_p_two_rejected():
    with pytest.raises(ValueError):
        PadicContext(2, 5)


def test_teichmuller_examples():
    assert teichmuller(1, PadicContext(3, 8)).lift() == 1
    assert teichmuller(2, PadicContext(5, 2)).lift() == 7
    ctx = PadicContext(7, 10)
    rng = random.Random(0)
    for _ in range(20):
        b = rng.randrange(1, 7 ** 10)
        if b % 7 == 0:
            continue
        w = teichmuller(b, ctx)
        assert (w ** 6).lift() == 1
        assert w.residue(1) == b % 7
    with pytest.raises(PadicError):
        teichmuller(3, PadicContext(3, 4))


def test_eta_examples():
    ctx = PadicContext(3, 10)
    assert eta(1, ctx).is_zero()
    assert (eta(4, ctx) - 1).is_zero()
    assert (eta(16, ctx) - 2).is_zero()


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 5 ** 12), st.integers(1, 5 ** 12))
def test_eta_homomorphism(a, b):
    ctx = PadicContext(5, 12)
    if a % 5 == 0 or b % 5 == 0:
        return
    d = eta(a * b, ctx) - eta(a, ctx) - eta(b, ctx)
    assert d.is_zero()
    assert d.prec >= ctx.N - 1


@settings(max_examples=60, deadline=None)
@given(st.integers(-10 ** 9, 10 ** 9), st.integers(-10 ** 9, 10 ** 9).filter(lambda x: x != 0))
def test_field_arithmetic_matches_rationals(a, b):
    ctx = PadicContext(3, 15)
    x, y = ctx(a), ctx(b)
    q = Fraction(a, b)
    z = x / y
    assert (z - PadicElement.from_value(ctx, q)).is_zero()
    assert ((x + y) - ctx(a + b)).is_zero()
    assert ((x * y) - ctx(a * b)).is_zero()


def test_precision_propagation():
    ctx = PadicContext(3, 10)
    x = PadicElement.from_value(ctx, 5, 4)
    y = ctx(9)
    assert (x + y).prec == 4
    assert (x * y).prec == 6  # valuation shift
    assert legendre(9, 3) == 4


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 3 ** 12 - 1), st.integers(1, 12))
def test_serialize_roundtrip(n, prec):
    ctx = PadicContext(3, 12)
    x = PadicElement.from_value(ctx, n, prec)
    assert parse(serialize(x), ctx) == x


def test_parse_rejects_noncanonical():
    ctx = PadicContext(3, 12)
    for bad in ["3^0 * 3 + O(3^4)", "5^0 * 1 + O(5^4)", "junk", "3^0 * 1 + O(3^40)"]:
        with pytest.raises(ValueError):
            parse(bad, ctx)
