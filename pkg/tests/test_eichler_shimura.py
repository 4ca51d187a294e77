import random
from fractions import Fraction

import pytest

from overconv.distributions import Distribution, dirac, integrate_k
from overconv.eichler_shimura import (canonical_degree_bound, canonical_degree_closed_form, es_equivariance_check,
                                      es_kernel, factor_weight_k_check, mobius_period, up_shift)
from overconv.monoid import MonoidMatrix, PeriodPoint
from overconv.padic import PadicContext
from overconv.rings import CoeffRing
from overconv.suites import random_k0
from overconv.weights import Weight, integer_weight

P = 3
CTX = PadicContext(P, 12)
R = CoeffRing.qp(CTX)
RNG = random.Random(21)


def rand_mu(J=72):
    return Distribution(R, 1, tuple(R(RNG.randrange(P ** 12)) for _ in range(J)))


def pt(z, w=1):
    return PeriodPoint.make(CTX, z, w)


def test_mobius_examples():
    z = pt(9)
    assert mobius_period(MonoidMatrix(1, 0, 0, 1, P), z).z == z.z
    assert mobius_period(MonoidMatrix(1, 0, P, 1, P), pt(0)).z.lift() == P
    with pytest.raises(ValueError):
        mobius_period(MonoidMatrix(P, 0, 0, 1, P), z)


def test_mobius_isometry_and_stability():
    for _ in range(100):
        g = random_k0(RNG, P)
        z, s = pt(P * RNG.randrange(P ** 11)), pt(P * RNG.randrange(P ** 11))
        gz, gs = mobius_period(g, z), mobius_period(g, s)
        assert gz.in_neighbourhood()
        assert (gz.z - gs.z).valuation() == (z.z - s.z).valuation()


def test_mobius_is_a_right_action():
    for _ in range(25):
        g1, g2 = random_k0(RNG, P), random_k0(RNG, P)
        z = pt(P * RNG.randrange(P ** 11))
        assert mobius_period(g1 @ g2, z).z == mobius_period(g2, mobius_period(g1, z)).z


def test_up_shift_examples():
    a = up_shift(pt(0))
    assert a.z.is_zero() and a.w == 2
    b = up_shift(pt(P))
    assert b.z.lift() == P * P and b.w == 2
    for _ in range(20):
        c = up_shift(pt(P * RNG.randrange(P ** 10), Fraction(RNG.randrange(1, 5), 2)))
        assert c.in_neighbourhood()


def test_kernel_at_zero_and_weight_k():
    mu = rand_mu()
    v = es_kernel(integer_weight(5, CTX), mu, pt(0), 7)
    assert (v - mu.moments[0] * 7).is_zero()
    for k in (2, 3, 6):
        z = pt(P * RNG.randrange(P ** 11))
        poly = integrate_k(mu, k)
        expected = sum((c * z.z ** i for i, c in enumerate(poly.coeffs)), R.zero())
        assert (es_kernel(integer_weight(k, CTX), mu, z) - expected).is_zero()


@pytest.mark.parametrize("p", [3, 5])
def test_equivariance(p):
    ctx = PadicContext(p, 12)
    ring = CoeffRing.qp(ctx)
    w = Weight(ring, 1, 1 + p * 7)
    mu = Distribution(ring, 1, tuple(ring(RNG.randrange(p ** 12)) for _ in range(24 * p)))
    z = PeriodPoint.make(ctx, p * 5)
    assert es_equivariance_check(w, mu, MonoidMatrix(1, 0, 0, 1, p), z).passed
    for _ in range(3):
        rep = es_equivariance_check(w, mu, random_k0(RNG, p), z, min_precision=12)
        assert rep.passed and rep.precision == 12
    data = rep.to_data()
    assert set(data) == {"check", "instance", "pass", "certified_precision"}


def test_equivariance_weight_k_by_hand():
    # for k = 4 both sides are polynomials in the moments; compare with a direct expansion
    k = 4
    w = integer_weight(k, CTX)
    for _ in range(5):
        a = RNG.randrange(100)
        mu = dirac(a, 1, 72, R)
        g = random_k0(RNG, P)
        z = pt(P * RNG.randrange(P ** 8))
        rep = es_equivariance_check(w, mu, g, z, min_precision=12)
        assert rep.passed
        direct = (g.c * a + g.d + z.z * (g.a * a + g.b)) ** (k - 2)
        lhs = es_kernel(w, mu, z)
        assert (lhs - (1 + z.z * a) ** (k - 2)).is_zero()
        from overconv.distributions import act_left
        assert (es_kernel(w, act_left(g, mu, w), z) - direct).is_zero()


def test_factor_weight_k():
    mu = rand_mu()
    assert factor_weight_k_check(mu, 2, pt(9)).passed
    for _ in range(10):
        k = RNG.randrange(2, 9)
        a = RNG.randrange(50)
        z = pt(P * RNG.randrange(P ** 11))
        assert factor_weight_k_check(dirac(a, 1, 72, R), k, z, min_precision=12).passed
        assert (es_kernel(integer_weight(k, CTX), dirac(a, 1, 72, R), z) - (1 + a * z.z) ** (k - 2)).is_zero()


def test_degree_bound():
    assert canonical_degree_bound(1, 3) == Fraction(2, 3)
    assert canonical_degree_bound(2, 3) == Fraction(8, 9)
    prev = Fraction(0)
    for n in range(1, 31):
        d = canonical_degree_bound(n, 5)
        assert d == canonical_degree_closed_form(n, 5) and prev < d < 1
        prev = d
