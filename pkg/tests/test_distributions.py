import math
import random

import pytest

from overconv.amice import AmiceFunction, evaluate
from overconv.distributions import (Distribution, FiniteDistribution, Lk_act, WeightKPolynomial, act_left,
                                    act_on_quotient, amice_transform, dirac, fil_quotient, integrate_k, pair,
                                    quotient_log_order, specialize_character, specialize_weight,
                                    stored_indices)
from overconv.monoid import MonoidMatrix
from overconv.padic import PadicContext, PadicElement
from overconv.rings import CoeffRing
from overconv.suites import random_delta0
from overconv.weights import Weight, integer_weight

CTX = PadicContext(3, 10)
R = CoeffRing.qp(CTX)
RNG = random.Random(11)


def rand_mu(J=24, s=1, ring=R):
    return Distribution(ring, s, tuple(ring(RNG.randrange(3 ** 10)) for _ in range(J)))


def low_function(J=24, low=6, s=1):
    return AmiceFunction(R, s, tuple(R(RNG.randrange(3 ** 10)) if j < low else R(0) for j in range(J)))


def test_dirac_examples():
    assert [m.lift() for m in dirac(0, 1, 6, R).moments] == [1, 0, 0, 0, 0, 0]
    assert [m.lift() for m in dirac(1, 0, 5, R).moments] == [1, 1, 0, 0, 0]
    for _ in range(20):
        a = RNG.randrange(1000)
        f = AmiceFunction(R, 1, tuple(R(RNG.randrange(3 ** 10)) for _ in range(15)))
        assert (pair(dirac(a, 1, 15, R), f) - evaluate(f, a)).is_zero()


def test_pair_bilinear_and_zero():
    zero = AmiceFunction(R, 1, tuple(R(0) for _ in range(24)))
    assert pair(rand_mu(), zero).is_zero()
    for _ in range(10):
        m1, m2, f = rand_mu(), rand_mu(), low_function()
        assert (pair(m1 + m2, f) - pair(m1, f) - pair(m2, f)).is_zero()


def test_act_left_identity_and_dirac():
    w = integer_weight(5, CTX)
    mu = rand_mu()
    nu = act_left(MonoidMatrix(1, 0, 0, 1, 3), mu, w)
    assert all((a - b).is_zero() for a, b in zip(nu.moments, mu.moments))
    for _ in range(10):
        g = random_delta0(RNG, 3, 10)
        a = RNG.randrange(50)
        f = low_function(J=36, low=6)
        lhs = pair(act_left(g, dirac(a, 1, 36, R), w), f)
        y = CTX(g.a * a + g.b) / CTX(g.c * a + g.d)
        rhs = evaluate(f, y) * (g.c * a + g.d) ** 3
        assert lhs.prec >= 1 and R(lhs - rhs, lhs.prec).is_zero()


def test_fil_quotient_examples():
    mu = rand_mu()
    assert fil_quotient(mu, 0).entries == ()
    assert list(stored_indices(1, 3, 1)) == [0, 1, 2]
    for k in (1, 2, 3):
        q = fil_quotient(mu, k)
        assert q.scale(3 ** k).is_zero()
        assert quotient_log_order(R, 1, k) == 3 * k * (k + 1) // 2


def test_quotient_action():
    w = integer_weight(4, CTX)
    for k in (1, 2, 3):
        mu = rand_mu(J=3 * k + 6)
        q = fil_quotient(mu, k)
        assert act_on_quotient(MonoidMatrix(1, 0, 0, 1, 3), q, w) == q
        g = MonoidMatrix(1 + 3 ** (k + 1), 3 ** (k + 1), 2 * 3 ** (k + 1), 1, 3)
        assert act_on_quotient(g, q, w) == q
    for _ in range(20):
        mu = rand_mu(J=30)
        g = random_delta0(RNG, 3)
        assert fil_quotient(act_left(g, mu, w), 3) == act_on_quotient(g, fil_quotient(mu, 3), w)


def test_quotient_serialization():
    q = fil_quotient(rand_mu(), 2)
    assert FiniteDistribution.from_data(q.to_data()) == q
    mu = rand_mu()
    assert Distribution.from_data(mu.to_data()) == mu


def test_iwasawa_quotients_and_specialization():
    ctx = PadicContext(3, 6)
    S = CoeffRing.iwasawa(ctx, 1, 4)
    T = S.gen(0)
    w = Weight(S, 1, S(4) * (1 + 3 * T))

    def rel():
        return S({(i,): RNG.randrange(3 ** 6) for i in range(5)})

    for k in (1, 2):
        q = FiniteDistribution.from_elements(S, 1, k, [rel() for _ in range(3 * k)])
        g1, g2 = random_delta0(RNG, 3, 10), random_delta0(RNG, 3, 10)
        assert act_on_quotient(g1, act_on_quotient(g2, q, w), w) == act_on_quotient(g1 @ g2, q, w)
        assert q.scale(3 ** k).is_zero()
    mu = Distribution(S, 1, tuple(rel() for _ in range(12)))
    at0 = specialize_weight(mu, [ctx(0)])
    assert all((a - m.constant_term()).is_zero() for a, m in zip(at0.moments, mu.moments))
    assert specialize_weight(rand_mu(), None) is not None
    for _ in range(5):
        g = random_delta0(RNG, 3, 10)
        pt = [ctx(3 * RNG.randrange(9))]
        A = specialize_weight(act_left(g, mu, w), pt)
        B = act_left(g, specialize_weight(mu, pt), specialize_character(w, pt))
        for j in range(A.J):
            prec = min(A.moment_precision(j), B.moment_precision(j))
            assert PadicElement.from_value(ctx, A.moments[j] - B.moments[j], max(prec, 0)).is_zero()


def test_integrate_examples():
    mu = rand_mu()
    assert integrate_k(mu, 2).coeffs[0] == mu.moments[0]
    ctx = PadicContext(3, 16)
    Q = CoeffRing.qp(ctx)
    for a in (0, 1, 5, 22):
        P = integrate_k(dirac(a, 1, 20, Q), 6)
        assert [c.lift() for c in P.coeffs] == [math.comb(4, j) * a ** j % 3 ** 16 for j in range(5)]


def test_integration_equivariance():
    ctx = PadicContext(3, 16)
    Q = CoeffRing.qp(ctx)
    for k in range(2, 9):
        w = integer_weight(k, ctx)
        mu = Distribution(Q, 1, tuple(Q(RNG.randrange(3 ** 16)) for _ in range(96)))
        g = random_delta0(RNG, 3)
        A = integrate_k(act_left(g, mu, w), k)
        B = Lk_act(g, integrate_k(mu, k))
        assert A == B and A.precision() >= 16


def test_Lk_act_examples():
    P = WeightKPolynomial(3, (0, 1))
    assert Lk_act(MonoidMatrix(1, 1, 0, 1, 3), P) == WeightKPolynomial(3, (0, 1))
    assert Lk_act(MonoidMatrix(1, 1, 0, 1, 3), WeightKPolynomial(3, (1, 0))) == WeightKPolynomial(3, (1, 1))
    assert Lk_act(MonoidMatrix(1, 0, 0, 1, 3), WeightKPolynomial(5, (1, 2, 3, 4))) == WeightKPolynomial(5, (1, 2, 3, 4))
    for _ in range(25):
        g1, g2 = random_delta0(RNG, 3, 8), random_delta0(RNG, 3, 8)
        P = WeightKPolynomial(6, tuple(RNG.randrange(-9, 9) for _ in range(5)))
        assert Lk_act(g1, Lk_act(g2, P)) == Lk_act(g1 @ g2, P)


def test_amice_transform_examples():
    assert [c.lift() for c in amice_transform(dirac(0, 1, 5, R))] == [1, 0, 0, 0, 0]
    assert [c.lift() for c in amice_transform(dirac(1, 1, 5, R))] == [1, 1, 0, 0, 0]
    with pytest.raises(Exception):
        amice_transform(dirac(0, 1, 5, R), 9)
