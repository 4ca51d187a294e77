import pytest

from overconv.complexes import (BSComplexTemplate, TemplateError, cohomology, instantiate, tower_compatible,
                                utilde_fredholm)
from overconv.distributions import quotient_log_order
from overconv.padic import PadicContext
from overconv.rings import CoeffRing
from overconv.snf import FiniteModule, cohomology_invariants
from overconv.suites import koszul_template, up_template
from overconv.weights import Weight, integer_weight

P = 3
CTX = PadicContext(P, 8)
W = integer_weight(4, CTX)
I = [[1, 0], [0, 1]]


def template(data):
    return BSComplexTemplate.from_data(data, P)


def logp(n):
    e = 0
    while n > 1:
        n //= P
        e += 1
    return e


def test_zero_boundaries():
    t = template({"ranks": [1, 2, 1], "boundaries": [[[[]], [[]]], [[[], []]]]})
    C = instantiate(t, W, 2)
    H = cohomology(C)
    assert [sum(logp(d) for d in h) for h in H] == C.log_orders() == [9, 18, 9]


def test_congruence_boundary_is_zero():
    for k in (1, 2, 3):
        g = [[1 + P ** (1 + k), 0], [0, 1]]
        C = instantiate(template({"ranks": [1, 1], "boundaries": [[[[[1, g], [-1, I]]]]]}), W, k)
        assert all(not any(row) or C.modules[1].is_zero_vector(list(col))
                   for row in C.maps[0] for col in zip(*C.maps[0]))
        assert [sum(logp(d) for d in h) for h in cohomology(C)] == C.log_orders()


def test_euler_characteristic_rank_pattern():
    for k in (1, 2):
        t = koszul_template(P, 1, 4)
        C = instantiate(t, W, k)
        assert C.log_orders() == [r * quotient_log_order(W.ring, 1, k) for r in (1, 2, 1)]
        H = cohomology(C)
        assert sum((-1) ** i * sum(logp(d) for d in h) for i, h in enumerate(H)) == 0


def test_times_p_on_cyclic_group():
    Z9 = FiniteModule.from_exponents(P, [2])
    assert cohomology_invariants([Z9, Z9], [[[P]]]) == [[P], [P]]
    zero = FiniteModule(0, ())
    assert cohomology_invariants([zero], []) == [[]]


def test_contractible_complex():
    t = template({"ranks": [1, 1], "boundaries": [[[[[1, I]]]]]})
    assert cohomology(instantiate(t, W, 2)) == [[], []]


def test_bad_templates_rejected():
    with pytest.raises(TemplateError):
        template({"ranks": [1, 1], "boundaries": []})
    with pytest.raises(TemplateError):
        template({"ranks": [1], "boundaries": [], "extra": 1})
    with pytest.raises(TemplateError):
        template({"ranks": [1, 1], "boundaries": [[[[[1, [[1, 0], [1, 1]]]]]]]})  # c not divisible by p
    with pytest.raises(TemplateError):
        instantiate(template({"ranks": [1, 1, 1], "boundaries": [[[[[1, I]]]], [[[[1, I]]]]]}), W, 2)
    with pytest.raises(TemplateError):
        # U = u_1 does not commute with d = u_1 - 1 composed with the diagonal... use a non-chain lift
        instantiate(template({"ranks": [1, 1], "boundaries": [[[[[1, [[1, 1], [0, 1]]], [-1, I]]]]],
                              "utilde": [[[[[1, I]]]], [[[[2, I]]]]]}), W, 2)


def test_template_roundtrip():
    t = koszul_template(P, 2, 5)
    assert BSComplexTemplate.from_data(t.to_data(), P) == t


def test_identity_lift_series():
    t = koszul_template(P, 1, 4)
    for r in utilde_fredholm(instantiate(t, W, 2)):
        n = len(r.matrix)
        coeffs = [c.residue(r.precision) for c in r.series.coeffs]
        from math import comb
        assert coeffs == [comb(n, i) * (-1) ** i % P ** r.precision for i in range(n + 1)]


def test_multiplication_by_p():
    t = template({"ranks": [1], "boundaries": [], "utilde": [[[[[P, I]]]]]})
    (r,) = utilde_fredholm(instantiate(t, W, 2))
    # D/Fil^2 = (Z/p^2)^3 + (Z/p)^3: U is p on every generator
    assert sorted(r.invariants) == [3, 3, 3, 9, 9, 9]
    assert all(r.matrix[i][j] == (P % r.invariants[i] if i == j else 0)
               for i in range(6) for j in range(6))
    assert r.precision == 1
    assert [c.residue(1) for c in r.series.coeffs] == [1, 0, 0, 0, 0, 0, 0]


def test_tower_compatibility():
    for k in (2, 3):
        assert tower_compatible(up_template(P, 1 + k), W, k)


def test_iwasawa_coefficients():
    ctx = PadicContext(3, 6)
    S = CoeffRing.iwasawa(ctx, 1, 2)
    T = S.gen(0)
    w = Weight(S, 1, S(4) * (1 + 3 * T))
    C = instantiate(koszul_template(P, 1, 2, with_up=False), w, 1)
    H = cohomology(C)
    assert sum((-1) ** i * sum(logp(d) for d in h) for i, h in enumerate(H)) == 0
