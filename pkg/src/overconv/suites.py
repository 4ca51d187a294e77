"""Seeded property suites, one per mathematical statement.

Every suite draws from its own ``random.Random`` (Mersenne Twister MT19937)
seeded by the string ``"<seed>:<suite name>"``, so suites are independent
of each other and of the order they run in.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from . import __version__
from .amice import AmiceFunction, act_right, amice_from_values, evaluate, lambda_valuation
from .complexes import BSComplexTemplate, cohomology, instantiate, tower_compatible
from .distributions import (Distribution, FiniteDistribution, Lk_act, act_left, act_on_quotient,
                            amice_transform, binomial_series, fil_exponent, fil_quotient, integrate_k,
                            quotient_log_order, series_mul, stored_indices)
from .eichler_shimura import (canonical_degree_bound, canonical_degree_closed_form, es_equivariance_check,
                              factor_weight_k_check)
from .fredholm import (NotSlopeAdapted, PadicMatrix, fredholm_det, newton_polygon, slope_decompose,
                       slope_factor, specialize_family)
from .monoid import MonoidMatrix, PeriodPoint
from .padic import PadicContext
from .rings import CoeffRing
from .snf import FiniteModule
from .tensor import check_mixed_tensor_exactness
from .weights import Weight, char_extend, integer_weight

SLOPE_PRECISION = 80


@dataclass
class SuiteResult:
    name: str
    statement: str
    instances: int = 0
    passed: bool = True
    precision: int | None = None
    failures: list = field(default_factory=list)

    def record(self, ok: bool, precision: int | None = None, instance: str = ""):
        self.instances += 1
        if precision is not None:
            self.precision = precision if self.precision is None else min(self.precision, precision)
        if not ok:
            self.passed = False
            if len(self.failures) < 5:
                self.failures.append(instance or f"instance {self.instances - 1}")

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        prec = "-" if self.precision is None else str(self.precision)
        return f"{status}  {self.name:<24} n={self.instances:<4} prec={prec:<4} {self.statement}"

    def to_data(self) -> dict:
        return {"suite": self.name, "statement": self.statement, "instances": self.instances,
                "pass": self.passed, "certified_precision": self.precision,
                "failures": list(self.failures), "version": __version__}


def suite_rng(seed: int, name: str) -> random.Random:
    return random.Random(f"{seed}:{name}")


# generators ---------------------------------------------------------------------


def random_unit(rng: random.Random, p: int, N: int) -> int:
    while True:
        b = rng.randrange(1, p ** N)
        if b % p:
            return b


def random_delta0(rng: random.Random, p: int, bound: int = 30) -> MonoidMatrix:
    """Integral, c = 0 mod p, d a unit, det != 0."""
    while True:
        a, b, c = rng.randrange(-bound, bound), rng.randrange(-bound, bound), p * rng.randrange(-bound, bound)
        d = rng.randrange(-bound, bound)
        if d % p and a * d - b * c:
            return MonoidMatrix(a, b, c, d, p)


def random_k0(rng: random.Random, p: int, bound: int = 30) -> MonoidMatrix:
    while True:
        g = random_delta0(rng, p, bound)
        if g.in_K0p():
            return g


def random_congruence(rng: random.Random, p: int, e: int) -> MonoidMatrix:
    """An element of K(p^e): identity modulo p^e."""
    m = p ** e
    while True:
        g = MonoidMatrix(1 + m * rng.randrange(-5, 6), m * rng.randrange(-5, 6),
                         m * rng.randrange(-5, 6), 1 + m * rng.randrange(-5, 6), p)
        if g.det:
            return g


def random_distribution(rng: random.Random, ring: CoeffRing, s: int, J: int) -> Distribution:
    return Distribution(ring, s, tuple(ring(rng.randrange(ring.p ** ring.N)) for _ in range(J)))


def random_small_weight(rng: random.Random, ring: CoeffRing) -> Weight:
    p = ring.p
    return Weight(ring, rng.randrange(p - 1), 1 + p * rng.randrange(1, p ** ring.N))


# suites ---------------------------------------------------------------------------


def character_extension(p: int, N: int, seed: int, count: int = 100, ks=range(2, 11)) -> SuiteResult:
    """char_extend on integer weights against modular powers b^(k-2)."""
    res = SuiteResult("character_extension", "the extension series of z^(k-2) equals b^(k-2) on units")
    rng = suite_rng(seed, res.name)
    ctx = PadicContext(p, N)
    for k in ks:
        w = integer_weight(k, ctx)
        for _ in range(count):
            b = random_unit(rng, p, N)
            val = char_extend(w, b)
            prec = val.prec
            ok = val.residue(prec) == pow(b, k - 2, p ** prec)
            res.record(ok, prec, f"k={k} b={b}")
    return res


def amice_roundtrip(p: int, N: int, seed: int, count: int = 50) -> SuiteResult:
    """Values of length <= p^(s+1) have integral coefficients (the factorials are units there);
    integral coefficients of any length give integral values that interpolate back."""
    res = SuiteResult("amice_roundtrip", "evaluation inverts interpolation and Amice coefficients are integral")
    rng = suite_rng(seed, res.name)
    ring = CoeffRing.qp(PadicContext(p, N))
    for i in range(count):
        s = rng.randrange(0, 3)
        if i % 2 == 0:
            J = rng.randrange(1, p ** (s + 1) + 1)
            values = [rng.randrange(p ** N) for _ in range(J)]
            f = amice_from_values(values, s, ring)
        else:
            J = rng.randrange(1, 3 * p ** (s + 1))
            f = AmiceFunction(ring, s, tuple(ring(rng.randrange(p ** N)) for _ in range(J)))
            values = [evaluate(f, x) for x in range(J)]
            if not all(v.valuation() >= 0 for v in values):
                res.record(False, 0, f"s={s} J={J} non-integral values")
                continue
            g = amice_from_values(values, s, ring)
            values = [v.lift() for v in values]
            if not all(ring(a - b, min(a.prec, b.prec)).is_zero() for a, b in zip(f.coeffs, g.coeffs)):
                res.record(False, 0, f"s={s} J={J} coefficients not recovered")
                continue
            f = g
        back = [evaluate(f, x) for x in range(J)]
        prec = min(v.prec for v in back)
        ok = f.is_integral() and all(v.residue(v.prec) == x % p ** v.prec for v, x in zip(back, values))
        res.record(ok, prec, f"s={s} J={J}")
    return res


def right_action(p: int, N: int, seed: int, count: int = 25) -> SuiteResult:
    res = SuiteResult("right_action", "(f.g1).g2 = f.(g1 g2) on s-analytic functions")
    rng = suite_rng(seed, res.name)
    ring = CoeffRing.qp(PadicContext(p, N))
    s = 1
    J = 4 * p ** s
    for i in range(count):
        w = integer_weight(rng.randrange(2, 9), ring.ctx) if i % 2 else random_small_weight(rng, ring)
        low = J // 4  # vanishing high coefficients keep the tail bound informative
        f = AmiceFunction(ring, s, tuple(ring(rng.randrange(p ** N)) if j < low else ring.zero()
                                         for j in range(J)))
        g1, g2 = random_delta0(rng, p), random_delta0(rng, p)
        lhs = act_right(act_right(f, w, g1), w, g2)
        rhs = act_right(f, w, g1 @ g2)
        prec = min(lhs.precision(), rhs.precision())
        ok = prec >= 1 and all(ring(a - b, prec).is_zero() for a, b in zip(lhs.coeffs, rhs.coeffs))
        res.record(ok, prec, f"g1={g1.to_data()} g2={g2.to_data()}")
    return res


def _random_quotient(rng, ring: CoeffRing, s: int, k: int) -> FiniteDistribution:
    idx = stored_indices(s, ring.p, k)
    return FiniteDistribution.from_elements(ring, s, k, [ring(rng.randrange(ring.p ** k)) for _ in idx])


def left_action_quotient(p: int, N: int, seed: int, count: int = 25) -> SuiteResult:
    res = SuiteResult("left_action_quotient", "g1(g2 mu) = (g1 g2) mu on D/Fil^k, exactly")
    rng = suite_rng(seed, res.name)
    ring = CoeffRing.qp(PadicContext(p, max(N, 4)))
    for i in range(count):
        k = 1 + i % 3
        w = integer_weight(rng.randrange(2, 9), ring.ctx) if i % 2 else random_small_weight(rng, ring)
        q = _random_quotient(rng, ring, 1, k)
        g1, g2 = random_delta0(rng, p), random_delta0(rng, p)
        ok = act_on_quotient(g1, act_on_quotient(g2, q, w), w) == act_on_quotient(g1 @ g2, q, w)
        res.record(ok, k, f"k={k}")
    return res


def congruence_triviality(p: int, N: int, seed: int, count: int = 10) -> SuiteResult:
    res = SuiteResult("congruence_triviality", "K(p^(s+k)) acts trivially on D/Fil^k, k <= 3")
    rng = suite_rng(seed, res.name)
    ring = CoeffRing.qp(PadicContext(p, max(N, 4)))
    s = 1
    for k in (1, 2, 3):
        for i in range(count):
            w = integer_weight(rng.randrange(2, 9), ring.ctx) if i % 2 else random_small_weight(rng, ring)
            q = _random_quotient(rng, ring, s, k)
            g = random_congruence(rng, p, s + k)
            res.record(act_on_quotient(g, q, w) == q, k, f"k={k} g={g.to_data()}")
    return res


def integration_equivariance(p: int, N: int, seed: int, count: int = 20, ks=range(2, 9)) -> SuiteResult:
    res = SuiteResult("integration_equivariance", "i_k(g mu) = g ._k i_k(mu) for the weight-k integration map")
    rng = suite_rng(seed, res.name)
    ring = CoeffRing.qp(PadicContext(p, N))
    ks = list(ks)
    J = 2 * p * N
    for i in range(count):
        k = ks[i % len(ks)]
        w = integer_weight(k, ring.ctx)
        mu = random_distribution(rng, ring, 1, J)
        g = random_delta0(rng, p)
        lhs = integrate_k(act_left(g, mu, w), k)
        rhs = Lk_act(g, integrate_k(mu, k))
        prec = min(lhs.precision(), rhs.precision())
        res.record(lhs == rhs and prec >= N, prec, f"k={k} g={g.to_data()}")
    return res


def es_equivariance(p: int, N: int, seed: int, count: int = 30) -> SuiteResult:
    res = SuiteResult("es_equivariance", "kernel(g mu, z) = chi(b z + d) kernel(mu, g z)")
    rng = suite_rng(seed, res.name)
    ctx = PadicContext(p, N)
    ring = CoeffRing.qp(ctx)
    for i in range(count):
        w = integer_weight(rng.randrange(2, 9), ctx) if i % 2 else random_small_weight(rng, ring)
        mu = random_distribution(rng, ring, 1, 2 * p * N)
        z = PeriodPoint.make(ctx, p * rng.randrange(p ** N))
        rep = es_equivariance_check(w, mu, random_k0(rng, p), z, min_precision=N)
        res.record(rep.passed, rep.precision, rep.instance)
    return res


def factor_weight_k(p: int, N: int, seed: int, count: int = 20) -> SuiteResult:
    res = SuiteResult("factor_weight_k", "for k >= 2 the kernel factors through i_k with X^i -> z^i")
    rng = suite_rng(seed, res.name)
    ctx = PadicContext(p, N)
    ring = CoeffRing.qp(ctx)
    for i in range(count):
        k = 2 + i % 7
        mu = random_distribution(rng, ring, 1, 2 * p * N)
        z = PeriodPoint.make(ctx, p * rng.randrange(p ** N))
        rep = factor_weight_k_check(mu, k, z, min_precision=N)
        res.record(rep.passed, rep.precision, rep.instance)
    return res


def _unimodular(rng, n: int):
    U = [[int(i == j) for j in range(n)] for i in range(n)]
    Ui = [row[:] for row in U]
    if n < 2:
        return U, Ui
    for _ in range(3 * n):
        i, j = rng.sample(range(n), 2)
        c = rng.randrange(-3, 4)
        for row in U:
            row[j] += c * row[i]
        Ui[i] = [a - c * b for a, b in zip(Ui[i], Ui[j])]
    return U, Ui


def _imul(A, B):
    return [[sum(a * b for a, b in zip(row, col)) for col in zip(*B)] for row in A]


def prescribed_slope_matrix(rng, p: int, n: int, max_val: int = 4):
    """U diag(p^v_i u_i) U^-1 with U random unimodular; returns (matrix, sorted valuations)."""
    vals = sorted(rng.randrange(0, max_val + 1) for _ in range(n))
    units = [u for u in range(1, 2 * p) if u % p]
    D = [[p ** vals[i] * rng.choice(units) if i == j else 0 for j in range(n)] for i in range(n)]
    U, Ui = _unimodular(rng, n)
    return _imul(_imul(U, D), Ui), vals


def slope_machinery(p: int, N: int, seed: int, count: int = 20, max_n: int = 8) -> SuiteResult:
    res = SuiteResult("slope_machinery",
                      "Newton polygon of det(1 - MT) gives the valuations; slope projectors are idempotent")
    rng = suite_rng(seed, res.name)
    ring = CoeffRing.qp(PadicContext(p, max(N, SLOPE_PRECISION)))
    for _ in range(count):
        n = rng.randrange(1, max_n + 1)
        rows, vals = prescribed_slope_matrix(rng, p, n)
        M = PadicMatrix.from_ints(ring, rows)
        F = fredholm_det(M)
        ok = newton_polygon(F).slopes() == [Fraction(v) for v in vals]
        distinct = sorted(set(vals))
        h = Fraction(distinct[0]) + Fraction(1, 2)
        dec = slope_decompose(M, h)
        e = dec.projector
        ok = ok and (e @ e - e).is_zero() and (e @ M - M @ e).is_zero() and dec.rank == vals.count(distinct[0])
        ok = ok and slope_factor(F, h).Q.degree_bound >= vals.count(distinct[0])
        for bad in distinct:
            try:
                slope_factor(F, bad)
                ok = False
            except NotSlopeAdapted:
                pass
        res.record(ok, dec.precision, f"n={n} vals={vals}")
    return res


def family_specialization(p: int, N: int, seed: int, count: int = 10, D: int = 4) -> SuiteResult:
    res = SuiteResult("family_specialization", "det(1 - MT) commutes with specializing the weight family")
    rng = suite_rng(seed, res.name)
    ctx = PadicContext(p, N)
    R = CoeffRing.iwasawa(ctx, 1, D)
    for _ in range(count):
        rows = [[R({(i,): rng.randrange(p ** N) for i in range(D + 1)}) for _ in range(3)] for _ in range(3)]
        M = PadicMatrix(R, rows)
        pt = [ctx(p * rng.randrange(1, p ** 3))]
        A = fredholm_det(M).specialize(pt)
        B = fredholm_det(specialize_family(M, pt))
        prec = min(A.precision(), B.precision())
        res.record(A == B, prec, f"point={pt[0]}")
    return res


def amice_translation(p: int, N: int, seed: int, count: int = 20) -> SuiteResult:
    res = SuiteResult("amice_translation", "A_(u mu) = (1 + T)^a A_mu for u = (1, a; 0, 1)")
    rng = suite_rng(seed, res.name)
    ring = CoeffRing.qp(PadicContext(p, N))
    for _ in range(count):
        s = rng.randrange(0, 2)
        n = rng.randrange(2, 3 * p + 2)
        mu = random_distribution(rng, ring, s, n)
        a = rng.randrange(-50, 51)
        u = MonoidMatrix(1, a, 0, 1, p)
        w = Weight(ring, 0, 1)
        lhs = amice_transform(act_left(u, mu, w), n)
        rhs = series_mul(binomial_series(a, n), amice_transform(mu, n), n)
        prec = min(min(x.prec for x in lhs), min(x.prec for x in rhs))
        ok = all(ring(x - y, prec).is_zero() for x, y in zip(lhs, rhs))
        res.record(ok, prec, f"a={a} s={s} n={n}")
    return res


def degree_recurrence(p: int, N: int, seed: int, max_n: int = 30) -> SuiteResult:
    res = SuiteResult("degree_recurrence", "the canonical-subgroup degree recurrence sums to 1 - p^-n")
    for n in range(1, max_n + 1):
        res.record(canonical_degree_bound(n, p) == canonical_degree_closed_form(n, p), None, f"n={n}")
    return res


def mixed_tensor_exactness(p: int, N: int, seed: int, max_log_order: int = 3, max_labels: int = 3) -> SuiteResult:
    res = SuiteResult("mixed_tensor_exactness",
                      "tensoring with a pseudobasis module keeps short exact sequences of p-groups exact")
    ok, count = check_mixed_tensor_exactness(p, max_log_order, max_labels)
    res.instances = count
    res.passed = ok
    return res


def filtration_finiteness(p: int, N: int, seed: int, max_k: int = 3, radii=(1, 2)) -> SuiteResult:
    res = SuiteResult("filtration_finiteness", "D/Fil^k is finite of exponent p^k")
    rng = suite_rng(seed, res.name)
    ring = CoeffRing.qp(PadicContext(p, max(N, max_k)))
    for s in radii:
        for k in range(1, max_k + 1):
            census = sum(max(k - lambda_valuation(j, s, p), 0) for j in range(k * p ** s + p ** s))
            exps = [fil_exponent(j, s, p, k) for j in stored_indices(s, p, k)]
            mod = FiniteModule.from_exponents(p, exps)
            ok = quotient_log_order(ring, s, k) == census == sum(exps) == p ** s * k * (k + 1) // 2
            ok = ok and mod.exponent() == p ** k
            q = _random_quotient(rng, ring, s, k)
            ok = ok and q.scale(p ** k).is_zero() and not fil_quotient(
                Distribution(ring, s, tuple(ring(1) for _ in stored_indices(s, p, k))), k).scale(p ** (k - 1)).is_zero()
            res.record(ok, k, f"s={s} k={k}")
    return res


def koszul_template(p: int, a: int, b: int, with_up: bool = True) -> BSComplexTemplate:
    """C^0 -> C^1 -> C^2 of ranks (1, 2, 1) from the commuting pair u_a, u_b."""
    I = [[1, 0], [0, 1]]
    ua, ub = [[1, a], [0, 1]], [[1, b], [0, 1]]
    data = {
        "ranks": [1, 2, 1],
        "boundaries": [
            [[[[1, ua], [-1, I]]], [[[1, ub], [-1, I]]]],
            [[[[1, ub], [-1, I]], [[-1, ua], [1, I]]]],
        ],
    }
    if with_up:
        # identity lift: always a chain map
        data["utilde"] = [[[[[1, I]]]], [[[[1, I]], []], [[], [[1, I]]]], [[[[1, I]]]]]
    return BSComplexTemplate.from_data(data, p)


def up_template(p: int, e: int) -> BSComplexTemplate:
    """M -> M by g - 1 with g in K(p^e), lifted by U_p = sum_a (p, a; 0, 1)."""
    I = [[1, 0], [0, 1]]
    g = [[1 + p ** e, 0], [0, 1]]
    up = [[1, [[p, a], [0, 1]]] for a in range(p)]
    return BSComplexTemplate.from_data({"ranks": [1, 1], "boundaries": [[[[[1, g], [-1, I]]]]],
                                        "utilde": [[[up]], [[up]]]}, p)


def complex_lab(p: int, N: int, seed: int, count: int = 4) -> SuiteResult:
    res = SuiteResult("complex_lab",
                      "d^2 = 0, the Euler characteristic of H equals that of C, U-series are tower compatible")
    rng = suite_rng(seed, res.name)
    ctx = PadicContext(p, max(N, 4))
    for i in range(count):
        w = integer_weight(rng.randrange(2, 9), ctx)
        k = 1 + i % 2
        t = koszul_template(p, rng.randrange(1, 20), rng.randrange(1, 20))
        C = instantiate(t, w, k)
        logs = C.log_orders()
        H = cohomology(C)
        hlog = [sum(_log(d, p) for d in h) for h in H]
        euler_c = sum((-1) ** j * x for j, x in enumerate(logs))
        euler_h = sum((-1) ** j * x for j, x in enumerate(hlog))
        ok = euler_c == euler_h == 0 and logs == [r * quotient_log_order(w.ring, t.s, k) for r in t.ranks]
        ok = ok and tower_compatible(up_template(p, 1 + k), w, k + 1)
        res.record(ok, k, f"k={k}")
    return res


def _log(n: int, p: int) -> int:
    e = 0
    while n > 1 and n % p == 0:
        n //= p
        e += 1
    return e


SUITES = [
    ("character_extension", lambda p, N, seed: character_extension(p, N, seed, count=20)),
    ("amice_roundtrip", lambda p, N, seed: amice_roundtrip(p, N, seed, count=20)),
    ("right_action", lambda p, N, seed: right_action(p, N, seed, count=6)),
    ("left_action_quotient", lambda p, N, seed: left_action_quotient(p, N, seed, count=12)),
    ("congruence_triviality", lambda p, N, seed: congruence_triviality(p, N, seed, count=4)),
    ("integration_equivariance", lambda p, N, seed: integration_equivariance(p, N, seed, count=7)),
    ("es_equivariance", lambda p, N, seed: es_equivariance(p, N, seed, count=6)),
    ("factor_weight_k", lambda p, N, seed: factor_weight_k(p, N, seed, count=7)),
    ("slope_machinery", lambda p, N, seed: slope_machinery(p, N, seed, count=8)),
    ("family_specialization", lambda p, N, seed: family_specialization(p, N, seed, count=4)),
    ("amice_translation", lambda p, N, seed: amice_translation(p, N, seed, count=10)),
    ("degree_recurrence", lambda p, N, seed: degree_recurrence(p, N, seed)),
    ("mixed_tensor_exactness", lambda p, N, seed: mixed_tensor_exactness(p, N, seed, 2, 2)),
    ("filtration_finiteness", lambda p, N, seed: filtration_finiteness(p, N, seed)),
    ("complex_lab", lambda p, N, seed: complex_lab(p, N, seed, count=2)),
]


def run_all(p: int, N: int, seed: int) -> list[SuiteResult]:
    return [run(p, N, seed) for _, run in SUITES]
