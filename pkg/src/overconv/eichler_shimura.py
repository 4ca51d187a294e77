"""The period-coordinate action and the Eichler-Shimura kernel.

Points are modelled by their fundamental period z alone.  K_0(p) acts by
z -> (a z + c)/(b z + d); this is a right action,

    mobius(g1 g2, z) = mobius(g2, mobius(g1, z)),

and the factor j(g, z) = b z + d satisfies the matching cocycle rule
j(g1 g2, z) = j(g1, z) j(g2, mobius(g1, z)).

The kernel sends mu (x) f to mu(x -> chi(1 + z x)) f.  Unfolding the dual
action gives the identity that :func:`es_equivariance_check` verifies:

    kernel(g mu, z) = chi(b z + d) kernel(mu, mobius(g, z)).
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from fractions import Fraction

from .amice import AmiceFunction, amice_from_values
from .distributions import Distribution, act_left, integrate_k, pair
from .monoid import MonoidMatrix, PeriodPoint
from .padic import PadicContext, PadicElement, PadicError, PrecisionError, _floor_log, legendre, serialize
from .rings import QP, CoeffRing
from .weights import Weight, WeightError, char_of_mobius_factor, char_values, integer_weight, s_min


def mobius_period(gamma: MonoidMatrix, z: PeriodPoint) -> PeriodPoint:
    """(a z + c)/(b z + d) for gamma in K_0(p); the radius w is preserved."""
    if not gamma.in_K0p():
        raise ValueError("mobius_period needs gamma in K_0(p); use up_shift for U_p")
    den = z.z * gamma.b + gamma.d
    if not den.is_unit():
        raise PadicError("b z + d is not a unit")
    return PeriodPoint((z.z * gamma.a + gamma.c) / den, z.w)


def up_shift(z: PeriodPoint) -> PeriodPoint:
    """The diag(p, 1) move z -> p z, which raises w by one."""
    return PeriodPoint(z.z * z.z.p, z.w + 1)


def mobius_factor(gamma: MonoidMatrix, z: PeriodPoint) -> PadicElement:
    """j(gamma, z) = b z + d."""
    return z.z * gamma.b + gamma.d


def kernel_function(w: Weight, z: PeriodPoint, s: int, J: int) -> AmiceFunction:
    """x -> chi(1 + z x) in the Amice basis, from J samples.

    With v(z) >= 1 the j-th coefficient has valuation at least
    j (v(z) - 1/(p-1)), which gives the tail; moving z by p^n moves the
    function by at most p^-n, which caps the coefficient precision.
    """
    ring = w.ring
    ctx = ring.ctx
    p = ring.p
    if s < 1 + s_min(w):
        raise WeightError(f"s={s} must be at least 1 + s_min = {1 + s_min(w)}")
    if z.w < 1 + s_min(w):
        raise WeightError(f"w={z.w} is below 1 + s_min")
    if not z.in_neighbourhood():
        raise WeightError("period point lies outside its w-neighbourhood")
    zz = z.z.in_context(ctx)
    if zz.is_zero() and zz.prec >= ring.N:
        coeffs = tuple(ring.one() if j == 0 else ring.zero() for j in range(J))
        return AmiceFunction(ring, s, coeffs)
    M = ring.N + legendre(max(J - 1, 0) // p ** s, p) + 2
    mod = p ** M
    Z = zz.lift() % mod
    values = char_values(w, [(1 + Z * x) % mod for x in range(J)], s, M)
    f = amice_from_values([ring.with_precision(M)(v) for v in values], s, ring.with_precision(M))
    vz = min(zz.val, zz.prec)
    cap = min(ring.N, zz.prec)
    coeffs = tuple(ring(c, cap) for c in f.coeffs)
    if any(c.prec < cap for c in coeffs):
        raise PrecisionError("guard digits were insufficient for the kernel function")
    tail = math.floor(J * (Fraction(vz) - Fraction(1, p - 1)))
    return AmiceFunction(ring, s, coeffs, max(tail, 0))


def es_kernel(w: Weight, mu: Distribution, z: PeriodPoint, f=1, s: int | None = None):
    """mu(chi(1 + z x)) * f."""
    s = mu.s if s is None else s
    if s != mu.s:
        raise ValueError("radius mismatch")
    if w.ring.kind != mu.ring.kind or w.p != mu.p:
        raise WeightError("weight and distribution rings differ")
    g = kernel_function(w, z, s, mu.J)
    return pair(mu, g) * mu.ring(f)


@dataclass(frozen=True)
class CheckReport:
    check: str
    instance: str
    passed: bool
    precision: int

    def __bool__(self) -> bool:
        return self.passed

    def to_data(self) -> dict:
        return {"check": self.check, "instance": self.instance, "pass": self.passed,
                "certified_precision": self.precision}


def instance_hash(*parts) -> str:
    """Short stable digest of the inputs of a check."""
    text = json.dumps([_describe(x) for x in parts], sort_keys=True)
    return hashlib.sha256(text.encode()).hexdigest()[:16]


def _describe(x):
    if hasattr(x, "to_data"):
        return x.to_data()
    if isinstance(x, PeriodPoint):
        return [serialize(x.z), str(x.w)]
    if isinstance(x, PadicElement):
        return serialize(x)
    return repr(x)


def _compare(lhs, rhs) -> tuple[bool, int]:
    diff = lhs - rhs
    prec = min(lhs.prec, rhs.prec)
    return diff.is_zero(), prec


def es_equivariance_check(w: Weight, mu: Distribution, gamma: MonoidMatrix, z: PeriodPoint, f=1,
                          min_precision: int = 1) -> CheckReport:
    """Compare kernel(gamma mu, z) with chi(b z + d) kernel(mu, gamma z).

    Passing means equality at the certified precision, which itself must reach
    ``min_precision``.
    """
    lhs = es_kernel(w, act_left(gamma, mu, w), z, f)
    rhs = char_of_mobius_factor(w, gamma, z, mu.s) * es_kernel(w, mu, mobius_period(gamma, z), f)
    ok, prec = _compare(lhs, rhs)
    return CheckReport("es_equivariance", instance_hash(w, mu, gamma, z), ok and prec >= min_precision, prec)


def factor_weight_k_check(mu: Distribution, k: int, z: PeriodPoint, min_precision: int = 1) -> CheckReport:
    """mu(chi_k(1 + z x)) against i_k(mu) evaluated at X = z."""
    if k < 2:
        raise ValueError("k must be at least 2")
    if mu.ring.kind != QP:
        raise ValueError("weight-k factorization is stated over Q_p")
    w = integer_weight(k, mu.ctx)
    lhs = es_kernel(w, mu, z)
    poly = integrate_k(mu, k)
    zz = z.z.in_context(mu.ctx)
    rhs = mu.ring.zero()
    power = mu.ring.one()
    for c in poly.coeffs:
        rhs = rhs + c * power
        power = power * zz
    ok, prec = _compare(lhs, rhs)
    return CheckReport("factor_weight_k", instance_hash(mu, k, z), ok and prec >= min_precision, prec)


def canonical_degree_bound(n: int, p: int) -> Fraction:
    """delta'_n from delta'_1 = (p-1)/p and delta'_(n+1) = (p-1)/p + delta'_n / p."""
    if n < 1:
        raise ValueError("n must be at least 1")
    delta = Fraction(p - 1, p)
    for _ in range(n - 1):
        delta = Fraction(p - 1, p) + delta / p
    return delta


def canonical_degree_closed_form(n: int, p: int) -> Fraction:
    return 1 - Fraction(1, p ** n)
