"""Weights as characters of Z_p^x and their canonical extension.

A weight is recorded by its tame index ``t`` (the power by which it acts on
the (p-1)-th roots of unity) and ``c``, its value on 1+p.  Everything else is
rebuilt from these two values by the binomial series

    chi(b) = omega(b)^t * sum_j (c - 1)^j * binom(eta(b), j),

where eta(b) = log<b> / log(1+p).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .monoid import MonoidMatrix, PeriodPoint
from .padic import PadicContext, PadicElement, PadicError, _floor_log, eta, teichmuller
from .rings import QP, CoeffRing

SMALL = "small"
AFFINOID = "affinoid"


class WeightError(ValueError):
    """A weight or an argument violates the analyticity preconditions."""


@dataclass(frozen=True)
class Weight:
    ring: CoeffRing
    t: int
    c: object
    kind: str = SMALL
    k: int | None = None  # set for integer weights z -> z^(k-2)

    def __post_init__(self):
        p = self.ring.p
        object.__setattr__(self, "t", self.t % (p - 1))
        object.__setattr__(self, "c", self.ring(self.c))
        if self.kind not in (SMALL, AFFINOID):
            raise WeightError(f"unknown weight kind {self.kind!r}")
        if self.kind == AFFINOID and self.ring.kind != QP:
            raise WeightError("affinoid weights are supported over Q_p only")
        if (self.c - 1).valuation() < 1:
            raise WeightError("chi(1+p) - 1 must lie in p * ring")

    @property
    def p(self) -> int:
        return self.ring.p

    @property
    def ctx(self) -> PadicContext:
        return self.ring.ctx

    def with_precision(self, N: int) -> "Weight":
        ring = self.ring.with_precision(N)
        c = self._exact_c(ring)
        return Weight(ring, self.t, c, self.kind, self.k)

    def _exact_c(self, ring: CoeffRing):
        if self.k is not None:
            return ring(Fraction(1 + self.p) ** (self.k - 2))
        return ring.lift(self.c) if self.c.prec >= self.ring.N else ring(self.c)

    def to_data(self) -> dict:
        out = {"p": self.p, "N": self.ring.N, "kind": self.kind, "t": self.t,
               "c": self.ring.serialize(self.c), "ring": self.ring.describe()}
        if self.k is not None:
            out["k"] = self.k
        return out

    @classmethod
    def from_data(cls, data: dict) -> "Weight":
        if "k" in data:
            return integer_weight(int(data["k"]), PadicContext(int(data["p"]), int(data["N"])))
        ring = CoeffRing.from_description(data.get("ring", {"kind": QP, "p": data["p"], "N": data["N"]}))
        return cls(ring, int(data["t"]), ring.parse(data["c"]), data.get("kind", SMALL))


def integer_weight(k: int, ctx: PadicContext) -> Weight:
    """The weight z -> z^(k-2)."""
    ring = CoeffRing.qp(ctx)
    c = ring(Fraction(1 + ctx.p) ** (k - 2))
    return Weight(ring, k - 2, c, SMALL, k)


def s_min(w: Weight) -> int:
    """Least s >= 0 with v(c - 1) > 1/(p^s (p - 1))."""
    x = w.c - 1
    if x.is_zero():
        return 0
    v = x.valuation()
    if v <= 0:
        raise WeightError("v(c - 1) = 0: not a weight")
    p = w.p
    s = 0
    while Fraction(v) <= Fraction(1, p ** s * (p - 1)):
        s += 1
    return s


def series_length(w: Weight, s: int, N: int) -> int:
    """Least J with J*v(c-1) - J/(p^s (p-1)) > N; terms from J on are below p^-N."""
    x = w.c - 1
    if x.is_zero():
        return 1
    v = Fraction(x.valuation())
    rate = v - Fraction(1, w.p ** s * (w.p - 1))
    if rate <= 0:
        raise WeightError("extension series diverges for this s")
    return math.floor(N / rate) + 1


def char_extend(w: Weight, b, s: int | None = None) -> object:
    """chi(b) for a unit b, computed by the extension series.

    The result lives in ``w.ring``; its precision is the certified one.
    """
    ring = w.ring
    ctx = ring.ctx
    s = s_min(w) if s is None else s
    if s < s_min(w):
        raise WeightError(f"s={s} is below s_min={s_min(w)}")
    b = PadicElement.from_value(ctx, b)
    if b.is_zero() or b.val != 0:
        raise WeightError("char_extend needs a p-adic unit")
    tame = ring(teichmuller(b, ctx) ** w.t)
    e = eta(b, ctx)
    x = w.c - 1
    if x.is_zero():
        return tame
    J = series_length(w, s, ring.N)
    E = e.lift()
    total = ring.zero()
    power = ring.one()
    binom = 1
    for j in range(J):
        if j:
            binom = binom * (E - j + 1) // j
            power = power * x
        bj = PadicElement.from_value(ctx, binom, e.prec - _floor_log(j, ctx.p) if j else ring.N)
        total = total + power * ring(bj)
    return tame * total


def chi_direct(w: Weight, b) -> object:
    """chi(b) for integer weights by direct powering; an oracle for char_extend."""
    if w.k is None:
        raise WeightError("direct evaluation is only available for integer weights")
    b = PadicElement.from_value(w.ctx, b)
    return w.ring(b ** (w.k - 2))


def char_of_mobius_factor(w: Weight, gamma: MonoidMatrix, z: PeriodPoint, s: int | None = None):
    """chi(b z + d), the transformation factor of the trivializing section."""
    s = s_min(w) if s is None else s
    if not z.in_neighbourhood():
        raise WeightError("period point lies outside its w-neighbourhood")
    if z.w < 1 + s_min(w):
        raise WeightError(f"w={z.w} is below 1 + s_min")
    if gamma.p != w.p:
        raise WeightError("prime mismatch")
    ctx = w.ctx
    zz = z.z.in_context(ctx)
    return char_extend(w, zz * gamma.b + gamma.d, s)


def char_values(w: Weight, units: list[int], s: int, M: int) -> list:
    """chi(u) for integer units u at working precision M.

    Integer weights take the direct power, which the extension series is
    known to reproduce; other weights go through the series.
    """
    if w.k is not None:
        ctx = PadicContext(w.p, M)
        mod = w.p ** M
        e = w.k - 2
        out = []
        for u in units:
            base = u % mod if e >= 0 else pow(u, -1, mod)
            out.append(PadicElement.from_value(ctx, pow(base, abs(e), mod)))
        return out
    ww = w.with_precision(M)
    return [char_extend(ww, u, s) for u in units]
