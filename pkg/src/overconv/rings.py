"""Coefficient rings: Q_p itself and truncated Iwasawa algebras.

``IwasawaTrunc`` models Z_p[[T_1, ..., T_d]] modulo ``p^N`` and monomials of
total degree above ``D``.  The ideal of definition is (p, T_1, ..., T_d); an
element's a-adic valuation is the least ``a + |m|`` over its terms
``p^a T^m``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .padic import PadicContext, PadicElement, PadicError, PrecisionError, parse, serialize, valuation

QP = "Qp"
IWASAWA = "IwasawaTrunc"


@dataclass(frozen=True)
class CoeffRing:
    kind: str
    ctx: PadicContext
    d: int = 0
    D: int = 0

    def __post_init__(self):
        if self.kind not in (QP, IWASAWA):
            raise ValueError(f"unknown ring kind {self.kind!r}")
        if self.kind == IWASAWA and not (1 <= self.d <= 2):
            raise ValueError("truncated Iwasawa rings support 1 or 2 variables")
        if self.kind == IWASAWA and self.D < 0:
            raise ValueError("degree truncation must be nonnegative")

    @classmethod
    def qp(cls, ctx: PadicContext) -> "CoeffRing":
        return cls(QP, ctx)

    @classmethod
    def iwasawa(cls, ctx: PadicContext, d: int, D: int) -> "CoeffRing":
        return cls(IWASAWA, ctx, d, D)

    @property
    def p(self) -> int:
        return self.ctx.p

    @property
    def N(self) -> int:
        return self.ctx.N

    def with_precision(self, N: int) -> "CoeffRing":
        return CoeffRing(self.kind, self.ctx.with_precision(N), self.d, self.D)

    def monomials(self):
        return [m for m in itertools.product(range(self.D + 1), repeat=self.d) if sum(m) <= self.D]

    # element construction ------------------------------------------------

    def zero(self):
        return self(0)

    def one(self):
        return self(1)

    def gen(self, i: int) -> "IwasawaElement":
        if self.kind != IWASAWA:
            raise ValueError("Q_p has no power-series variables")
        mono = tuple(1 if k == i else 0 for k in range(self.d))
        if self.D < 1:
            return IwasawaElement(self, {}, self.N)
        return IwasawaElement(self, {mono: 1}, self.N)

    def __call__(self, x, prec: int | None = None):
        """Coerce ints, p-adic scalars, monomial dicts or elements into this ring."""
        if self.kind == QP:
            if isinstance(x, IwasawaElement):
                raise TypeError("cannot coerce an Iwasawa element into Q_p; specialize first")
            return PadicElement.from_value(self.ctx, x, prec)
        prec = self.N if prec is None else min(prec, self.N)
        if isinstance(x, IwasawaElement):
            if x.ring.d != self.d:
                raise ValueError("variable count mismatch")
            return IwasawaElement.make(self, x.coeffs, min(prec, x.prec))
        if isinstance(x, PadicElement):
            if x.val < 0:
                raise PadicError("Iwasawa coefficients must be integral")
            return IwasawaElement.make(self, {(0,) * self.d: x.lift()}, min(prec, x.prec))
        if isinstance(x, int):
            return IwasawaElement.make(self, {(0,) * self.d: x}, prec)
        if isinstance(x, dict):
            return IwasawaElement.make(self, {tuple(k): v for k, v in x.items()}, prec)
        raise TypeError(f"cannot coerce {type(x).__name__}")

    def lift(self, x):
        """Embed ``x`` treating its known digits as exact (full precision of this ring)."""
        if self.kind == QP:
            if x.val < 0:
                return PadicElement.from_value(self.ctx, x.to_fraction())
            return PadicElement.from_value(self.ctx, x.lift())
        return IwasawaElement.make(self, dict(x.coeffs), self.N)

    # ideal of definition ---------------------------------------------------

    def a_valuation(self, x) -> int:
        """Largest k with x in a^k (capped by precision for elements zero at it)."""
        if self.kind == QP:
            return x.val
        return x.a_valuation()

    def reduce_a(self, x, k: int):
        """Canonical residue of ``x`` modulo a^k, as plain data."""
        if k <= 0:
            return 0 if self.kind == QP else ()
        if self.kind == QP:
            return x.residue(k)
        return x.reduce_a(k)

    def residue_to_element(self, r):
        """Element of this ring represented by a residue from :meth:`reduce_a`."""
        if self.kind == QP:
            return self(r)
        return self(dict(r))

    def quotient_exponent(self, k: int) -> int:
        """Exponent of the finite group ring/a^k (which is p^k for both kinds)."""
        return k

    def quotient_log_order(self, k: int) -> int:
        """log_p |ring / a^k|."""
        if k <= 0:
            return 0
        if self.kind == QP:
            return k
        self.check_quotient_level(k)
        return sum(k - sum(m) for m in self.monomials() if sum(m) < k)

    def check_quotient_level(self, k: int):
        if self.kind == IWASAWA and k - 1 > self.D:
            raise PrecisionError(f"degree truncation D={self.D} cannot represent ring/a^{k}")
        if k > self.N:
            raise PrecisionError(f"precision N={self.N} cannot represent ring/a^{k}")

    # serialization -----------------------------------------------------------

    def serialize(self, x) -> str | list:
        if self.kind == QP:
            return serialize(x)
        return x.to_data()

    def parse(self, data):
        if self.kind == QP:
            return parse(data, self.ctx)
        return IwasawaElement.from_data(self, data)

    def describe(self) -> dict:
        out = {"kind": self.kind, "p": self.p, "N": self.N}
        if self.kind == IWASAWA:
            out.update(d=self.d, D=self.D)
        return out

    @classmethod
    def from_description(cls, data: dict) -> "CoeffRing":
        ctx = PadicContext(int(data["p"]), int(data["N"]))
        if data.get("kind", QP) == QP:
            return cls.qp(ctx)
        return cls.iwasawa(ctx, int(data["d"]), int(data["D"]))


class IwasawaElement:
    """Truncated power series with coefficients known modulo ``p^prec``."""

    __slots__ = ("ring", "coeffs", "prec")

    def __init__(self, ring: CoeffRing, coeffs: dict, prec: int):
        self.ring = ring
        self.coeffs = coeffs
        self.prec = prec

    @classmethod
    def make(cls, ring: CoeffRing, coeffs: dict, prec: int) -> "IwasawaElement":
        prec = min(prec, ring.N)
        if prec <= 0:
            return cls(ring, {}, max(prec, 0))
        m = ring.p ** prec
        out = {}
        for mono, c in coeffs.items():
            if sum(mono) > ring.D:
                continue
            c %= m
            if c:
                out[mono] = c
        return cls(ring, out, prec)

    @property
    def p(self) -> int:
        return self.ring.p

    def is_zero(self) -> bool:
        return not self.coeffs

    def valuation(self) -> int:
        """p-adic valuation: minimum over coefficients."""
        if not self.coeffs:
            return self.prec
        return min(valuation(c, self.p) for c in self.coeffs.values())

    def a_valuation(self) -> int:
        if not self.coeffs:
            return self.prec
        return min(valuation(c, self.p) + sum(m) for m, c in self.coeffs.items())

    def reduce_a(self, k: int) -> tuple:
        if k > self.prec:
            raise PrecisionError(f"residue mod a^{k} requested at precision {self.prec}")
        self.ring.check_quotient_level(k)
        out = []
        for mono in sorted(self.coeffs):
            e = k - sum(mono)
            if e <= 0:
                continue
            c = self.coeffs[mono] % self.p ** e
            if c:
                out.append((mono, c))
        return tuple(out)

    def constant_term(self) -> PadicElement:
        return PadicElement.from_value(self.ring.ctx, self.coeffs.get((0,) * self.ring.d, 0), self.prec)

    def evaluate(self, point) -> PadicElement:
        """Specialize along T_i -> point[i]; each point[i] needs positive valuation.

        Monomials dropped by the degree truncation have valuation at least
        (D + 1) * min v(point[i]), which bounds the output precision.
        """
        ctx = self.ring.ctx
        pts = [PadicElement.from_value(ctx, t) for t in point]
        if len(pts) != self.ring.d:
            raise ValueError("point dimension does not match the number of variables")
        vmin = min(t.val for t in pts)
        if vmin < 1:
            raise PadicError("specialization point must lie in the open unit polydisc")
        total = PadicElement.from_value(ctx, 0, min(self.prec, (self.ring.D + 1) * vmin))
        for mono, c in self.coeffs.items():
            term = PadicElement.from_value(ctx, c, self.prec)
            for t, e in zip(pts, mono):
                if e:
                    term = term * t ** e
            total = total + term
        return total

    # arithmetic -------------------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, IwasawaElement):
            return other
        if isinstance(other, (int, PadicElement)):
            return self.ring(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        out = dict(self.coeffs)
        for m, c in other.coeffs.items():
            out[m] = out.get(m, 0) + c
        return IwasawaElement.make(self.ring, out, min(self.prec, other.prec))

    __radd__ = __add__

    def __neg__(self):
        return IwasawaElement.make(self.ring, {m: -c for m, c in self.coeffs.items()}, self.prec)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        prec = min(self.valuation() + other.prec, other.valuation() + self.prec)
        D = self.ring.D
        out: dict = {}
        for m1, c1 in self.coeffs.items():
            s1 = sum(m1)
            for m2, c2 in other.coeffs.items():
                if s1 + sum(m2) > D:
                    continue
                m = tuple(a + b for a, b in zip(m1, m2))
                out[m] = out.get(m, 0) + c1 * c2
        return IwasawaElement.make(self.ring, out, prec)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            return NotImplemented
        result = self.ring.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def divide_int(self, n: int) -> "IwasawaElement":
        """Exact division by an integer; every coefficient must absorb v_p(n)."""
        p = self.p
        v = valuation(n, p)
        u = n // p ** v
        if self.coeffs and self.valuation() < v:
            raise PadicError(f"element is not divisible by p^{v}")
        prec = self.prec - v
        if prec <= 0:
            return IwasawaElement(self.ring, {}, max(prec, 0))
        m = p ** prec
        inv = pow(u, -1, m)
        return IwasawaElement.make(self.ring, {k: c // p ** v * inv for k, c in self.coeffs.items()}, prec)

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return (self - other).is_zero()

    def __hash__(self):
        raise TypeError("IwasawaElement equality is precision dependent; not hashable")

    # serialization ------------------------------------------------------------------

    def to_data(self) -> list:
        ctx = self.ring.ctx
        return [[list(m), serialize(PadicElement.from_value(ctx, c, self.prec))]
                for m, c in sorted(self.coeffs.items())] + [["prec", self.prec]]

    @classmethod
    def from_data(cls, ring: CoeffRing, data: list) -> "IwasawaElement":
        coeffs = {}
        prec = ring.N
        for mono, text in data:
            if mono == "prec":
                prec = int(text)
                continue
            x = parse(text, ring.ctx)
            coeffs[tuple(mono)] = x.lift()
            prec = min(prec, x.prec)
        return cls.make(ring, coeffs, prec)

    def __repr__(self):
        if not self.coeffs:
            return f"0 + O({self.p}^{self.prec})"
        names = "TU"
        terms = []
        for m, c in sorted(self.coeffs.items()):
            mono = "*".join(f"{names[i]}^{e}" if e > 1 else names[i] for i, e in enumerate(m) if e)
            terms.append(f"{c}*{mono}" if mono else str(c))
        return " + ".join(terms) + f" + O({self.p}^{self.prec})"


def ring_of(x) -> CoeffRing:
    """The ring an element lives in."""
    if isinstance(x, IwasawaElement):
        return x.ring
    return CoeffRing.qp(x.ctx)

