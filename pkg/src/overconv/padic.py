"""Precision-tracked p-adic scalars.

Elements are stored as ``p^val * unit + O(p^prec)`` with ``unit`` a p-adic
unit reduced modulo ``p^(prec - val)``.  Absolute precision is capped by the
context's ``N``.  Addition keeps the smaller absolute precision; products and
quotients propagate through valuations, so nothing reports more digits than
its inputs justify.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction


class PadicError(ArithmeticError):
    """Base class for p-adic arithmetic failures."""


class PrecisionError(PadicError):
    """Raised when a computation would need digits that are not available."""


def valuation(n: int, p: int) -> int:
    """v_p(n) for a nonzero integer."""
    if n == 0:
        raise ValueError("valuation of 0 is infinite")
    n = abs(n)
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def legendre(n: int, p: int) -> int:
    """v_p(n!) by Legendre's formula."""
    total = 0
    while n:
        n //= p
        total += n
    return total


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


@dataclass(frozen=True)
class PadicContext:
    """An odd prime ``p`` together with the working precision ``N``."""

    p: int
    N: int

    def __post_init__(self):
        if self.p < 3 or not _is_prime(self.p):
            raise ValueError(f"p must be an odd prime, got {self.p}")
        if self.N < 1:
            raise ValueError(f"precision N must be >= 1, got {self.N}")

    @property
    def modulus(self) -> int:
        return self.p ** self.N

    def with_precision(self, N: int) -> "PadicContext":
        return PadicContext(self.p, N)

    def __call__(self, x, prec: int | None = None) -> "PadicElement":
        return PadicElement.from_value(self, x, prec)

    def zero(self) -> "PadicElement":
        return PadicElement(self, 0, self.N, self.N)

    def one(self) -> "PadicElement":
        return PadicElement.from_value(self, 1)


class PadicElement:
    """A p-adic number known modulo ``p^prec``."""

    __slots__ = ("ctx", "unit", "val", "prec")

    def __init__(self, ctx: PadicContext, unit: int, val: int, prec: int):
        # trusted constructor: callers pass a normalized triple
        self.ctx = ctx
        self.unit = unit
        self.val = val
        self.prec = prec

    # construction -------------------------------------------------------

    @classmethod
    def _make(cls, ctx: PadicContext, value: int, shift: int, prec: int) -> "PadicElement":
        """Normalize ``p^shift * value + O(p^prec)``."""
        p = ctx.p
        prec = min(prec, ctx.N)
        if value == 0 or shift >= prec:
            return cls(ctx, 0, prec, prec)
        while value % p == 0:
            value //= p
            shift += 1
            if shift >= prec:
                return cls(ctx, 0, prec, prec)
        return cls(ctx, value % p ** (prec - shift), shift, prec)

    @classmethod
    def from_value(cls, ctx: PadicContext, x, prec: int | None = None) -> "PadicElement":
        """Build from an int, a Fraction with p-power-coprime handling, or an element."""
        prec = ctx.N if prec is None else min(prec, ctx.N)
        if isinstance(x, PadicElement):
            if x.ctx.p != ctx.p:
                raise ValueError("prime mismatch")
            return cls._make(ctx, x.unit, x.val, min(prec, x.prec))
        if isinstance(x, int):
            return cls._make(ctx, x, 0, prec)
        if isinstance(x, Fraction):
            num, den = x.numerator, x.denominator
            if num == 0:
                return cls(ctx, 0, prec, prec)
            p = ctx.p
            shift = 0
            while den % p == 0:
                den //= p
                shift -= 1
            while num % p == 0:
                num //= p
                shift += 1
            if shift >= prec:
                return cls(ctx, 0, prec, prec)
            m = p ** (prec - shift)
            return cls(ctx, num * pow(den, -1, m) % m, shift, prec)
        raise TypeError(f"cannot build a p-adic element from {type(x).__name__}")

    # basic queries ------------------------------------------------------

    @property
    def p(self) -> int:
        return self.ctx.p

    def is_zero(self) -> bool:
        """True when the element is indistinguishable from 0 at its precision."""
        return self.unit == 0

    def valuation(self) -> int:
        """Valuation; for an element zero at its precision this is ``prec`` (a lower bound)."""
        return self.val

    def is_unit(self) -> bool:
        return self.unit != 0 and self.val == 0

    def lift(self) -> int:
        """Integer representative in ``[0, p^prec)``; requires nonnegative valuation."""
        if self.val < 0:
            raise PadicError("element is not integral")
        if self.unit == 0:
            return 0
        return self.unit * self.p ** self.val

    def to_fraction(self) -> Fraction:
        if self.unit == 0:
            return Fraction(0)
        return Fraction(self.unit) * Fraction(self.p) ** self.val

    def residue(self, k: int) -> int:
        """Representative modulo ``p^k``; requires ``k <= prec``."""
        if k > self.prec:
            raise PrecisionError(f"residue mod p^{k} requested at precision {self.prec}")
        if k <= 0:
            return 0
        return self.lift() % self.p ** k

    def with_prec(self, prec: int) -> "PadicElement":
        """Drop to a lower absolute precision (never raises it)."""
        return PadicElement._make(self.ctx, self.unit, self.val, min(prec, self.prec))

    def in_context(self, ctx: PadicContext) -> "PadicElement":
        """Move to another context for the same prime, keeping known digits."""
        return PadicElement._make(ctx, self.unit, self.val, self.prec)

    # arithmetic ----------------------------------------------------------

    def _coerce(self, other) -> "PadicElement":
        if isinstance(other, PadicElement):
            if other.ctx.p != self.ctx.p:
                raise ValueError("prime mismatch")
            return other
        if isinstance(other, (int, Fraction)):
            return PadicElement.from_value(self.ctx, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        prec = min(self.prec, other.prec)
        if self.unit == 0:
            return other.with_prec(prec)
        if other.unit == 0:
            return self.with_prec(prec)
        p = self.p
        e = min(self.val, other.val)
        v = self.unit * p ** (self.val - e) + other.unit * p ** (other.val - e)
        return PadicElement._make(self.ctx, v, e, prec)

    __radd__ = __add__

    def __neg__(self):
        if self.unit == 0:
            return self
        m = self.p ** (self.prec - self.val)
        return PadicElement(self.ctx, (-self.unit) % m, self.val, self.prec)

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
        prec = min(self.val + other.prec, other.val + self.prec)
        if self.unit == 0 or other.unit == 0:
            return PadicElement._make(self.ctx, 0, 0, prec)
        return PadicElement._make(self.ctx, self.unit * other.unit, self.val + other.val, prec)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if other.unit == 0:
            raise ZeroDivisionError("division by an element that is zero at its precision")
        rel = other.prec - other.val
        if self.unit == 0:
            return PadicElement._make(self.ctx, 0, 0, self.prec - other.val)
        rel = min(rel, self.prec - self.val)
        val = self.val - other.val
        m = self.p ** rel
        return PadicElement._make(self.ctx, self.unit * pow(other.unit, -1, m) % m, val, val + rel)

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other / self

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.ctx.one() / self ** (-n)
        result = PadicElement.from_value(self.ctx, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def divide_int(self, n: int) -> "PadicElement":
        """Exact division by a nonzero integer, losing ``v_p(n)`` digits."""
        if n == 0:
            raise ZeroDivisionError("division by zero")
        v = valuation(n, self.p)
        if self.unit == 0:
            return PadicElement._make(self.ctx, 0, 0, self.prec - v)
        rel = self.prec - self.val
        m = self.p ** rel
        return PadicElement._make(self.ctx, self.unit * pow(n // self.p ** v, -1, m) % m,
                                  self.val - v, self.prec - v)

    def __eq__(self, other):
        """Equality at the common precision of both operands."""
        other = self._coerce(other) if not isinstance(other, PadicElement) else other
        if other is NotImplemented or not isinstance(other, PadicElement):
            return NotImplemented
        return (self - other).is_zero()

    def __hash__(self):
        raise TypeError("PadicElement equality is precision dependent; not hashable")

    def __repr__(self):
        return serialize(self)

    __str__ = __repr__


def serialize(x: PadicElement) -> str:
    """Canonical text form ``p^v * m + O(p^n)``."""
    if x.unit == 0:
        return f"0 + O({x.p}^{x.prec})"
    return f"{x.p}^{x.val} * {x.unit} + O({x.p}^{x.prec})"


_SCALAR_RE = re.compile(
    r"^\s*(?:(?P<zero>0)|(?P<p1>\d+)\^(?P<v>-?\d+)\s*\*\s*(?P<m>\d+))"
    r"\s*\+\s*O\(\s*(?P<p2>\d+)\^(?P<n>-?\d+)\s*\)\s*$"
)


def parse(text: str, ctx: PadicContext) -> PadicElement:
    """Inverse of :func:`serialize`; rejects non-canonical input."""
    match = _SCALAR_RE.match(text)
    if match is None:
        raise ValueError(f"malformed p-adic scalar: {text!r}")
    p, n = int(match["p2"]), int(match["n"])
    if p != ctx.p:
        raise ValueError(f"prime {p} does not match context prime {ctx.p}")
    if n > ctx.N:
        raise ValueError(f"precision {n} exceeds context precision {ctx.N}")
    if match["zero"]:
        return PadicElement(ctx, 0, n, n)
    if int(match["p1"]) != p:
        raise ValueError("inconsistent primes in scalar")
    v, m = int(match["v"]), int(match["m"])
    if not (0 < m < p ** (n - v)) or m % p == 0:
        raise ValueError(f"mantissa {m} is not a reduced unit for precision {n - v}")
    return PadicElement(ctx, m, v, n)


# special functions ---------------------------------------------------------


def valp_factorial_floor(j: int, s: int, ctx: PadicContext) -> int:
    """v_p(floor(j / p^s)!)."""
    return legendre(j // ctx.p ** s, ctx.p)


def teichmuller(b: PadicElement | int, ctx: PadicContext) -> PadicElement:
    """The (p-1)-th root of unity congruent to ``b`` mod p, to precision N."""
    p, N = ctx.p, ctx.N
    r = b.residue(1) if isinstance(b, PadicElement) and b.val >= 0 else (b % p if isinstance(b, int) else None)
    if r is None or r % p == 0 or (isinstance(b, PadicElement) and b.val != 0):
        raise PadicError("Teichmuller lift needs a unit")
    # x -> x^p converges to the lift; N steps suffice
    m = p ** N
    x = r
    for _ in range(N):
        x = pow(x, p, m)
    return PadicElement.from_value(ctx, x)


def one_unit_part(b: PadicElement | int, ctx: PadicContext) -> PadicElement:
    """<b> = b / omega(b)."""
    b = PadicElement.from_value(ctx, b)
    return b / teichmuller(b, ctx)


def padic_log_one_unit(u: PadicElement) -> PadicElement:
    """log(u) for u = 1 + y with v(y) >= 1, via the convergent series.

    The series is cut at the first index whose terms are certified below the
    input precision; the output precision is that of ``y``.
    """
    ctx = u.ctx
    p = ctx.p
    y = u - 1
    if y.val < 1:
        raise PadicError("log series needs u = 1 mod p")
    prec = y.prec
    if y.is_zero():
        return PadicElement(ctx, 0, prec, prec)
    # term n has valuation >= n*v(y) - log_p(n), nondecreasing in n
    Y = y.unit * p ** y.val
    m = p ** prec
    acc = 0
    n = 1
    while n * y.val - _floor_log(n, p) < prec:
        vn = valuation(n, p)
        term = pow(Y, n, p ** (prec + vn)) // p ** vn * pow(n // p ** vn, -1, m)
        acc = (acc + (term if n % 2 else -term)) % m
        n += 1
    return PadicElement.from_value(ctx, acc, prec)


def _floor_log(n: int, p: int) -> int:
    k = 0
    while p ** (k + 1) <= n:
        k += 1
    return k


def log_one_plus_p(ctx: PadicContext) -> PadicElement:
    return padic_log_one_unit(PadicElement.from_value(ctx, 1 + ctx.p))


def eta(b: PadicElement | int, ctx: PadicContext) -> PadicElement:
    """log<b> / log(1+p): the exponent of <b> with respect to the generator 1+p.

    ``b`` must be a unit; only its one-unit part is used.  One digit is lost
    to the division by log(1+p), which has valuation 1.
    """
    b = PadicElement.from_value(ctx, b)
    if b.val != 0 or b.is_zero():
        raise PadicError("eta is defined on units only")
    u = one_unit_part(b, ctx)
    return padic_log_one_unit(u) / log_one_plus_p(ctx)
