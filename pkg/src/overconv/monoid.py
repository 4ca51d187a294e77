"""The monoid Delta_0(p), its congruence subgroups, and period points."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .padic import PadicContext, PadicElement, PadicError


@dataclass(frozen=True)
class MonoidMatrix:
    """An integral 2x2 matrix (a b; c d) with exact integer entries.

    Membership in Delta_0(p) (c in pZ_p, d a unit, nonzero determinant) is
    enforced at construction when ``p`` is given.
    """

    a: int
    b: int
    c: int
    d: int
    p: int

    def __post_init__(self):
        if self.c % self.p:
            raise ValueError(f"c={self.c} is not divisible by p={self.p}")
        if self.d % self.p == 0:
            raise ValueError(f"d={self.d} is not a p-adic unit")
        if self.det == 0:
            raise ValueError("determinant is zero")

    @classmethod
    def identity(cls, p: int) -> "MonoidMatrix":
        return cls(1, 0, 0, 1, p)

    @classmethod
    def up(cls, p: int, a: int = 0) -> "MonoidMatrix":
        """(p a; 0 1), a U_p coset representative."""
        return cls(p, a, 0, 1, p)

    @property
    def det(self) -> int:
        return self.a * self.d - self.b * self.c

    def in_K0p(self) -> bool:
        """Invertible over Z_p: unit determinant."""
        return self.det % self.p != 0

    def in_Kpn(self, n: int) -> bool:
        """Congruent to the identity modulo p^n."""
        m = self.p ** n
        return (self.a - 1) % m == 0 and self.b % m == 0 and self.c % m == 0 and (self.d - 1) % m == 0

    def __matmul__(self, other: "MonoidMatrix") -> "MonoidMatrix":
        if self.p != other.p:
            raise ValueError("prime mismatch")
        return MonoidMatrix(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
            self.p,
        )

    def entries(self) -> tuple[int, int, int, int]:
        return (self.a, self.b, self.c, self.d)

    def to_data(self) -> list:
        return [[self.a, self.b], [self.c, self.d]]

    @classmethod
    def from_data(cls, data, p: int) -> "MonoidMatrix":
        (a, b), (c, d) = data
        return cls(int(a), int(b), int(c), int(d), p)

    def mobius(self, x, ctx: PadicContext) -> PadicElement:
        """(a x + b)/(c x + d) for x in Z_p, the point map of the right action on functions."""
        x = PadicElement.from_value(ctx, x)
        return (x * self.a + self.b) / (x * self.c + self.d)


@dataclass(frozen=True)
class PeriodPoint:
    """A value of the fundamental period together with its radius parameter w.

    ``w`` is kept as an exact rational.  The point lies in the w-neighbourhood
    when its distance to pZ_p is at most p^-w; for a p-adic integer this
    amounts to z = 0 mod p.
    """

    z: PadicElement
    w: Fraction

    def __post_init__(self):
        object.__setattr__(self, "w", Fraction(self.w))
        if self.w <= 0:
            raise ValueError("w must be a positive rational")
        if self.z.val < 0:
            raise PadicError("period points must be p-adic integers")

    @classmethod
    def make(cls, ctx: PadicContext, z, w=1) -> "PeriodPoint":
        return cls(PadicElement.from_value(ctx, z), Fraction(w))

    def distance_valuation(self) -> float:
        """-log_p of the distance to pZ_p (infinite when z is in pZ_p)."""
        if self.z.prec < 1:
            raise PadicError("period point carries no digits")
        return float("inf") if self.z.val >= 1 else 0.0

    def in_neighbourhood(self, w=None) -> bool:
        w = self.w if w is None else Fraction(w)
        return self.distance_valuation() >= w
