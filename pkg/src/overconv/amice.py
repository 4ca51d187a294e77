"""s-analytic functions on Z_p in the Amice basis e_j^s(x) = floor(j/p^s)! * binom(x, j)."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .monoid import MonoidMatrix
from .padic import PadicContext, PadicElement, PadicError, PrecisionError, _floor_log, legendre
from .rings import CoeffRing
from .weights import Weight, WeightError, char_extend, s_min


def restriction_scale(j: int, s: int, p: int) -> int:
    """lambda_j with e_j^(s-1) = lambda_j * e_j^s."""
    if s < 1:
        raise ValueError("restriction_scale needs s >= 1")
    return math.factorial(j // p ** (s - 1)) // math.factorial(j // p ** s)


def lambda_valuation(j: int, s: int, p: int) -> int:
    """v_p(lambda_j), which equals floor(j / p^s)."""
    return j // p ** s


def default_length(p: int, s: int, N: int) -> int:
    return 2 * p ** s * N


def guard_digits(p: int, s: int, J: int) -> int:
    """Digits lost when dividing finite differences of length J by the basis factorials."""
    return legendre((J - 1) // p ** s, p) if J else 0


def basis_values(X: int, J: int, s: int, p: int) -> list[int]:
    """Exact integers e_j^s(X) for j < J and an integer X."""
    out = []
    b = 1
    for j in range(J):
        if j:
            b = b * (X - j + 1) // j
        out.append(math.factorial(j // p ** s) * b)
    return out


def _binom_precision(prec: int, j: int, p: int) -> int:
    # moving x by p^prec moves binom(x, j) by at most p^(prec - log_p j)
    return prec - _floor_log(j, p) if j else 10 ** 9


@dataclass(frozen=True)
class AmiceFunction:
    """sum_{j<J} coeffs[j] e_j^s.  ``tail`` bounds the valuation of dropped coefficients.

    ``tail is None`` means the expansion is exactly finite.
    """

    ring: CoeffRing
    s: int
    coeffs: tuple
    tail: int | None = None
    padded: bool = False

    @property
    def J(self) -> int:
        return len(self.coeffs)

    @property
    def p(self) -> int:
        return self.ring.p

    def precision(self) -> int:
        prec = min((c.prec for c in self.coeffs), default=self.ring.N)
        return prec if self.tail is None else min(prec, self.tail)

    def is_integral(self) -> bool:
        return all(c.valuation() >= 0 for c in self.coeffs)

    @classmethod
    def basis(cls, ring: CoeffRing, s: int, j: int, J: int) -> "AmiceFunction":
        coeffs = tuple(ring.one() if i == j else ring.zero() for i in range(J))
        return cls(ring, s, coeffs)

    def to_data(self) -> dict:
        return {"p": self.p, "N": self.ring.N, "s": self.s, "J": self.J,
                "ring": self.ring.describe(), "tail": self.tail,
                "coeffs": [self.ring.serialize(c) for c in self.coeffs]}

    @classmethod
    def from_data(cls, data: dict) -> "AmiceFunction":
        ring = CoeffRing.from_description(data.get("ring", {"p": data["p"], "N": data["N"]}))
        coeffs = tuple(ring.parse(c) for c in data["coeffs"])
        if "J" in data and int(data["J"]) != len(coeffs):
            raise ValueError("J does not match the number of coefficients")
        return cls(ring, int(data["s"]), coeffs, data.get("tail"))


def forward_differences(values: list) -> list:
    """(Delta^j f)(0) for j < len(values)."""
    row = list(values)
    out = []
    while row:
        out.append(row[0])
        row = [row[i + 1] - row[i] for i in range(len(row) - 1)]
    return out


def amice_from_values(values, s: int, ring: CoeffRing, J: int | None = None) -> AmiceFunction:
    """Coefficients c_j = (Delta^j f)(0) / floor(j/p^s)! from f(0), ..., f(J-1)."""
    values = [ring(v) for v in values]
    padded = False
    if J is not None and J > len(values):
        values = values + [ring.zero()] * (J - len(values))
        padded = True
    elif J is not None:
        values = values[:J]
    p = ring.p
    diffs = forward_differences(values)
    coeffs = []
    for j, dj in enumerate(diffs):
        f = math.factorial(j // p ** s)
        cj = dj.divide_int(f) if f > 1 else dj
        if cj.prec <= 0 and not dj.is_zero():
            raise PrecisionError(f"factorial division exhausted the precision at j={j}")
        coeffs.append(cj)
    return AmiceFunction(ring, s, tuple(coeffs), None, padded)


def evaluate(f: AmiceFunction, x):
    """f(x) for x in Z_p; the certified tail is folded into the precision."""
    ring = f.ring
    ctx = ring.ctx
    if isinstance(x, int):
        X, xprec = x, None
    else:
        x = PadicElement.from_value(ctx, x)
        if x.val < 0:
            raise PadicError("evaluation point must be a p-adic integer")
        X, xprec = x.lift(), x.prec
    vals = basis_values(X, f.J, f.s, f.p)
    total = ring.zero()
    for j, (c, e) in enumerate(zip(f.coeffs, vals)):
        if xprec is None:
            total = total + c * e
        else:
            total = total + c * ring(PadicElement.from_value(ctx, e, _binom_precision(xprec, j, f.p)))
    if f.tail is not None:
        total = ring(total, f.tail)
    return total


eval_amice = evaluate


def check_action_radius(w: Weight, s: int):
    # x -> chi(cx + d) is s-analytic as soon as s >= s_min
    if s < s_min(w):
        raise WeightError(f"s={s} must be at least s_min = {s_min(w)}")


def work_precision(N: int, p: int, s: int, J: int) -> int:
    return N + guard_digits(p, s, J) + _floor_log(max(J, 1), p) + 2


def character_samples(w: Weight, gamma: MonoidMatrix, J: int, s: int) -> list:
    """chi(c x + d) for x = 0..J-1 in the weight's ring."""
    return [char_extend(w, gamma.c * x + gamma.d, s) for x in range(J)]


def point_samples(gamma: MonoidMatrix, J: int, ctx: PadicContext) -> list[PadicElement]:
    """(a x + b)/(c x + d) for x = 0..J-1."""
    return [gamma.mobius(x, ctx) for x in range(J)]


def act_right(f: AmiceFunction, w: Weight, gamma: MonoidMatrix, s: int | None = None) -> AmiceFunction:
    """(f . gamma)(x) = chi(cx + d) f((ax + b)/(cx + d)), re-expanded from samples at 0..J-1.

    Coefficients are computed from exact lifts of the input at a guarded
    precision; the result is capped at the input precision, which is sound
    because the action preserves integral functions.
    """
    s = f.s if s is None else s
    if s != f.s:
        raise ValueError("radius mismatch")
    check_action_radius(w, s)
    if gamma.p != f.p:
        raise ValueError("prime mismatch")
    ring = f.ring
    J = f.J
    M = work_precision(ring.N, f.p, s, J)
    wring = ring.with_precision(M)
    ww = w.with_precision(M)
    if ww.ring.kind != wring.kind:
        raise WeightError("weight and function rings differ")
    lifted = AmiceFunction(wring, s, tuple(wring.lift(c) for c in f.coeffs))
    chis = character_samples(ww, gamma, J, s)
    pts = point_samples(gamma, J, wring.ctx)
    values = [chi * evaluate(lifted, y) for chi, y in zip(chis, pts)]
    out = amice_from_values(values, s, wring)
    cap = f.precision()
    coeffs = tuple(ring(c, cap) for c in out.coeffs)
    if any(cc.prec < cap and cc.prec < ring.N for cc in coeffs):
        raise PrecisionError("guard digits were insufficient for the requested precision")
    return AmiceFunction(ring, s, coeffs, _action_tail(f, w, gamma, s))


def _action_tail(f: AmiceFunction, w: Weight, gamma: MonoidMatrix, s: int) -> int | None:
    """Valuation bound for the coefficients of f . gamma beyond index J.

    With c = 0 the character factor is constant and a finite expansion stays
    finite.  Otherwise coefficient i >= J equals f paired with gamma applied
    to the i-th dual basis vector, which lies in Fil^floor(i/p^s) when
    s >= 1 + s_min; stability of the filtration gives the bound below.
    """
    if gamma.c == 0:
        return f.tail
    bound = 0
    if s >= 1 + s_min(w):
        K = f.J // f.p ** s
        bound = min((c.valuation() + max(K - j // f.p ** s, 0) for j, c in enumerate(f.coeffs)), default=K)
        bound = max(bound, 0)
    return bound if f.tail is None else min(bound, f.tail)
