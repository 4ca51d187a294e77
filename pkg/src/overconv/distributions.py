"""Distributions on Z_p stored by their Amice moments m_j = mu(e_j^s).

A :class:`Distribution` records moments for j < J together with a filtration
level ``fil_level``: the true distribution is only known modulo Fil^K (and
modulo the p-adic precision of each moment).  ``fil_level is None`` means the
stored moments are exact and nothing is claimed about the moments beyond J.

Fil^k is the kernel of restriction to radius s - 1 reduced modulo a^k.  Since
restriction multiplies the j-th moment by lambda_j with v(lambda_j) =
floor(j/p^s), Fil^k consists of the mu with m_j in a^(k - floor(j/p^s)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .amice import AmiceFunction, basis_values
from .monoid import MonoidMatrix
from .padic import PadicContext, PadicElement, PadicError, PrecisionError, _floor_log, valuation
from .rings import IWASAWA, QP, CoeffRing, IwasawaElement
from .weights import Weight, WeightError, char_values, s_min


# integer-vector helpers ------------------------------------------------------
#
# Ring elements are flattened to integer lists (one entry for Q_p, one per
# monomial for truncated Iwasawa rings) so that long linear combinations with
# integer weights run on plain ints.


def _monos(ring: CoeffRing):
    return [()] if ring.kind == QP else ring.monomials()


def _to_vec(ring: CoeffRing, x) -> list[int]:
    if ring.kind == QP:
        if x.val < 0:
            raise PadicError("moments must be integral")
        return [x.lift()]
    return [x.coeffs.get(m, 0) for m in ring.monomials()]


def _from_vec(ring: CoeffRing, v: list[int], prec: int):
    if ring.kind == QP:
        return PadicElement.from_value(ring.ctx, v[0], prec)
    return IwasawaElement.make(ring, dict(zip(ring.monomials(), v)), prec)


def _mul_vec(ring: CoeffRing, u: list[int], x, mod: int) -> list[int]:
    """u * x reduced mod ``mod``, with x an element of ``ring``."""
    if ring.kind == QP:
        return [u[0] * x.lift() % mod]
    monos = ring.monomials()
    index = {m: i for i, m in enumerate(monos)}
    out = [0] * len(monos)
    for m1, c1 in zip(monos, u):
        if not c1:
            continue
        for m2, c2 in x.coeffs.items():
            m = tuple(a + b for a, b in zip(m1, m2))
            i = index.get(m)
            if i is not None:
                out[i] += c1 * c2
    return [c % mod for c in out]


def _precision(x) -> int:
    return x.prec


def fil_exponent(j: int, s: int, p: int, k: int) -> int:
    """Exponent n with entry j of D/Fil^k living in ring / a^n."""
    return max(0, k - j // p ** s)


def stored_indices(s: int, p: int, k: int) -> range:
    """Indices j with v(lambda_j) < k, i.e. those visible in D/Fil^k."""
    return range(k * p ** s)


def quotient_log_order(ring: CoeffRing, s: int, k: int) -> int:
    """log_p |D/Fil^k| from the lambda_j-valuation census."""
    return sum(ring.quotient_log_order(fil_exponent(j, s, ring.p, k)) for j in stored_indices(s, ring.p, k))


# domain types -----------------------------------------------------------------


@dataclass(frozen=True)
class Distribution:
    ring: CoeffRing
    s: int
    moments: tuple
    fil_level: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "moments", tuple(self.ring(m) for m in self.moments))
        if self.ring.kind == QP and any(m.val < 0 for m in self.moments):
            raise PadicError("Amice moments must be integral")

    @property
    def J(self) -> int:
        return len(self.moments)

    @property
    def p(self) -> int:
        return self.ring.p

    @property
    def ctx(self) -> PadicContext:
        return self.ring.ctx

    def precision(self) -> int:
        """Common p-adic precision of the stored moments."""
        return min((m.prec for m in self.moments), default=self.ring.N)

    def moment_precision(self, j: int) -> int:
        """How many digits of the true j-th moment are certified."""
        prec = self.moments[j].prec
        if self.fil_level is None:
            return prec
        bound = self.fil_level - j // self.p ** self.s
        if self.ring.kind == IWASAWA:
            bound -= self.ring.D
        return min(prec, bound)

    def __add__(self, other: "Distribution") -> "Distribution":
        self._check_compatible(other)
        return Distribution(self.ring, self.s, tuple(a + b for a, b in zip(self.moments, other.moments)),
                            _min_level(self.fil_level, other.fil_level))

    def __sub__(self, other: "Distribution") -> "Distribution":
        self._check_compatible(other)
        return Distribution(self.ring, self.s, tuple(a - b for a, b in zip(self.moments, other.moments)),
                            _min_level(self.fil_level, other.fil_level))

    def scale(self, r) -> "Distribution":
        r = self.ring(r)
        return Distribution(self.ring, self.s, tuple(r * m for m in self.moments), self.fil_level)

    def _check_compatible(self, other: "Distribution"):
        if (self.ring, self.s, self.J) != (other.ring, other.s, other.J):
            raise ValueError("distributions differ in ring, radius or length")

    def to_data(self) -> dict:
        return {"p": self.p, "N": self.ring.N, "s": self.s, "J": self.J, "ring": self.ring.describe(),
                "fil_level": self.fil_level, "moments": [self.ring.serialize(m) for m in self.moments]}

    @classmethod
    def from_data(cls, data: dict) -> "Distribution":
        ring = CoeffRing.from_description(data.get("ring", {"p": data["p"], "N": data["N"]}))
        moments = tuple(ring.parse(m) for m in data["moments"])
        if "J" in data and int(data["J"]) != len(moments):
            raise ValueError("J does not match the number of moments")
        return cls(ring, int(data["s"]), moments, data.get("fil_level"))


def _min_level(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


@dataclass(frozen=True)
class FiniteDistribution:
    """The image of a distribution in D/Fil^k.

    ``entries[j]`` is the canonical residue of m_j modulo a^(k - floor(j/p^s))
    for j < k p^s (an int for Q_p, residue data for Iwasawa rings).
    """

    ring: CoeffRing
    s: int
    k: int
    entries: tuple

    def __post_init__(self):
        if len(self.entries) != len(stored_indices(self.s, self.p, self.k)):
            raise ValueError("wrong number of entries for this filtration level")

    @property
    def p(self) -> int:
        return self.ring.p

    def exponent(self, j: int) -> int:
        return fil_exponent(j, self.s, self.p, self.k)

    def elements(self) -> list:
        return [self.ring.residue_to_element(r) for r in self.entries]

    @classmethod
    def from_elements(cls, ring: CoeffRing, s: int, k: int, elements) -> "FiniteDistribution":
        entries = tuple(ring.reduce_a(ring(x), fil_exponent(j, s, ring.p, k)) for j, x in enumerate(elements))
        return cls(ring, s, k, entries)

    def __add__(self, other: "FiniteDistribution") -> "FiniteDistribution":
        self._check(other)
        return FiniteDistribution.from_elements(self.ring, self.s, self.k,
                                                [a + b for a, b in zip(self.elements(), other.elements())])

    def __sub__(self, other: "FiniteDistribution") -> "FiniteDistribution":
        self._check(other)
        return FiniteDistribution.from_elements(self.ring, self.s, self.k,
                                                [a - b for a, b in zip(self.elements(), other.elements())])

    def scale(self, n) -> "FiniteDistribution":
        r = self.ring(n)
        return FiniteDistribution.from_elements(self.ring, self.s, self.k, [r * x for x in self.elements()])

    def is_zero(self) -> bool:
        return all(not r for r in self.entries)

    def log_order(self) -> int:
        """log_p of the order of the ambient group D/Fil^k."""
        return quotient_log_order(self.ring, self.s, self.k)

    def _check(self, other):
        if (self.ring, self.s, self.k) != (other.ring, other.s, other.k):
            raise ValueError("quotients differ in ring, radius or level")

    def to_data(self) -> dict:
        rows = []
        for j, r in enumerate(self.entries):
            rows.append([j, self.exponent(j), r if self.ring.kind == QP else [[list(m), c] for m, c in r]])
        return {"p": self.p, "N": self.ring.N, "s": self.s, "k": self.k, "ring": self.ring.describe(),
                "entries": rows}

    @classmethod
    def from_data(cls, data: dict) -> "FiniteDistribution":
        ring = CoeffRing.from_description(data.get("ring", {"p": data["p"], "N": data["N"]}))
        s, k = int(data["s"]), int(data["k"])
        entries = []
        for j, (jj, n, r) in enumerate(data["entries"]):
            if int(jj) != j or int(n) != fil_exponent(j, s, ring.p, k):
                raise ValueError(f"entry {j} has the wrong index or modulus exponent")
            entries.append(int(r) if ring.kind == QP else tuple((tuple(m), int(c)) for m, c in r))
        return cls(ring, s, k, tuple(entries))


@dataclass(frozen=True)
class WeightKPolynomial:
    """A polynomial of degree at most k - 2 in X."""

    k: int
    coeffs: tuple

    def __post_init__(self):
        if self.k < 2:
            raise ValueError("k must be at least 2")
        if len(self.coeffs) > self.k - 1:
            raise ValueError(f"degree exceeds k - 2 = {self.k - 2}")

    def __eq__(self, other):
        if not isinstance(other, WeightKPolynomial) or other.k != self.k:
            return NotImplemented
        n = self.k - 1
        a = list(self.coeffs) + [0] * (n - len(self.coeffs))
        b = list(other.coeffs) + [0] * (n - len(other.coeffs))
        return all(x == y for x, y in zip(a, b))

    __hash__ = None

    def precision(self) -> int:
        return min((c.prec for c in self.coeffs if not isinstance(c, int)), default=10 ** 9)

    def to_data(self) -> dict:
        from .padic import serialize
        return {"k": self.k, "coeffs": [serialize(c) for c in self.coeffs]}


# operations ---------------------------------------------------------------------


def dirac(a, s: int, J: int, ring: CoeffRing) -> Distribution:
    """Evaluation at the p-adic integer a: m_j = e_j^s(a)."""
    ctx = ring.ctx
    if isinstance(a, int):
        return Distribution(ring, s, tuple(ring(v) for v in basis_values(a, J, s, ring.p)))
    a = PadicElement.from_value(ctx, a)
    if a.val < 0:
        raise PadicError("dirac needs a p-adic integer")
    vals = basis_values(a.lift(), J, s, ring.p)
    prec = [a.prec - _floor_log(j, ring.p) + valuation(math.factorial(j // ring.p ** s), ring.p) if j else ring.N
            for j in range(J)]
    return Distribution(ring, s, tuple(ring(v, q) for v, q in zip(vals, prec)))


def pair(mu: Distribution, f: AmiceFunction):
    """mu(f) = sum_j m_j c_j with the unseen terms folded into the precision."""
    if mu.s != f.s or mu.J != f.J or mu.ring.p != f.ring.p:
        raise ValueError("distribution and function have mismatched parameters")
    ring = mu.ring
    total = ring.zero()
    for m, c in zip(mu.moments, f.coeffs):
        total = total + m * ring(c)
    bound = None
    if f.tail is not None:
        bound = f.tail
    if mu.fil_level is not None:
        q = mu.p ** mu.s
        lvl = min((c.valuation() + mu.fil_level - j // q for j, c in enumerate(f.coeffs)), default=mu.fil_level)
        if ring.kind == IWASAWA:
            lvl -= ring.D
        bound = lvl if bound is None else min(bound, lvl)
    if bound is not None:
        total = ring(total, max(bound, 0))
    return total


def _check_weight(w: Weight, ring: CoeffRing):
    if w.ring.kind != ring.kind or w.ring.d != ring.d or w.p != ring.p:
        raise WeightError("weight and distribution rings differ")


def act_left(gamma: MonoidMatrix, mu: Distribution, w: Weight) -> Distribution:
    """(gamma mu)(f) = mu(f . gamma).

    Writing coef_i(g) through finite differences of g at 0..i and summing
    against the moments first gives the dual formula

        (gamma mu)_j = (1/F) sum_x U_x chi(cx + d) e_j^s(gamma x),

    with U_x = sum_{i >= x} (-1)^(i-x) binom(i, x) m_i F / floor(i/p^s)! and
    F = floor((J-1)/p^s)!, so the whole action costs O(J^2) integer steps.
    The stored moments stand for the representative whose higher moments
    vanish; for c != 0 that truncation is controlled by Fil^floor(J/p^s).
    """
    ring = mu.ring
    _check_weight(w, ring)
    if gamma.p != mu.p:
        raise ValueError("prime mismatch")
    s, J, p = mu.s, mu.J, mu.p
    if s < s_min(w):
        raise WeightError(f"s={s} is below s_min={s_min(w)}")
    if gamma.c != 0 and s < 1 + s_min(w):
        raise WeightError("the filtration that controls truncation needs s >= 1 + s_min")
    if J == 0:
        return mu
    q = p ** s
    P = min(mu.precision(), ring.N)
    F = math.factorial((J - 1) // q)
    vF = valuation(F, p)
    M = P + vF + _floor_log(J, p) + 2
    mod = p ** M
    monos = _monos(ring)
    vecs = [_to_vec(ring, m) for m in mu.moments]
    weights = [F // math.factorial(i // q) for i in range(J)]
    # U_x, processed in blocks of binomial rows
    U = [[0] * len(monos) for _ in range(J)]
    for i in range(J):
        wi = [c * weights[i] for c in vecs[i]]
        if not any(wi):
            continue
        binom = 1
        for x in range(i + 1):
            if x:
                binom = binom * (i - x + 1) // x
            sgn = binom if (i - x) % 2 == 0 else -binom
            row = U[x]
            for t, c in enumerate(wi):
                row[t] += sgn * c
    chis = char_values(w, [gamma.c * x + gamma.d for x in range(J)], s, M)
    chi_prec = min(_precision(c) for c in chis)
    Z = [_mul_vec(ring.with_precision(M), [c % mod for c in U[x]], ring.with_precision(M)(chis[x]), mod)
         for x in range(J)]
    # exact lifts of gamma x
    pts = []
    for x in range(J):
        den = gamma.c * x + gamma.d
        pts.append((gamma.a * x + gamma.b) * pow(den, -1, mod) % mod)
    S = [[0] * len(monos) for _ in range(J)]
    for x in range(J):
        zx = Z[x]
        if not any(zx):
            continue
        vals = basis_values(pts[x], J, s, p)
        for j, e in enumerate(vals):
            if e:
                row = S[j]
                for t, c in enumerate(zx):
                    row[t] += c * e
    # an inexact weight limits chi and hence the output; the guard digits cover the rest
    out_prec = min(P, chi_prec - vF, M - _floor_log(J, p) - vF)
    if out_prec <= 0:
        raise PrecisionError("character values carry too few digits for this length")
    pv = p ** vF
    inv = pow(F // pv, -1, mod)
    moments = []
    for row in S:
        vec = []
        for c in row:
            c %= mod
            if c % pv:
                raise PrecisionError("moment is not integral; the action left A^s,o")
            vec.append(c // pv * inv)
        moments.append(_from_vec(ring, vec, P))
    level = mu.fil_level
    if gamma.c != 0:
        level = _min_level(level, J // q)
    return Distribution(ring, s, tuple(moments), level)


def fil_quotient(mu: Distribution, k: int) -> FiniteDistribution:
    """Image of mu in D/Fil^k; entry j is m_j mod a^(k - v(lambda_j))."""
    if mu.s < 1:
        raise ValueError("the filtration needs s >= 1")
    ring = mu.ring
    idx = stored_indices(mu.s, mu.p, k)
    if k > 0:
        ring.check_quotient_level(k)
    if len(idx) > mu.J:
        raise PrecisionError(f"D/Fil^{k} needs {len(idx)} moments, only {mu.J} stored")
    if mu.fil_level is not None and mu.fil_level < k:
        raise PrecisionError(f"distribution is only known modulo Fil^{mu.fil_level}")
    entries = []
    for j in idx:
        n = fil_exponent(j, mu.s, mu.p, k)
        if mu.moments[j].prec < n:
            raise PrecisionError(f"moment {j} carries too few digits for level {k}")
        entries.append(ring.reduce_a(mu.moments[j], n))
    return FiniteDistribution(ring, mu.s, k, tuple(entries))


def lift_quotient(q: FiniteDistribution) -> Distribution:
    """The representative of q whose moments are the stored residues and zero beyond."""
    moments = [q.ring.lift(x) for x in q.elements()]
    return Distribution(q.ring, q.s, tuple(moments), q.k)


def act_on_quotient(gamma: MonoidMatrix, q: FiniteDistribution, w: Weight) -> FiniteDistribution:
    """Exact action on D/Fil^k, well defined because Fil^k is Delta_0(p)-stable."""
    if q.k == 0:
        return q
    if q.s < 1 + s_min(w):
        raise WeightError("D/Fil^k carries an action only for s >= 1 + s_min")
    return fil_quotient(act_left(gamma, lift_quotient(q), w), q.k)


def specialize_character(w: Weight, point) -> Weight:
    """The weight obtained by pushing chi along the ring map T -> point."""
    if w.ring.kind == QP:
        return w
    ring = CoeffRing.qp(w.ctx)
    return Weight(ring, w.t, w.c.evaluate(point))


def specialize_weight(mu: Distribution, point=None) -> Distribution:
    """Apply the ring map T_i -> point[i] to every moment.

    For Q_p distributions only the identity map (``point`` None or empty) is
    accepted.
    """
    ring = mu.ring
    if ring.kind == QP:
        if point:
            raise ValueError("Q_p distributions only admit the identity specialization")
        return mu
    target = CoeffRing.qp(ring.ctx)
    moments = tuple(m.evaluate(point) for m in mu.moments)
    return Distribution(target, mu.s, moments, mu.fil_level)


def stirling2(n: int, k: int) -> int:
    """Stirling numbers of the second kind."""
    row = [1] + [0] * k
    for i in range(1, n + 1):
        new = [0] * (k + 1)
        for j in range(1, min(i, k) + 1):
            new[j] = j * row[j] + row[j - 1]
        row = new
    return row[k]


def monomial_moment(mu: Distribution, i: int):
    """mu(x^i) = sum_j S(i, j) j!/floor(j/p^s)! m_j; the integer factors cost no precision."""
    if i >= mu.J:
        raise PrecisionError(f"mu(x^{i}) needs {i + 1} moments")
    ring = mu.ring
    q = mu.p ** mu.s
    total = ring.zero()
    for j in range(i + 1):
        factor = stirling2(i, j) * (math.factorial(j) // math.factorial(j // q))
        if factor:
            total = total + ring(mu.moments[j], mu.moment_precision(j)) * factor
    return total


def integrate_k(mu: Distribution, k: int) -> WeightKPolynomial:
    """i_k(mu) = integral of (1 + X x)^(k-2) dmu = sum_j binom(k-2, j) mu(x^j) X^j."""
    if k < 2:
        raise ValueError("k must be at least 2")
    if mu.ring.kind != QP:
        raise ValueError("integrate_k needs a Q_p distribution; specialize first")
    n = k - 2
    return WeightKPolynomial(k, tuple(monomial_moment(mu, j) * math.comb(n, j) for j in range(n + 1)))


def Lk_act(gamma: MonoidMatrix, P: WeightKPolynomial) -> WeightKPolynomial:
    """(gamma . P)(X) = (d + bX)^(k-2) P((c + aX)/(d + bX)), expanded exactly."""
    n = P.k - 2
    a, b, c, d = gamma.entries()
    coeffs = list(P.coeffs) + [0] * (n + 1 - len(P.coeffs))
    out = [0] * (n + 1)
    for i, pi in enumerate(coeffs):
        poly = _poly_pow([c, a], i)
        poly = _poly_mul(poly, _poly_pow([d, b], n - i))
        for e, coef in enumerate(poly):
            if coef:
                out[e] = out[e] + pi * coef
    ctx = next((x.ctx for x in coeffs if isinstance(x, PadicElement)), None)
    if ctx is not None:
        out = [PadicElement.from_value(ctx, x) if isinstance(x, int) else x for x in out]
    return WeightKPolynomial(P.k, tuple(out))


def _poly_mul(u: list[int], v: list[int]) -> list[int]:
    out = [0] * (len(u) + len(v) - 1)
    for i, x in enumerate(u):
        for j, y in enumerate(v):
            out[i + j] += x * y
    return out


def _poly_pow(u: list[int], e: int) -> list[int]:
    out = [1]
    for _ in range(e):
        out = _poly_mul(out, u)
    return out


def mahler_moments(mu: Distribution) -> list:
    """mu(binom(x, j)) = m_j / floor(j/p^s)!."""
    q = mu.p ** mu.s
    out = []
    for j, m in enumerate(mu.moments):
        m = mu.ring(m, mu.moment_precision(j))
        f = math.factorial(j // q)
        out.append(m.divide_int(f) if f > 1 else m)
    return out


def amice_transform(mu: Distribution, T_precision: int | None = None) -> list:
    """Coefficients of A_mu(T) = sum_j mu(binom(x, j)) T^j, truncated mod T^n."""
    n = mu.J if T_precision is None else T_precision
    if n > mu.J:
        raise PrecisionError(f"the transform mod T^{n} needs {n} moments")
    return mahler_moments(mu)[:n]


def binomial_series(a: int, n: int) -> list[int]:
    """(1 + T)^a mod T^n for any integer a."""
    out = []
    c = 1
    for j in range(n):
        out.append(c)
        c = c * (a - j) // (j + 1)  # exact: binom(a, j + 1) is an integer
    return out


def series_mul(u: list, v: list, n: int) -> list:
    """Product of truncated power series mod T^n."""
    out = [None] * n
    for i in range(n):
        total = None
        for j in range(i + 1):
            if j < len(u) and i - j < len(v):
                term = u[j] * v[i - j]
                total = term if total is None else total + term
        out[i] = total if total is not None else 0
    return out
