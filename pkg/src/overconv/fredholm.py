"""Fredholm determinants, Newton polygons and slope decompositions at finite rank.

Conventions.  For a square matrix M, ``fredholm_det`` returns
F(T) = det(1 - M T) = sum_i a_i T^i.  Its Newton polygon is the lower convex
hull of (i, v(a_i)); the slopes are the valuations of the eigenvalues.

A slope h is adapted to F when no slope of F equals h.  Then F = Q S where Q
collects the reciprocal roots of valuation <= h and S the others, with
Q(0) = S(0) = 1.  On the matrix side, with H(X) = X^m Q(1/X) and
G(X) = X^(n-m) S(1/X), a Bezout identity A H + B G = 1 gives the projector
e = B(M) G(M) onto the slope <= h part.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

from .padic import PadicContext, PadicElement, PadicError, PrecisionError, valuation
from .rings import IWASAWA, QP, CoeffRing, IwasawaElement


class NotSlopeAdapted(ValueError):
    """The requested slope h is a slope of the polygon, so no h-factorization is defined."""


# matrices -------------------------------------------------------------------


@dataclass(frozen=True)
class PadicMatrix:
    ring: CoeffRing
    rows: tuple

    def __post_init__(self):
        rows = tuple(tuple(self.ring(x) for x in row) for row in self.rows)
        if any(len(r) != len(rows) for r in rows):
            raise ValueError("matrix must be square")
        object.__setattr__(self, "rows", rows)

    @classmethod
    def from_ints(cls, ring: CoeffRing, rows) -> "PadicMatrix":
        return cls(ring, tuple(tuple(ring(int(x)) for x in r) for r in rows))

    @property
    def n(self) -> int:
        return len(self.rows)

    def precision(self) -> int:
        return min((x.prec for r in self.rows for x in r), default=self.ring.N)

    def min_valuation(self) -> int:
        vals = [x.valuation() for r in self.rows for x in r if not x.is_zero()]
        return min(vals) if vals else self.ring.N

    def __matmul__(self, other: "PadicMatrix") -> "PadicMatrix":
        n = self.n
        rows = []
        for i in range(n):
            row = []
            for j in range(n):
                acc = self.ring.zero()
                for k in range(n):
                    acc = acc + self.rows[i][k] * other.rows[k][j]
                row.append(acc)
            rows.append(tuple(row))
        return PadicMatrix(self.ring, tuple(rows))

    def __sub__(self, other: "PadicMatrix") -> "PadicMatrix":
        return PadicMatrix(self.ring, tuple(tuple(a - b for a, b in zip(r, s)) for r, s in zip(self.rows, other.rows)))

    def is_zero(self) -> bool:
        return all(x.is_zero() for r in self.rows for x in r)

    def trace(self):
        acc = self.ring.zero()
        for i in range(self.n):
            acc = acc + self.rows[i][i]
        return acc

    def to_jsonl(self) -> str:
        lines = [json.dumps({"ring": self.ring.describe()})]
        lines += [json.dumps([self.ring.serialize(x) for x in r]) for r in self.rows]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_jsonl(cls, text: str, ring: CoeffRing | None = None) -> "PadicMatrix":
        rows = []
        for line in text.splitlines():
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            if isinstance(obj, dict):
                ring = CoeffRing.from_description(obj["ring"])
                continue
            if ring is None:
                raise ValueError("matrix file has no ring header and no ring was supplied")
            rows.append(tuple(ring.parse(x) for x in obj))
        if ring is None:
            ring = CoeffRing.qp(PadicContext(3, 1))
        return cls(ring, tuple(rows))


def _lift_qp(x: PadicElement, shift: int) -> int:
    """p^shift * x as an integer (x's known digits taken as exact)."""
    if x.is_zero():
        return 0
    return x.unit * x.p ** (x.val + shift)


def berkowitz(A: list[list], zero, one) -> list:
    """Coefficients c_0..c_n of det(X - A), highest degree first, without divisions."""
    n = len(A)
    if n == 0:
        return [one]
    vect = [one, zero - A[0][0]]
    for r in range(1, n):
        R = A[r][:r]
        S = [A[i][r] for i in range(r)]
        col = [one, zero - A[r][r]]
        X = S
        for _ in range(r):
            acc = zero
            for a, b in zip(R, X):
                acc = acc + a * b
            col.append(zero - acc)
            X = [_dot(A[i][:r], X, zero) for i in range(r)]
        new = []
        for i in range(r + 2):
            acc = zero
            for j in range(min(i, r) + 1):
                if i - j < len(col):
                    acc = acc + col[i - j] * vect[j]
            new.append(acc)
        vect = new
    return vect


def _dot(u, v, zero):
    acc = zero
    for a, b in zip(u, v):
        acc = acc + a * b
    return acc


@dataclass(frozen=True)
class FredholmSeries:
    """det(1 - M T) as coefficients a_0 = 1, a_1, ..., a_n."""

    ring: CoeffRing
    coeffs: tuple

    def __post_init__(self):
        coeffs = tuple(self.ring(c) for c in self.coeffs)
        if not coeffs or not (coeffs[0] - 1).is_zero():
            raise ValueError("a Fredholm series has constant term 1")
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def degree_bound(self) -> int:
        return len(self.coeffs) - 1

    def precision(self) -> int:
        return min(c.prec for c in self.coeffs)

    def specialize(self, point) -> "FredholmSeries":
        if self.ring.kind == QP:
            return self
        target = CoeffRing.qp(self.ring.ctx)
        return FredholmSeries(target, tuple(c.evaluate(point) for c in self.coeffs))

    def __eq__(self, other):
        if not isinstance(other, FredholmSeries):
            return NotImplemented
        n = max(len(self.coeffs), len(other.coeffs))
        a = list(self.coeffs) + [self.ring.zero()] * (n - len(self.coeffs))
        b = list(other.coeffs) + [other.ring.zero()] * (n - len(other.coeffs))
        return all((x - y).is_zero() for x, y in zip(a, b))

    __hash__ = None

    def to_text(self) -> str:
        terms = []
        for i, c in enumerate(self.coeffs):
            s = self.ring.serialize(c)
            terms.append(f"({s})" + ("" if i == 0 else f"*T^{i}"))
        return " + ".join(terms)

    def to_data(self) -> dict:
        return {"ring": self.ring.describe(), "coeffs": [self.ring.serialize(c) for c in self.coeffs]}


def fredholm_det(M: PadicMatrix) -> FredholmSeries:
    """det(1 - M T) through the characteristic polynomial of exact lifts.

    An entry error of p^P moves the i-th coefficient, a sum of i x i minors, by
    at most p^(P + (i-1) v_min), which is the precision assigned to it.
    """
    ring = M.ring
    n = M.n
    P = M.precision()
    vmin = M.min_valuation()
    if ring.kind == QP:
        shift = max(0, -vmin)
        lifted = [[_lift_qp(x, shift) for x in r] for r in M.rows]
        char = berkowitz(lifted, 0, 1)
        coeffs = []
        for i, c in enumerate(char):
            prec = P + (i - 1) * vmin if i else ring.N
            prec = min(prec, ring.N)
            x = PadicElement.from_value(ring.ctx, Fraction(c, ring.p ** (shift * i)), prec)
            coeffs.append(x)
        return FredholmSeries(ring, tuple(coeffs))
    lifted = [[ring.lift(x) for x in r] for r in M.rows]
    char = berkowitz(lifted, ring.zero(), ring.one())
    coeffs = []
    for i, c in enumerate(char):
        prec = min(P + (i - 1) * vmin, ring.N) if i else ring.N
        coeffs.append(ring(c, prec))
    return FredholmSeries(ring, tuple(coeffs))


def specialize_family(M: PadicMatrix, point) -> PadicMatrix:
    """Entrywise ring map T_i -> point[i] from an Iwasawa family to Q_p."""
    if M.ring.kind != IWASAWA:
        return M
    target = CoeffRing.qp(M.ring.ctx)
    return PadicMatrix(target, tuple(tuple(x.evaluate(point) for x in r) for r in M.rows))


# Newton polygons ------------------------------------------------------------------


@dataclass(frozen=True)
class NewtonPolygon:
    """Slopes with multiplicities, strictly increasing.

    ``resolved_below``: slopes are certified only below this bound when
    trailing coefficients were indistinguishable from zero (None if the
    whole polygon is certified).
    """

    segments: tuple
    resolved_below: Fraction | None = None

    @property
    def degree(self) -> int:
        return sum(m for _, m in self.segments)

    def slopes(self) -> list[Fraction]:
        return [s for s, m in self.segments for _ in range(m)]

    def vertices(self) -> list[tuple[int, Fraction]]:
        pts = [(0, Fraction(0))]
        for s, m in self.segments:
            x, y = pts[-1]
            pts.append((x + m, y + s * m))
        return pts

    def value_at(self, x: int) -> Fraction:
        for (x0, y0), (x1, y1) in zip(self.vertices(), self.vertices()[1:]):
            if x0 <= x <= x1:
                return y0 + (y1 - y0) * (x - x0) / (x1 - x0)
        raise ValueError("abscissa outside the polygon")

    def lies_on_or_above(self, other: "NewtonPolygon") -> bool:
        """self >= other on the common domain, with other's domain at least as long."""
        if self.degree > other.degree:
            return False
        return all(y >= other.value_at(x) for x, y in self.vertices())

    def to_text(self) -> str:
        return "\n".join(f"{s.numerator}/{s.denominator} {m}" for s, m in self.segments)

    def to_data(self) -> dict:
        out = {"segments": [[f"{s.numerator}/{s.denominator}", m] for s, m in self.segments]}
        if self.resolved_below is not None:
            out["resolved_below"] = str(self.resolved_below)
        return out


def _lower_hull(points: list[tuple[int, Fraction]]) -> list[tuple[int, Fraction]]:
    hull: list[tuple[int, Fraction]] = []
    for pt in points:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            # drop hull[-1] if it lies on or above the chord hull[-2] -> pt
            if (y2 - y1) * (pt[0] - x1) >= (pt[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(pt)
    return hull


def _coeff_valuation(c) -> int | None:
    """p-adic valuation, or None when the coefficient is zero at its precision."""
    if c.is_zero():
        return None
    return c.valuation()


def newton_polygon(F: FredholmSeries) -> NewtonPolygon:
    known = [(i, Fraction(v)) for i, c in enumerate(F.coeffs) if (v := _coeff_valuation(c)) is not None]
    last = known[-1][0]
    hull = _lower_hull(known)
    segs: list[tuple[Fraction, int]] = []
    for (x0, y0), (x1, y1) in zip(hull, hull[1:]):
        s = (y1 - y0) / (x1 - x0)
        if segs and segs[-1][0] == s:
            segs[-1] = (s, segs[-1][1] + x1 - x0)
        else:
            segs.append((s, x1 - x0))
    poly = NewtonPolygon(tuple(segs))
    # unknown interior coefficients must not be able to undercut the hull
    for i, c in enumerate(F.coeffs):
        if i < last and c.is_zero() and Fraction(c.prec) < poly.value_at(i):
            raise PrecisionError(f"coefficient a_{i} has unknown valuation below the polygon")
    resolved = None
    trailing = [(i, c.prec) for i, c in enumerate(F.coeffs) if i > last]
    if trailing:
        y_last = poly.value_at(last) if last else Fraction(0)
        resolved = min((Fraction(prec) - y_last) / (i - last) for i, prec in trailing)
    return NewtonPolygon(poly.segments, resolved)


# slope factorization --------------------------------------------------------------


@dataclass(frozen=True)
class SlopeDatum:
    weight: str
    h: Fraction
    adapted: bool


def slope_datum(F: FredholmSeries, h, weight: str = "") -> SlopeDatum:
    h = Fraction(h)
    poly = newton_polygon(F)
    return SlopeDatum(weight, h, is_adapted(poly, h))


def is_adapted(poly: NewtonPolygon, h: Fraction) -> bool:
    if any(s == h for s, _ in poly.segments):
        return False
    if poly.resolved_below is not None and h >= poly.resolved_below:
        return False
    return True


def _round(x: Fraction, p: int, W: int) -> Fraction:
    """x modulo p^W (absolute), keeping the denominator's p-part."""
    if x == 0:
        return x
    e = valuation(x.denominator, p)
    d = x.denominator // p ** e
    mod = p ** (W + e)
    return Fraction(x.numerator * pow(d, -1, mod) % mod, p ** e)


def _pmul(u: list, v: list) -> list:
    out = [Fraction(0)] * (len(u) + len(v) - 1)
    for i, a in enumerate(u):
        if a:
            for j, b in enumerate(v):
                out[i + j] += a * b
    return out


def _fval(x: Fraction, p: int) -> float | int:
    if x == 0:
        return float("inf")
    return valuation(x.numerator, p) - valuation(x.denominator, p)


def _solve(A: list[list[Fraction]], b: list[Fraction]) -> list[Fraction]:
    n = len(A)
    M = [list(r) + [y] for r, y in zip(A, b)]
    for c in range(n):
        piv = next((i for i in range(c, n) if M[i][c] != 0), None)
        if piv is None:
            raise PrecisionError("singular Sylvester system in Hensel step")
        M[c], M[piv] = M[piv], M[c]
        inv = 1 / M[c][c]
        M[c] = [a * inv for a in M[c]]
        for i in range(n):
            if i != c and M[i][c] != 0:
                f = M[i][c]
                M[i] = [a - f * bb for a, bb in zip(M[i], M[c])]
    return [M[i][n] for i in range(n)]


def _resultant_valuation(Q: list[Fraction], S: list[Fraction], p: int):
    """v_p of the determinant of the linear map (dQ, dS) -> S dQ + Q dS (dQ(0) = dS(0) = 0)."""
    m, k = len(Q) - 1, len(S) - 1
    n = m + k
    cols = []
    for a in range(1, m + 1):
        cols.append(_pmul([Fraction(0)] * a + [Fraction(1)], S))
    for b in range(1, k + 1):
        cols.append(_pmul([Fraction(0)] * b + [Fraction(1)], Q))
    A = [[(col[r] if r < len(col) else Fraction(0)) for col in cols] for r in range(1, n + 1)]
    det = _det(A)
    if det == 0:
        raise PrecisionError("factors are not coprime")
    return _fval(det, p), A


def _det(A):
    n = len(A)
    M = [list(r) for r in A]
    det = Fraction(1)
    for c in range(n):
        piv = next((i for i in range(c, n) if M[i][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            M[c], M[piv] = M[piv], M[c]
            det = -det
        det *= M[c][c]
        for i in range(c + 1, n):
            if M[i][c] != 0:
                f = M[i][c] / M[c][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[c])]
    return det


@dataclass(frozen=True)
class SlopeFactorization:
    Q: FredholmSeries
    S: FredholmSeries
    precision: int


def slope_factor(F: FredholmSeries, h) -> SlopeFactorization:
    """F = Q S with Q the slope <= h part, by Newton iteration on the coefficients.

    The initial guess splits F at the polygon vertex above m = multiplicity of
    slopes <= h.  Each step solves S dQ + Q dS = F - Q S exactly; the result is
    certified a posteriori (residual, polygons of both factors), and its
    precision is the input precision minus the valuation of the Jacobian.
    """
    if F.ring.kind != QP:
        raise ValueError("slope factorization works over Q_p; specialize families first")
    h = Fraction(h)
    poly = newton_polygon(F)
    if not is_adapted(poly, h):
        raise NotSlopeAdapted(f"h = {h} is not adapted to the polygon {poly.to_data()['segments']}")
    ring = F.ring
    p = ring.p
    m = sum(mult for s, mult in poly.segments if s < h)
    n = poly.degree
    a = [c.to_fraction() for c in F.coeffs[: n + 1]]
    P = min(c.prec for c in F.coeffs[: n + 1])
    if m == n:
        return SlopeFactorization(F, FredholmSeries(ring, (ring.one(),)), P)
    if m == 0:
        return SlopeFactorization(FredholmSeries(ring, (ring.one(),)), F, P)
    k = n - m
    Q = a[: m + 1]
    S = [Fraction(1)] + [x / a[m] for x in a[m + 1:]]
    W = P + n + 10
    for _ in range(200):
        E = _pmul(Q, S)
        E = [x - y for x, y in zip(a + [Fraction(0)] * (len(E) - len(a)), E)]
        if all(_fval(e, p) >= W for e in E):
            break
        _, A = _resultant_valuation(Q, S, p)
        delta = _solve(A, E[1: n + 1])
        Q = [Q[0]] + [_round(q + d, p, W) for q, d in zip(Q[1:], delta[:m])]
        S = [S[0]] + [_round(s + d, p, W) for s, d in zip(S[1:], delta[m:])]
    else:
        raise PrecisionError("Hensel iteration did not converge")
    vres, _ = _resultant_valuation(Q, S, p)
    prec = P - max(int(vres), 0)
    if prec <= 0:
        raise PrecisionError("input precision cannot certify the slope factorization")
    QF = FredholmSeries(ring, tuple(PadicElement.from_value(ring.ctx, q, prec) for q in Q))
    SF = FredholmSeries(ring, tuple(PadicElement.from_value(ring.ctx, s, prec) for s in S))
    pq, ps = newton_polygon(QF), newton_polygon(SF)
    if any(s > h for s in pq.slopes()) or any(s < h for s in ps.slopes()) or pq.degree != m or ps.degree != k:
        raise PrecisionError("factorization failed its polygon certification")
    return SlopeFactorization(QF, SF, prec)


# slope decomposition ----------------------------------------------------------------


def _poly_divmod(u: list[Fraction], v: list[Fraction]):
    """Division with remainder; coefficient lists are lowest degree first."""
    u = list(u)
    while len(v) > 1 and v[-1] == 0:
        v = v[:-1]
    q = [Fraction(0)] * max(len(u) - len(v) + 1, 1)
    while len(u) >= len(v) and any(u):
        if u[-1] == 0:
            u.pop()
            continue
        c = u[-1] / v[-1]
        d = len(u) - len(v)
        q[d] = c
        for i, x in enumerate(v):
            u[i + d] -= c * x
        u.pop()
    return q, u or [Fraction(0)]


def _trim(u):
    u = list(u)
    while len(u) > 1 and u[-1] == 0:
        u.pop()
    return u


def _psub(u, v):
    n = max(len(u), len(v))
    u = list(u) + [Fraction(0)] * (n - len(u))
    v = list(v) + [Fraction(0)] * (n - len(v))
    return _trim([x - y for x, y in zip(u, v)])


def bezout(H: list[Fraction], G: list[Fraction]):
    """(A, B) with A H + B G = 1 over Q, by the extended Euclidean algorithm."""
    r0, r1 = _trim(H), _trim(G)
    s0, s1 = [Fraction(1)], [Fraction(0)]
    t0, t1 = [Fraction(0)], [Fraction(1)]
    while any(r1):
        q, r = _poly_divmod(r0, r1)
        r0, r1 = r1, _trim(r)
        s0, s1 = s1, _psub(s0, _pmul(q, s1))
        t0, t1 = t1, _psub(t0, _pmul(q, t1))
    if len(r0) != 1 or r0[0] == 0:
        raise PrecisionError("the two factors are not coprime")
    c = r0[0]
    return [x / c for x in s0], [x / c for x in t0]


def _mat_poly(coeffs: list[Fraction], M: list[list[Fraction]]) -> list[list[Fraction]]:
    n = len(M)
    out = [[Fraction(0)] * n for _ in range(n)]
    for c in reversed(coeffs):  # Horner
        out = _fmatmul(out, M)
        for i in range(n):
            out[i][i] += c
    return out


def _fmatmul(A, B):
    n = len(A)
    return [[sum(A[i][k] * B[k][j] for k in range(n)) for j in range(n)] for i in range(n)]


@dataclass(frozen=True)
class SlopeDecomposition:
    projector: PadicMatrix
    basis: tuple
    rank: int
    factorization: SlopeFactorization
    precision: int


def slope_decompose(M: PadicMatrix, h) -> SlopeDecomposition:
    """Projector onto the slope <= h part and a basis of its image."""
    ring = M.ring
    if ring.kind != QP:
        raise ValueError("slope decomposition works over Q_p")
    p = ring.p
    n = M.n
    F = fredholm_det(M)
    fac = slope_factor(F, h)
    m = fac.Q.degree_bound
    Mf = [[x.to_fraction() for x in r] for r in M.rows]
    if m == n:
        e = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
        Bfull = [Fraction(1)]
    elif m == 0:
        e = [[Fraction(0)] * n for _ in range(n)]
        Bfull = [Fraction(0)]
    else:
        q = [c.to_fraction() for c in fac.Q.coeffs]
        s = [c.to_fraction() for c in fac.S.coeffs]
        H = list(reversed(q))  # X^m Q(1/X), lowest degree first
        G = [Fraction(0)] * (n - m - (len(s) - 1)) + list(reversed(s))  # zero eigenvalues go to G
        A, B = bezout(H, G)
        Bfull = _pmul(B, G)
        e = _mat_poly(Bfull, Mf)
    vB = min((_fval(c, p) for c in Bfull if c), default=0)
    prec = min(fac.precision + min(int(vB), 0), ring.N)
    e2 = _fmatmul(e, e)
    idem = min((_fval(x - y, p) for r1, r2 in zip(e2, e) for x, y in zip(r1, r2)), default=float("inf"))
    if idem != float("inf"):
        prec = min(prec, int(idem))
    if prec <= 0:
        raise PrecisionError("projector could not be certified at positive precision")
    proj = PadicMatrix(ring, tuple(tuple(PadicElement.from_value(ring.ctx, x, prec) for x in r) for r in e))
    tr = sum(e[i][i] for i in range(n))
    if _fval(tr - m, p) < prec:
        raise PrecisionError("projector trace does not match the slope multiplicity")
    basis = _column_basis(e, m, p, ring.ctx, prec)
    return SlopeDecomposition(proj, basis, m, fac, prec)


def _column_basis(e, m: int, p: int, ctx: PadicContext, prec: int) -> tuple:
    """m columns of e spanning its image, chosen by p-adic pivoting."""
    n = len(e)
    cols = [[e[i][j] for i in range(n)] for j in range(n)]
    chosen = []
    work = [list(c) for c in cols]
    used_rows: set[int] = set()
    for _ in range(m):
        best = None
        for j, c in enumerate(work):
            if j in [b for b, _ in chosen]:
                continue
            for i, x in enumerate(c):
                if i in used_rows or x == 0:
                    continue
                v = _fval(x, p)
                if best is None or v < best[0]:
                    best = (v, j, i)
        if best is None:
            break
        _, j, i = best
        chosen.append((j, i))
        used_rows.add(i)
        piv = work[j]
        for jj, c in enumerate(work):
            if jj != j and c[i] != 0:
                f = c[i] / piv[i]
                work[jj] = [a - f * b for a, b in zip(c, piv)]
    return tuple(tuple(PadicElement.from_value(ctx, x, prec) for x in cols[j]) for j, _ in chosen)
