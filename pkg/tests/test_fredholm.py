import random
from fractions import Fraction

import pytest

from overconv.fredholm import (FredholmSeries, NotSlopeAdapted, PadicMatrix, fredholm_det, newton_polygon,
                               slope_decompose, slope_factor, specialize_family)
from overconv.padic import PadicContext, PadicElement, PrecisionError
from overconv.rings import CoeffRing
from overconv.suites import _imul, _unimodular, prescribed_slope_matrix

P = 3
CTX = PadicContext(P, 80)
R = CoeffRing.qp(CTX)
RNG = random.Random(31)


def M(rows):
    return PadicMatrix.from_ints(R, rows)


def series(*coeffs):
    return FredholmSeries(R, tuple(R(c) for c in coeffs))


def segs(poly):
    return [(s, m) for s, m in poly.segments]


def test_det_examples():
    F = fredholm_det(M([[0, 0], [0, 0]]))
    assert F == series(1)
    assert fredholm_det(M([[3, 0], [0, 9]])) == series(1, -12, 27)


def test_det_conjugation_invariant():
    for _ in range(20):
        n = RNG.randrange(2, 6)
        A = [[RNG.randrange(-9, 10) for _ in range(n)] for _ in range(n)]
        U, Ui = _unimodular(RNG, n)
        assert fredholm_det(M(A)) == fredholm_det(M(_imul(_imul(U, A), Ui)))


def test_polygon_examples():
    assert segs(newton_polygon(series(1))) == []
    assert segs(newton_polygon(series(1, -3))) == [(1, 1)]
    # (1 - T)(1 - 3T)^2
    assert segs(newton_polygon(series(1, -7, 15, -9))) == [(0, 1), (1, 2)]
    assert newton_polygon(fredholm_det(M([[0, 3], [1, 0]]))).to_text() == "1/2 2"


def test_polygon_reports_unresolved_tail():
    poly = newton_polygon(fredholm_det(M([[0, 0], [0, 0]])))
    assert poly.segments == () and poly.resolved_below is not None


def test_polygon_rejects_undecidable_interior():
    ring = CoeffRing.qp(PadicContext(3, 10))
    a1 = PadicElement.from_value(ring.ctx, 0, 1)
    F = FredholmSeries(ring, (ring(1), a1, ring(27)))
    with pytest.raises(PrecisionError):
        newton_polygon(F)
    F = FredholmSeries(ring, (ring(1), a1, ring(1)))  # O(3) cannot undercut a flat hull
    assert newton_polygon(F).slopes() == [0, 0]


def test_slope_factor_examples():
    F = series(1, -10, 9)  # (1 - T)(1 - 9T)
    fac = slope_factor(F, 1)
    assert fac.Q == series(1, -1) and fac.S == series(1, -9)
    big = slope_factor(F, 5)
    assert big.Q == F and big.S == series(1)
    with pytest.raises(NotSlopeAdapted):
        slope_factor(series(1, -6, 9), 1)  # (1 - 3T)^2: h = 1 sits on the segment


def test_slope_factor_product_and_polygon():
    for _ in range(10):
        rows, vals = prescribed_slope_matrix(RNG, P, RNG.randrange(2, 7))
        F = fredholm_det(M(rows))
        h = Fraction(min(vals)) + Fraction(1, 3)
        fac = slope_factor(F, h)
        n = len(F.coeffs)
        prod = [R(0)] * n
        for i, q in enumerate(fac.Q.coeffs):
            for j, s in enumerate(fac.S.coeffs):
                if i + j < n:
                    prod[i + j] = prod[i + j] + q * s
        assert all(R(a - b, fac.precision).is_zero() for a, b in zip(prod, F.coeffs))
        assert newton_polygon(fac.Q).slopes() == [s for s in newton_polygon(F).slopes() if s <= h]


def test_slope_decompose_examples():
    dec = slope_decompose(M([[2, 1], [1, 5]]), 10)
    assert dec.rank == 2 and (dec.projector - M([[1, 0], [0, 1]])).is_zero()
    U, Ui = _unimodular(RNG, 2)
    A = M(_imul(_imul(U, [[1, 0], [0, 27]]), Ui))
    dec = slope_decompose(A, 1)
    e = dec.projector
    assert dec.rank == 1 and (e @ e - e).is_zero() and (e @ A - A @ e).is_zero()
    assert (e.trace() - 1).is_zero()


def test_slope_decompose_random():
    for _ in range(20):
        rows, vals = prescribed_slope_matrix(RNG, P, RNG.randrange(1, 7))
        A = M(rows)
        h = Fraction(min(vals)) + Fraction(1, 2)
        dec = slope_decompose(A, h)
        e = dec.projector
        assert (e @ e - e).is_zero() and (e @ A - A @ e).is_zero()
        assert (e.trace() - vals.count(min(vals))).is_zero()
        assert dec.precision >= 40


def test_matrix_roundtrip():
    A = M([[1, 2], [3, 4]])
    assert PadicMatrix.from_jsonl(A.to_jsonl()).rows == A.rows


def test_family_specialization():
    ctx = PadicContext(3, 12)
    S = CoeffRing.iwasawa(ctx, 1, 4)
    T = S.gen(0)
    fam = PadicMatrix(S, ((1 + T, S(0)), (S(0), S(3))))
    at = [ctx(3)]
    F = fredholm_det(specialize_family(fam, at))
    assert F == fredholm_det(fam).specialize(at)
    assert [c.residue(c.prec) for c in F.coeffs] == [1, (-(4 + 3)) % 3 ** F.coeffs[1].prec, 12 % 3 ** F.coeffs[2].prec]
    const = PadicMatrix(S, ((S(2), S(3)), (S(1), S(0))))
    assert fredholm_det(specialize_family(const, [ctx(0)])) == fredholm_det(
        PadicMatrix.from_ints(CoeffRing.qp(ctx), [[2, 3], [1, 0]]))
    fam_poly = newton_polygon(fredholm_det(fam))
    for _ in range(10):
        pt = [ctx(3 * RNG.randrange(1, 50))]
        assert newton_polygon(fredholm_det(specialize_family(fam, pt))).lies_on_or_above(fam_poly)
