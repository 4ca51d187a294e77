"""The twelve acceptance criteria at their stated parameters; one PASS/FAIL line each."""

import time

import pytest

from overconv import suites
from overconv.fredholm import NotSlopeAdapted, PadicMatrix, fredholm_det, slope_factor
from overconv.padic import PadicContext
from overconv.rings import CoeffRing

from conftest import ACCEPTANCE_LINES

SEED = 20240601


def report(number: int, title: str, results, ok: bool, elapsed: float, extra: str = "") -> bool:
    inst = sum(r.instances for r in results)
    precs = [r.precision for r in results if r.precision is not None]
    prec = min(precs) if precs else "-"
    line = (f"{'PASS' if ok else 'FAIL'}  C{number:<2} {title:<28} instances={inst:<5} "
            f"prec={prec!s:<4} time={elapsed:.2f}s {extra}").rstrip()
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def run(fns):
    t0 = time.perf_counter()
    results = [f() for f in fns]
    return results, time.perf_counter() - t0


def failures(results):
    return "; ".join(f"{r.name}: {r.failures}" for r in results if not r.passed)


def test_c01_character_extension():
    N = 20
    results, dt = run([lambda p=p: suites.character_extension(p, N, SEED, count=100, ks=range(2, 11))
                       for p in (3, 5)])
    ok = all(r.passed and r.precision >= N - 3 for r in results) and dt < 5
    assert report(1, "character extension", results, ok, dt), failures(results) or f"time {dt:.2f}s"


def test_c02_amice_roundtrip():
    results, dt = run([lambda p=p: suites.amice_roundtrip(p, 20, SEED, count=50) for p in (3, 5)])
    ok = all(r.passed for r in results)
    assert report(2, "Amice round-trip", results, ok, dt), failures(results)


def test_c03_action_laws():
    fns = []
    for p in (3, 5):
        fns += [lambda p=p: suites.right_action(p, 12, SEED, count=25),
                lambda p=p: suites.left_action_quotient(p, 12, SEED, count=25),
                lambda p=p: suites.congruence_triviality(p, 12, SEED, count=10)]
    results, dt = run(fns)
    ok = all(r.passed for r in results)
    assert report(3, "action laws", results, ok, dt), failures(results)


def test_c04_integration_equivariance():
    N = 16
    results, dt = run([lambda: suites.integration_equivariance(3, N, SEED, count=20, ks=range(2, 9))])
    ok = all(r.passed and r.precision >= N for r in results)
    assert report(4, "integration equivariance", results, ok, dt), failures(results)


def test_c05_es_equivariance():
    N = 12
    results, dt = run([lambda p=p: suites.es_equivariance(p, N, SEED, count=30) for p in (3, 5)])
    # declared slack is 0: every instance is certified to the full working precision
    ok = all(r.passed and r.precision >= N for r in results) and dt < 30
    assert report(5, "Eichler-Shimura equivariance", results, ok, dt, "slack=0"), failures(results) or f"{dt:.2f}s"


def test_c06_factor_weight_k():
    results, dt = run([lambda p=p: suites.factor_weight_k(p, 12, SEED, count=20) for p in (3, 5)])
    ok = all(r.passed for r in results)
    assert report(6, "factorization for k >= 2", results, ok, dt), failures(results)


def test_c07_slope_machinery():
    results, dt = run([lambda: suites.slope_machinery(3, suites.SLOPE_PRECISION, SEED, count=20, max_n=8)])
    # non-adapted h raises, adapted h between slopes factors
    ring = CoeffRing.qp(PadicContext(3, 40))
    F = fredholm_det(PadicMatrix.from_ints(ring, [[1, 0], [0, 9]]))
    ok = all(r.passed for r in results) and dt < 10
    for h, adapted in ((0, False), (1, True), (2, False), (3, True)):
        try:
            slope_factor(F, h)
            ok = ok and adapted
        except NotSlopeAdapted:
            ok = ok and not adapted
    assert report(7, "slope machinery", results, ok, dt), failures(results) or f"{dt:.2f}s"


def test_c08_family_specialization():
    results, dt = run([lambda p=p: suites.family_specialization(p, 12, SEED, count=10) for p in (3, 5)])
    ok = all(r.passed for r in results)
    assert report(8, "family specialization", results, ok, dt), failures(results)


def test_c09_amice_translation():
    results, dt = run([lambda p=p: suites.amice_translation(p, 12, SEED, count=20) for p in (3, 5)])
    ok = all(r.passed for r in results)
    assert report(9, "Amice transform translation", results, ok, dt), failures(results)


def test_c10_degree_recurrence():
    results, dt = run([lambda p=p: suites.degree_recurrence(p, 0, SEED, max_n=30) for p in (3, 5, 7)])
    ok = all(r.passed and r.instances == 30 for r in results)
    assert report(10, "degree recurrence", results, ok, dt), failures(results)


def test_c11_mixed_tensor_exactness():
    results, dt = run([lambda p=p: suites.mixed_tensor_exactness(p, 0, SEED, max_log_order=3, max_labels=3)
                       for p in (3, 5)])
    ok = all(r.passed and r.instances > 0 for r in results)
    assert report(11, "mixed tensor exactness", results, ok, dt), failures(results)


def test_c12_filtration_finiteness():
    results, dt = run([lambda p=p: suites.filtration_finiteness(p, 8, SEED, max_k=3, radii=(1, 2)) for p in (3, 5)])
    ok = all(r.passed for r in results)
    assert report(12, "filtration finiteness", results, ok, dt), failures(results)


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
