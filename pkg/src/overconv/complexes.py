"""Finite cochain complexes with coefficients in D/Fil^k built from templates.

Template grammar (JSON)::

    {
      "ranks": [r_0, r_1, ...],                 # C^i = (D/Fil^k)^(r_i)
      "s": 1,                                   # optional radius, default 1
      "boundaries": [d_0, d_1, ...],            # d_i : C^i -> C^(i+1), r_(i+1) rows x r_i columns
      "utilde": [U_0, U_1, ...]                 # optional, U_i : C^i -> C^i
    }

Every matrix entry is a list of ``[coefficient, [[a, b], [c, d]]]`` pairs, an
element of the monoid ring Z[Delta_0(p)].  Entries act on D/Fil^k through the
exact quotient action; all linear algebra is over Z with the relations of
the finite modules.
"""

from __future__ import annotations

from dataclasses import dataclass

from .distributions import FiniteDistribution, act_on_quotient, fil_exponent, stored_indices
from .fredholm import FredholmSeries, berkowitz
from .monoid import MonoidMatrix
from .padic import PadicContext, PadicElement
from .rings import QP, CoeffRing
from .snf import FiniteModule, cochain_cohomology, matmul, matvec, solve_in_basis
from .weights import Weight


class TemplateError(ValueError):
    """The template is malformed or its instantiation is not a complex."""


@dataclass(frozen=True)
class BSComplexTemplate:
    ranks: tuple
    boundaries: tuple  # of matrices of entries; entry = tuple of (coeff, MonoidMatrix)
    utilde: tuple | None = None
    s: int = 1

    @classmethod
    def from_data(cls, data: dict, p: int) -> "BSComplexTemplate":
        if not isinstance(data, dict) or "ranks" not in data:
            raise TemplateError("template needs a 'ranks' list")
        ranks = data["ranks"]
        if not isinstance(ranks, list) or not all(isinstance(r, int) and r >= 0 for r in ranks):
            raise TemplateError("ranks must be nonnegative integers")
        bds = data.get("boundaries", [])
        if len(bds) != max(len(ranks) - 1, 0):
            raise TemplateError(f"expected {max(len(ranks) - 1, 0)} boundary matrices, got {len(bds)}")
        boundaries = tuple(_parse_matrix(b, ranks[i + 1], ranks[i], p, f"boundary {i}") for i, b in enumerate(bds))
        utilde = None
        if "utilde" in data and data["utilde"] is not None:
            us = data["utilde"]
            if len(us) != len(ranks):
                raise TemplateError("utilde needs one matrix per degree")
            utilde = tuple(_parse_matrix(u, ranks[i], ranks[i], p, f"utilde {i}") for i, u in enumerate(us))
        s = data.get("s", 1)
        if not isinstance(s, int) or s < 1:
            raise TemplateError("s must be a positive integer")
        unknown = set(data) - {"ranks", "boundaries", "utilde", "s"}
        if unknown:
            raise TemplateError(f"unknown template keys: {sorted(unknown)}")
        return cls(tuple(ranks), boundaries, utilde, s)

    def to_data(self) -> dict:
        out = {"ranks": list(self.ranks), "s": self.s,
               "boundaries": [_dump_matrix(b) for b in self.boundaries]}
        if self.utilde is not None:
            out["utilde"] = [_dump_matrix(u) for u in self.utilde]
        return out


def _parse_matrix(rows, nrows: int, ncols: int, p: int, what: str):
    if not isinstance(rows, list) or len(rows) != nrows or any(not isinstance(r, list) or len(r) != ncols for r in rows):
        raise TemplateError(f"{what} must be a {nrows} x {ncols} matrix")
    out = []
    for row in rows:
        new = []
        for entry in row:
            if not isinstance(entry, list):
                raise TemplateError(f"{what}: entries are lists of [coefficient, matrix] pairs")
            terms = []
            for term in entry:
                try:
                    coeff, mat = term
                    if not isinstance(coeff, int):
                        raise TypeError
                    terms.append((coeff, MonoidMatrix.from_data(mat, p)))
                except (TypeError, ValueError) as exc:
                    raise TemplateError(f"{what}: bad term {term!r}: {exc}") from exc
            new.append(tuple(terms))
        out.append(tuple(new))
    return tuple(out)


def _dump_matrix(M):
    return [[[[c, g.to_data()] for c, g in entry] for entry in row] for row in M]


# instantiation -----------------------------------------------------------------


def quotient_generators(ring: CoeffRing, s: int, k: int) -> list[tuple[int, tuple, int]]:
    """(index j, monomial, order exponent) for the cyclic generators of D/Fil^k."""
    gens = []
    for j in stored_indices(s, ring.p, k):
        n = fil_exponent(j, s, ring.p, k)
        if ring.kind == QP:
            gens.append((j, (), n))
        else:
            for m in ring.monomials():
                if n - sum(m) > 0:
                    gens.append((j, m, n - sum(m)))
    return gens


def _unit_quotient(ring: CoeffRing, s: int, k: int, j: int, mono: tuple) -> FiniteDistribution:
    elems = [ring.zero()] * len(stored_indices(s, ring.p, k))
    elems[j] = ring(1) if ring.kind == QP else ring({mono: 1})
    return FiniteDistribution.from_elements(ring, s, k, elems)


def _coordinates(q: FiniteDistribution, gens) -> list[int]:
    if q.ring.kind == QP:
        return [int(q.entries[j]) for j, _, _ in gens]
    table = {}
    for j, r in enumerate(q.entries):
        for mono, c in r:
            table[(j, tuple(mono))] = c
    return [table.get((j, m), 0) for j, m, _ in gens]


class _ActionCache:
    def __init__(self, w: Weight, s: int, k: int):
        self.w, self.s, self.k = w, s, k
        self.ring = w.ring
        self.gens = quotient_generators(self.ring, s, k)
        self.units = [_unit_quotient(self.ring, s, k, j, m) for j, m, _ in self.gens]
        self.cache: dict = {}

    def matrix(self, gamma: MonoidMatrix) -> list[list[int]]:
        key = gamma.entries()
        if key not in self.cache:
            cols = [_coordinates(act_on_quotient(gamma, u, self.w), self.gens) for u in self.units]
            self.cache[key] = [list(r) for r in zip(*cols)] if cols else []
        return self.cache[key]

    def entry_matrix(self, entry) -> list[list[int]]:
        g = len(self.gens)
        out = [[0] * g for _ in range(g)]
        for coeff, gamma in entry:
            A = self.matrix(gamma)
            for i in range(g):
                for j in range(g):
                    out[i][j] += coeff * A[i][j]
        return out


@dataclass(frozen=True)
class FiniteComplex:
    modules: tuple  # FiniteModule per degree
    maps: tuple     # integer matrices, maps[i] : C^i -> C^(i+1)
    utilde: tuple | None
    generator_orders: tuple  # exponents of the cyclic generators of D/Fil^k
    p: int
    k: int

    def log_orders(self) -> list[int]:
        return [sum(_log_p(d, self.p) for d in M.invariants()) for M in self.modules]


def _log_p(n: int, p: int) -> int:
    e = 0
    while n % p == 0 and n > 1:
        n //= p
        e += 1
    return e


def _block(entries, cache: _ActionCache, nrows: int, ncols: int) -> list[list[int]]:
    g = len(cache.gens)
    out = [[0] * (ncols * g) for _ in range(nrows * g)]
    for a in range(nrows):
        for b in range(ncols):
            E = cache.entry_matrix(entries[a][b])
            for i in range(g):
                for j in range(g):
                    out[a * g + i][b * g + j] = E[i][j]
    return out


def _columns_vanish(A: list[list[int]], target: FiniteModule) -> bool:
    if not A:
        return True
    ncols = len(A[0])
    return all(target.is_zero_vector([row[c] for row in A]) for c in range(ncols))


def _module(orders: list[int], r: int, p: int) -> FiniteModule:
    return FiniteModule.cyclic_sum([p ** e for e in orders] * r)


def instantiate(t: BSComplexTemplate, w: Weight, k: int) -> FiniteComplex:
    """C^i = (D/Fil^k)^(r_i) with the template's boundaries; d^2 = 0 and the
    chain-map property of U are verified, never assumed."""
    if k < 1:
        raise TemplateError("filtration level must be at least 1")
    cache = _ActionCache(w, t.s, k)
    orders = [e for _, _, e in cache.gens]
    p = w.p
    modules = tuple(_module(orders, r, p) for r in t.ranks)
    maps = tuple(_block(d, cache, t.ranks[i + 1], t.ranks[i]) for i, d in enumerate(t.boundaries))
    for i in range(len(maps) - 1):
        if not _columns_vanish(matmul(maps[i + 1], maps[i]), modules[i + 2]):
            raise TemplateError(f"d_{i + 1} o d_{i} is not zero on D/Fil^{k}")
    utilde = None
    if t.utilde is not None:
        utilde = tuple(_block(u, cache, r, r) for u, r in zip(t.utilde, t.ranks))
        for i, d in enumerate(maps):
            lhs = matmul(d, utilde[i])
            rhs = matmul(utilde[i + 1], d)
            diff = [[x - y for x, y in zip(r1, r2)] for r1, r2 in zip(lhs, rhs)]
            if not _columns_vanish(diff, modules[i + 1]):
                raise TemplateError(f"utilde does not commute with d_{i}")
    return FiniteComplex(modules, maps, utilde, tuple(orders), p, k)


def cohomology(C: FiniteComplex) -> list[list[int]]:
    """Orders of the cyclic summands of H^i, one sorted list per degree."""
    return [sorted(d for d in D if d != 1) for D, _ in cochain_cohomology(list(C.modules), list(C.maps))]


@dataclass(frozen=True)
class CohomologySeries:
    degree: int
    invariants: tuple
    series: FredholmSeries
    precision: int
    matrix: tuple = ()  # induced endomorphism on the cyclic generators of H^i


def utilde_fredholm(C: FiniteComplex) -> list[CohomologySeries]:
    """det(1 - U T) of the endomorphism U induces on each H^i.

    H^i = (+) Z/p^(e_t) is free over Z/p^e only up to e = min e_t, so the series
    is certified modulo p^(min e_t) (modulo p^k when H^i is free over Z/p^k).
    """
    if C.utilde is None:
        raise TemplateError("template carries no utilde lift")
    out = []
    for i, (D, basis) in enumerate(cochain_cohomology(list(C.modules), list(C.maps))):
        idx = [t for t, d in enumerate(D) if d != 1]
        if not idx:
            ctx = PadicContext(C.p, max(C.k, 1))
            out.append(CohomologySeries(i, (), FredholmSeries(CoeffRing.qp(ctx), (ctx.one(),)), C.k, ()))
            continue
        exps = [_log_p(D[t], C.p) for t in idx]
        e = min(exps)
        U = C.utilde[i]
        mat = []
        for t in idx:
            coords = solve_in_basis(basis, matvec(U, basis[t]))
            mat.append([coords[u] for u in idx])
        mat = [[x % D[idx[a]] for x in col] for a, col in enumerate(zip(*mat))]  # column t = image of generator t
        mod = C.p ** e
        char = berkowitz([[x % mod for x in row] for row in mat], 0, 1)
        ctx = PadicContext(C.p, e)
        coeffs = tuple(PadicElement.from_value(ctx, c % mod, e) for c in char)
        out.append(CohomologySeries(i, tuple(D[t] for t in idx), FredholmSeries(CoeffRing.qp(ctx), coeffs), e,
                                    tuple(tuple(r) for r in mat)))
    return out


def tower_compatible(t: BSComplexTemplate, w: Weight, k: int) -> bool:
    """Series at level k reduce to the series at level k - 1 modulo the common precision."""
    hi = utilde_fredholm(instantiate(t, w, k))
    lo = utilde_fredholm(instantiate(t, w, k - 1))
    for a, b in zip(hi, lo):
        e = min(a.precision, b.precision)
        ca = [c.residue(e) for c in a.series.coeffs]
        cb = [c.residue(e) for c in b.series.coeffs]
        n = max(len(ca), len(cb))
        ca += [0] * (n - len(ca))
        cb += [0] * (n - len(cb))
        if ca != cb:
            return False
    return True
