"""Integer normal forms and finite abelian p-groups given by presentations.

Matrices are lists of integer rows and act on column vectors.  A
:class:`FiniteModule` is Z^n modulo the lattice spanned by the columns of a
full-rank relation matrix; homomorphisms are integer matrices on generators.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction


def identity(n: int) -> list[list[int]]:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def transpose(A: list[list[int]], ncols: int | None = None) -> list[list[int]]:
    if not A:
        return [[] for _ in range(ncols or 0)]
    return [list(col) for col in zip(*A)]


def matmul(A, B):
    if not A:
        return []
    Bt = transpose(B, len(B[0]) if B else 0) if B else []
    inner = len(B)
    if inner == 0:
        return [[0] * 0 for _ in A]
    return [[sum(a * b for a, b in zip(row, col)) for col in Bt] for row in A]


def matvec(A, x):
    return [sum(a * b for a, b in zip(row, x)) for row in A]


def smith_form(A: list[list[int]], nrows: int | None = None, ncols: int | None = None):
    """(D, U, V) with U A V = D diagonal, U and V unimodular, d_1 | d_2 | ...

    Returns the diagonal as a list of length min(m, n) with nonnegative entries.
    """
    m = len(A) if nrows is None else nrows
    n = (len(A[0]) if A else 0) if ncols is None else ncols
    M = [list(r) for r in A] if A else [[0] * n for _ in range(m)]
    U = identity(m)
    V = identity(n)

    def swap_rows(i, j):
        M[i], M[j] = M[j], M[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in M:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, q):  # row dst += q * row src
        if q:
            M[dst] = [a + q * b for a, b in zip(M[dst], M[src])]
            U[dst] = [a + q * b for a, b in zip(U[dst], U[src])]

    def add_col(dst, src, q):
        if q:
            for row in M:
                row[dst] += q * row[src]
            for row in V:
                row[dst] += q * row[src]

    t = 0
    while t < min(m, n):
        pivot = None
        for i in range(t, m):
            for j in range(t, n):
                if M[i][j] and (pivot is None or abs(M[i][j]) < abs(M[pivot[0]][pivot[1]])):
                    pivot = (i, j)
        if pivot is None:
            break
        swap_rows(t, pivot[0])
        swap_cols(t, pivot[1])
        while True:
            done = True
            for i in range(t + 1, m):
                if M[i][t]:
                    q = M[i][t] // M[t][t]
                    add_row(i, t, -q)
                    if M[i][t]:
                        done = False
                        if abs(M[i][t]) < abs(M[t][t]):
                            swap_rows(t, i)
            for j in range(t + 1, n):
                if M[t][j]:
                    q = M[t][j] // M[t][t]
                    add_col(j, t, -q)
                    if M[t][j]:
                        done = False
                        if abs(M[t][j]) < abs(M[t][t]):
                            swap_cols(t, j)
            if not done:
                continue
            # divisibility: the pivot must divide every remaining entry
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n) if M[i][j] % M[t][t]), None)
            if bad is None:
                break
            add_row(t, bad[0], 1)
        if M[t][t] < 0:
            M[t] = [-a for a in M[t]]
            U[t] = [-a for a in U[t]]
        t += 1
    return [M[i][i] for i in range(min(m, n))], U, V


def invariant_factors(relations: list[list[int]], n: int) -> list[int]:
    """Invariant factors (> 1) of Z^n / span(columns of ``relations``); 0 marks a free summand."""
    D, _, _ = smith_form(relations, n, len(relations[0]) if relations else 0)
    out = [d for d in D if d != 1]
    out += [0] * (n - len(D))
    return sorted(out, key=lambda d: (d == 0, d))


def row_echelon(rows: list[list[int]], n: int) -> tuple[list[list[int]], list[list[int]]]:
    """Unimodular row reduction: returns (E, U) with U * rows = E in echelon form."""
    M = [list(r) for r in rows]
    m = len(M)
    U = identity(m)
    r = 0
    for c in range(n):
        while True:
            nz = [i for i in range(r, m) if M[i][c]]
            if not nz:
                break
            piv = min(nz, key=lambda i: abs(M[i][c]))
            M[r], M[piv] = M[piv], M[r]
            U[r], U[piv] = U[piv], U[r]
            others = [i for i in range(r + 1, m) if M[i][c]]
            if not others:
                break
            for i in others:
                q = M[i][c] // M[r][c]
                M[i] = [a - q * b for a, b in zip(M[i], M[r])]
                U[i] = [a - q * b for a, b in zip(U[i], U[r])]
        if r < m and M[r][c]:
            r += 1
    return M, U


def integer_kernel(A: list[list[int]], n: int) -> list[list[int]]:
    """A Z-basis of {x in Z^n : A x = 0}, as a list of vectors."""
    if not A:
        return identity(n)
    At = transpose(A)
    E, U = row_echelon(At, len(A))
    return [U[i] for i in range(n) if not any(E[i])]


def lattice_basis(gens: list[list[int]], n: int) -> list[list[int]]:
    """A basis of the lattice spanned by ``gens`` in Z^n."""
    if not gens:
        return []
    E, _ = row_echelon(gens, n)
    return [r for r in E if any(r)]


def solve_in_basis(basis: list[list[int]], v: list[int]) -> list[int]:
    """Integer coordinates of v in a square lattice basis (raises if v is outside the lattice)."""
    n = len(basis)
    M = [[Fraction(basis[j][i]) for j in range(n)] + [Fraction(v[i])] for i in range(n)]
    for c in range(n):
        piv = next(i for i in range(c, n) if M[i][c] != 0)
        M[c], M[piv] = M[piv], M[c]
        inv = 1 / M[c][c]
        M[c] = [a * inv for a in M[c]]
        for i in range(n):
            if i != c and M[i][c] != 0:
                f = M[i][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[c])]
    out = []
    for i in range(n):
        x = M[i][n]
        if x.denominator != 1:
            raise ValueError("vector does not lie in the lattice")
        out.append(int(x))
    return out


@dataclass(frozen=True)
class FiniteModule:
    """Z^n / span(relation columns), required to be finite."""

    n: int
    relations: tuple = field(default=())  # columns, each a tuple of length n

    def __post_init__(self):
        rel = tuple(tuple(int(x) for x in col) for col in self.relations)
        if any(len(col) != self.n for col in rel):
            raise ValueError("relation length does not match the number of generators")
        object.__setattr__(self, "relations", rel)
        if self.n and len(lattice_basis([list(c) for c in rel], self.n)) < self.n:
            raise ValueError("presentation does not define a finite module")

    @classmethod
    def cyclic_sum(cls, orders) -> "FiniteModule":
        """(+)_t Z/orders[t]."""
        orders = [int(o) for o in orders]
        n = len(orders)
        return cls(n, tuple(tuple(o if i == t else 0 for i in range(n)) for t, o in enumerate(orders)))

    @classmethod
    def from_exponents(cls, p: int, exps) -> "FiniteModule":
        return cls.cyclic_sum([p ** e for e in exps])

    def relation_matrix(self) -> list[list[int]]:
        return transpose([list(c) for c in self.relations], self.n) if self.relations else [[] for _ in range(self.n)]

    def invariants(self) -> list[int]:
        return invariant_factors(self.relation_matrix(), self.n) if self.n else []

    def order(self) -> int:
        out = 1
        for d in self.invariants():
            out *= d
        return out

    def exponent(self) -> int:
        inv = self.invariants()
        return inv[-1] if inv else 1

    def relation_basis(self) -> list[list[int]]:
        return lattice_basis([list(c) for c in self.relations], self.n)

    def is_zero_vector(self, v: list[int]) -> bool:
        try:
            solve_in_basis(self.relation_basis(), v)
            return True
        except ValueError:
            return False


def check_hom(f: list[list[int]], source: FiniteModule, target: FiniteModule):
    """f must send every relation of the source into the relations of the target."""
    for col in source.relations:
        if not target.is_zero_vector(matvec(f, list(col))):
            raise ValueError("matrix does not define a homomorphism")


def image_order(f: list[list[int]], source: FiniteModule, target: FiniteModule) -> int:
    """|f(source)| = |target| / |target / f(source)|."""
    cols = transpose(f, source.n) if f else []
    gens = [list(c) for c in target.relations] + [list(c) for c in cols]
    quotient = FiniteModule(target.n, tuple(tuple(c) for c in gens))
    return target.order() // quotient.order()


def subquotient(kernel_gens: list[list[int]], image_gens: list[list[int]], n: int):
    """Invariant factors of K / L for lattices L <= K <= Z^n of full rank.

    Returns (factors, basis, U) where ``basis`` is a basis of K adapted to L:
    the i-th basis vector generates a cyclic summand of order factors[i].
    """
    Kb = lattice_basis(kernel_gens, n)
    if len(Kb) != n:
        raise ValueError("kernel lattice is not of full rank")
    coords = [solve_in_basis(Kb, v) for v in image_gens]
    C = transpose(coords, n) if coords else [[] for _ in range(n)]
    D, U, _ = smith_form(C, n, len(coords))
    D = D + [0] * (n - len(D))
    # columns of Kb^T * U^-1 form the adapted basis
    Uinv = _unimodular_inverse(U)
    KbT = transpose(Kb)
    adapted = transpose(matmul(KbT, Uinv))
    return D, adapted, Kb


def _unimodular_inverse(U: list[list[int]]) -> list[list[int]]:
    n = len(U)
    M = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(U)]
    for c in range(n):
        piv = next(i for i in range(c, n) if M[i][c] != 0)
        M[c], M[piv] = M[piv], M[c]
        inv = 1 / M[c][c]
        M[c] = [a * inv for a in M[c]]
        for i in range(n):
            if i != c and M[i][c] != 0:
                f = M[i][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[c])]
    return [[int(x) for x in row[n:]] for row in M]


def kernel_lattice(d: list[list[int]], n: int, target: FiniteModule) -> list[list[int]]:
    """Generators of {x in Z^n : d x = 0 in target}."""
    if target.n == 0:
        return identity(n)
    rel = [list(c) for c in target.relations]
    block = [row + [-c[i] for c in rel] for i, row in enumerate(d)]
    ker = integer_kernel(block, n + len(rel))
    return [v[:n] for v in ker]


def cochain_cohomology(modules: list[FiniteModule], maps: list[list[list[int]]]):
    """Cohomology of C^0 -> C^1 -> ... with maps[i]: C^i -> C^(i+1).

    Returns, per degree, (factors, adapted_basis) where the basis vectors with
    factor != 1 generate the cyclic summands.
    """
    out = []
    for i, C in enumerate(modules):
        if C.n == 0:
            out.append(([], []))
            continue
        if i < len(maps):
            K = kernel_lattice(maps[i], C.n, modules[i + 1])
        else:
            K = identity(C.n)
        L = [list(c) for c in C.relations]
        if i > 0:
            d_in = maps[i - 1]
            L += [list(col) for col in transpose(d_in, modules[i - 1].n)] if modules[i - 1].n else []
        D, basis, _ = subquotient(K, L, C.n)
        out.append((D, basis))
    return out


def cohomology_invariants(modules, maps) -> list[list[int]]:
    return [sorted(d for d in D if d != 1) for D, _ in cochain_cohomology(modules, maps)]
