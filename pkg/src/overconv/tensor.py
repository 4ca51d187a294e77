"""Completed tensor products with a profinite flat module given by a pseudobasis.

A module M isomorphic to prod_{i in I} O is recorded by the finite label list
I and the component module O (None standing for Z_p itself).  For a finite
Z_p-module X, which is its own p-adic completion, the mixed tensor product is
prod_{i in I} (X (x) O), computed and mapped componentwise.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .snf import FiniteModule, check_hom, cohomology_invariants, kernel_lattice


@dataclass(frozen=True)
class PseudobasisModule:
    labels: tuple
    component: FiniteModule | None = None

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(self.labels))
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("pseudobasis labels must be distinct")

    @classmethod
    def free(cls, size: int) -> "PseudobasisModule":
        return cls(tuple(range(size)))

    @property
    def size(self) -> int:
        return len(self.labels)


def _component_tensor(X: FiniteModule, O: FiniteModule | None) -> FiniteModule:
    if O is None:
        return X
    # X (x) O is presented on pairs of generators with both sets of relations
    n = X.n * O.n
    rels = []
    for col in X.relations:
        for b in range(O.n):
            rels.append(tuple(col[a] if bb == b else 0 for a in range(X.n) for bb in range(O.n)))
    for col in O.relations:
        for a in range(X.n):
            rels.append(tuple(col[bb] if aa == a else 0 for aa in range(X.n) for bb in range(O.n)))
    return FiniteModule(n, tuple(rels))


def mixed_tensor(X: FiniteModule, M: PseudobasisModule) -> FiniteModule:
    """prod_{i in I} (X (x) O), presented block-diagonally."""
    comp = _component_tensor(X, M.component)
    n = comp.n
    rels = []
    for i in range(M.size):
        for col in comp.relations:
            rels.append(tuple(col[a - i * n] if i * n <= a < (i + 1) * n else 0 for a in range(n * M.size)))
    return FiniteModule(n * M.size, tuple(rels))


def tensor_map(f: list[list[int]], X: FiniteModule, Y: FiniteModule, M: PseudobasisModule) -> list[list[int]]:
    """The componentwise map induced by f: X -> Y."""
    check_hom(f, X, Y)
    if M.component is not None:
        k = M.component.n
        f = [[f[a][b] if bb == aa else 0 for b in range(X.n) for bb in range(k)]
             for a in range(Y.n) for aa in range(k)]
    rows, cols = len(f), len(f[0]) if f else 0
    out = [[0] * (cols * M.size) for _ in range(rows * M.size)]
    for i in range(M.size):
        for r in range(rows):
            for c in range(cols):
                out[i * rows + r][i * cols + c] = f[r][c]
    return out


def is_exact(modules: list[FiniteModule], maps: list[list[list[int]]]) -> bool:
    """Exactness of 0 -> A -> B -> C -> 0 (or any finite complex) via cohomology."""
    return all(not inv for inv in cohomology_invariants(modules, maps))


def _closure(gens, orders):
    span = {tuple(0 for _ in orders)}
    frontier = list(span)
    while frontier:
        new = []
        for x in frontier:
            for g in gens:
                y = tuple((a + b) % o for a, b, o in zip(x, g, orders))
                if y not in span:
                    span.add(y)
                    new.append(y)
        frontier = new
    return frozenset(span)


def subgroups(orders: list[int]) -> list[tuple]:
    """All subgroups of (+) Z/orders[t], each with a generating list."""
    elements = list(itertools.product(*[range(o) for o in orders]))
    zero = tuple(0 for _ in orders)
    found = {frozenset([zero]): ()}
    queue = [frozenset([zero])]
    while queue:
        H = queue.pop()
        gens = found[H]
        for g in elements:
            if g in H:
                continue
            K = _closure(list(gens) + [g], orders)
            if K not in found:
                found[K] = tuple(gens) + (g,)
                queue.append(K)
    return sorted(found.items(), key=lambda kv: (len(kv[0]), sorted(kv[0])))


def partitions(n: int, largest: int | None = None):
    largest = n if largest is None else largest
    if n == 0:
        yield ()
        return
    for k in range(min(n, largest), 0, -1):
        for rest in partitions(n - k, k):
            yield (k,) + rest


def short_exact_sequences(p: int, max_log_order: int = 3):
    """Every 0 -> A -> B -> B/A -> 0 with |B| <= p^max_log_order, up to the choice of B's type.

    A is presented as Z^g modulo the kernel of its generating map, and B/A by
    B's generators modulo B's relations and A.
    """
    for total in range(max_log_order + 1):
        for part in partitions(total):
            orders = [p ** e for e in part]
            B = FiniteModule.cyclic_sum(orders)
            for _, gens in subgroups(orders):
                g = len(gens)
                iota = [[gen[t] for gen in gens] for t in range(len(orders))]
                A = _subgroup_presentation(iota, B, g)
                C = FiniteModule(B.n, B.relations + tuple(tuple(gen) for gen in gens))
                pi = [[int(i == j) for j in range(B.n)] for i in range(B.n)]
                yield A, B, C, iota, pi


def _subgroup_presentation(iota, B: FiniteModule, g: int) -> FiniteModule:
    if g == 0:
        return FiniteModule(0, ())
    return FiniteModule(g, tuple(tuple(v) for v in kernel_lattice(iota, g, B)))


def check_mixed_tensor_exactness(p: int, max_log_order: int = 3, max_labels: int = 3) -> tuple[bool, int]:
    """Tensor every short exact sequence with |B| <= p^max_log_order against pseudobases
    of size 1..max_labels and test exactness.  Returns (all exact, number of sequences checked)."""
    count = 0
    for A, B, C, iota, pi in short_exact_sequences(p, max_log_order):
        if not is_exact([FiniteModule(0, ()), A, B, C, FiniteModule(0, ())],
                        [[[] for _ in range(A.n)], iota, pi, []]):
            return False, count
        for size in range(1, max_labels + 1):
            M = PseudobasisModule.free(size)
            TA, TB, TC = mixed_tensor(A, M), mixed_tensor(B, M), mixed_tensor(C, M)
            mods = [FiniteModule(0, ()), TA, TB, TC, FiniteModule(0, ())]
            maps = [[[] for _ in range(TA.n)], tensor_map(iota, A, B, M), tensor_map(pi, B, C, M), []]
            if not is_exact(mods, maps):
                return False, count
            count += 1
    return True, count
