"""Shared test utilities: tree catalogs and independent brute-force oracles.

The oracles here never touch the package's dynamic programs: cut values
come from enumerating labelings, forks from path counting, spanning trees
from edge-subset enumeration, harmonic values from a dense solve.

Catalog weights are powers of two so that every cut sum and every
resistance sum is exact in binary floating point, making "exact equality"
assertions meaningful across different summation orders.
"""

from __future__ import annotations

import heapq
import itertools
from functools import lru_cache

import numpy as np

from shazoo import WeightedGraph, WeightedTree

POW2_WEIGHTS = (0.25, 0.5, 1.0, 2.0, 4.0)
DYADIC_EIGHTHS = tuple(k / 8.0 for k in range(1, 33))


def prufer_tree(n: int, seq: list[int], weights) -> WeightedTree:
    """Decode a Pruefer sequence into a weighted tree."""
    if n == 1:
        return WeightedTree(1, [])
    if n == 2:
        return WeightedTree(2, [(0, 1, weights[0])])
    assert len(seq) == n - 2
    deg = [1] * n
    for s in seq:
        deg[s] += 1
    leaves = [i for i in range(n) if deg[i] == 1]
    heapq.heapify(leaves)
    edges = []
    wi = 0
    for s in seq:
        leaf = heapq.heappop(leaves)
        edges.append((leaf, s, weights[wi]))
        wi += 1
        deg[s] -= 1
        if deg[s] == 1:
            heapq.heappush(leaves, s)
    u = heapq.heappop(leaves)
    v = heapq.heappop(leaves)
    edges.append((u, v, weights[wi]))
    return WeightedTree(n, edges)


def path_tree(weights) -> WeightedTree:
    n = len(weights) + 1
    return WeightedTree(n, [(i, i + 1, w) for i, w in enumerate(weights)])


def star_tree(weights) -> WeightedTree:
    n = len(weights) + 1
    return WeightedTree(n, [(0, i + 1, w) for i, w in enumerate(weights)])


def caterpillar_tree(spine: int, weights) -> WeightedTree:
    """Spine of `spine` nodes, one leg per spine node."""
    edges = []
    wi = 0
    for i in range(spine - 1):
        edges.append((i, i + 1, weights[wi]))
        wi += 1
    n = spine
    for i in range(spine):
        edges.append((i, n, weights[wi]))
        wi += 1
        n += 1
    return WeightedTree(n, edges)


def _pick(rng, pool, k):
    return [pool[int(rng.integers(0, len(pool)))] for _ in range(k)]


@lru_cache(maxsize=None)
def small_tree_catalog(count: int = 200, seed: int = 20240511, max_n: int = 8):
    """>= `count` tree shapes with power-of-two weights, n in 2..max_n.

    Paths and stars of every size come first, then random Pruefer shapes.
    """
    rng = np.random.default_rng(seed)
    trees: list[WeightedTree] = []
    for n in range(2, max_n + 1):
        trees.append(path_tree(_pick(rng, POW2_WEIGHTS, n - 1)))
    for n in range(4, max_n + 1):
        trees.append(star_tree(_pick(rng, POW2_WEIGHTS, n - 1)))
    while len(trees) < count:
        n = int(rng.integers(4, max_n + 1))
        seq = [int(rng.integers(0, n)) for _ in range(n - 2)]
        trees.append(prufer_tree(n, seq, _pick(rng, POW2_WEIGHTS, n - 1)))
    return tuple(trees)


def revealed_label_cases(tree: WeightedTree, rng):
    """Yield label arrays for every revealed subset of the node set.

    Subsets of size <= 2 get every +/-1 assignment; larger subsets get one
    random assignment (seeded by the caller's rng).
    """
    n = tree.node_count
    for size in range(n + 1):
        for subset in itertools.combinations(range(n), size):
            if size <= 2:
                for assignment in itertools.product((-1, 1), repeat=size):
                    labels = [0] * n
                    for i, y in zip(subset, assignment):
                        labels[i] = y
                    yield labels
            else:
                labels = [0] * n
                for i in subset:
                    labels[i] = 1 if rng.integers(2) else -1
                yield labels


class CutOracle:
    """Brute-force cut minimization by enumerating all 2^n labelings once."""

    def __init__(self, tree: WeightedTree):
        n = tree.node_count
        self.n = n
        masks = np.arange(1 << n, dtype=np.uint32)
        self.bits = ((masks[:, None] >> np.arange(n)) & 1).astype(bool)
        cuts = np.zeros(1 << n)
        for u, v, w in tree.edges:
            differ = self.bits[:, u] ^ self.bits[:, v]
            if w > 0:
                cuts += np.where(differ, w, 0.0)
            else:
                cuts += np.where(~differ, -w, 0.0)
        self.cuts = cuts

    def consistent_mask(self, labels):
        mask = np.ones(1 << self.n, dtype=bool)
        for i, y in enumerate(labels):
            if y:
                mask &= self.bits[:, i] == (y > 0)
        return mask

    def min_cut(self, labels, v: int, y: int) -> float:
        mask = self.consistent_mask(labels) & (self.bits[:, v] == (y > 0))
        return float(self.cuts[mask].min())

    def min_cut_free(self, labels) -> float:
        return float(self.cuts[self.consistent_mask(labels)].min())


def brute_forks(tree: WeightedTree, labels) -> set[int]:
    """Forks straight from the definition: >= 3 incident directions whose
    far side (component of T - v containing that neighbor) holds a revealed node."""
    n = tree.node_count
    out = set()
    for v in range(n):
        if labels[v]:
            continue
        dirs = 0
        for nb, _ in tree.adj[v]:
            stack = [nb]
            seen = {v, nb}
            found = bool(labels[nb])
            while stack and not found:
                x = stack.pop()
                for nx, _ in tree.adj[x]:
                    if nx in seen:
                        continue
                    seen.add(nx)
                    if labels[nx]:
                        found = True
                        break
                    stack.append(nx)
            dirs += found
        if dirs >= 3:
            out.add(v)
    return out


def connected_edge_subsets(n: int):
    """Every connected labeled graph on n nodes as a tuple of (u, v) pairs."""
    all_edges = list(itertools.combinations(range(n), 2))
    for r in range(n - 1, len(all_edges) + 1):
        for subset in itertools.combinations(all_edges, r):
            if _spans(n, subset):
                yield subset


def _spans(n, pairs):
    adj = [[] for _ in range(n)]
    for u, v in pairs:
        adj[u].append(v)
        adj[v].append(u)
    seen = {0}
    stack = [0]
    while stack:
        x = stack.pop()
        for nb in adj[x]:
            if nb not in seen:
                seen.add(nb)
                stack.append(nb)
    return len(seen) == n


def enumerate_spanning_trees(g: WeightedGraph):
    """All spanning trees as frozensets of edge indices."""
    n = g.node_count
    out = []
    for subset in itertools.combinations(range(len(g.edges)), n - 1):
        pairs = [(g.edges[e][0], g.edges[e][1]) for e in subset]
        if _spans(n, pairs):
            out.append(frozenset(subset))
    return out


def harmonic_dense(g: WeightedGraph, clamped: dict[int, int]) -> np.ndarray:
    """Dense linear solve of the harmonic system with clamped +/-1 nodes."""
    n = g.node_count
    W = np.zeros((n, n))
    for u, v, w in g.edges:
        W[u, v] = W[v, u] = w
    values = np.zeros(n)
    for i, y in clamped.items():
        values[i] = y
    free = [i for i in range(n) if i not in clamped and g.adj[i]]
    if not free:
        return values
    D = np.diag(W.sum(axis=1))
    L = D - W
    A = L[np.ix_(free, free)]
    b = W[np.ix_(free, sorted(clamped))] @ np.array([clamped[i] for i in sorted(clamped)], dtype=float)
    values[free] = np.linalg.solve(A, b)
    return values


def tree_edge_key(tree: WeightedTree) -> frozenset:
    return frozenset((min(u, v), max(u, v)) for u, v, _ in tree.edges)
