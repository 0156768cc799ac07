"""Spanning-tree extraction and depth-first linearization.

Three tree sources feed the predictors when the input is a general graph:
random spanning trees drawn with probability proportional to the product
of edge weights (loop-erased random walk), uniform random spanning trees
that ignore the weights during sampling, and the deterministic spanning
tree minimizing the total edge resistance.  Signed graphs are sampled on
absolute weights; the output tree always carries the original weights.
"""

from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass
from itertools import accumulate

import numpy as np

from .errors import ConfigError, DataError, Disconnected
from .graphs import WeightedGraph, WeightedTree

KIND_RST = "rst"
KIND_NWRST = "nwrst"
KIND_MST = "mst"


@dataclass(frozen=True)
class TreeSample:
    """A spanning tree of a source graph plus how it was produced.

    ``steps`` counts random-walk transitions for the sampled kinds, kept
    so generation cost stays observable (it is measured, never asserted).
    """

    tree: WeightedTree
    kind: str
    seed: int | None
    steps: int = 0


@dataclass(frozen=True)
class WeightedLine:
    """A node sequence with positive consecutive-pair weights."""

    nodes: tuple[int, ...]
    weights: tuple[float, ...]

    def __post_init__(self):
        if len(self.weights) != max(len(self.nodes) - 1, 0):
            raise DataError("need exactly one weight per consecutive pair")
        if len(set(self.nodes)) != len(self.nodes):
            raise DataError("line nodes must be distinct")
        for w in self.weights:
            if not w > 0.0:
                raise DataError(f"line weights must be positive, got {w!r}")

    def positions(self) -> list[float]:
        """Cumulative resistance from the first node."""
        return [0.0] + list(accumulate(1.0 / w for w in self.weights))

    def __len__(self):
        return len(self.nodes)


def _as_rng(rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def wilson_spanning_tree(g: WeightedGraph, rng, use_weights: bool = True) -> TreeSample:
    """Draw a random spanning tree by loop-erased random walks from root 0.

    With ``use_weights`` the walk moves to a neighbor with probability
    proportional to |weight|, giving trees with probability proportional
    to the product of their edge weights; without it the walk is uniform
    over neighbors and the tree is uniform over all spanning trees.
    """
    if not g.is_connected():
        raise Disconnected("cannot span a disconnected graph")
    seed = rng if isinstance(rng, (int, np.integer)) else None
    n = g.node_count
    if g.edge_count == n - 1:
        # the input is a tree: it is its own unique spanning tree
        tree = g if isinstance(g, WeightedTree) else WeightedTree(
            n, g.edges, signed_mode=g.signed_mode, original_ids=g.original_ids
        )
        return TreeSample(tree, KIND_RST if use_weights else KIND_NWRST, seed, 0)
    gen = _as_rng(rng)
    nbrs: list[list[int]] = [[nb for nb, _ in g.adj[i]] for i in range(n)]
    cumw: list[list[float]] | None = None
    if use_weights:
        cumw = [list(accumulate(abs(w) for _, w in g.adj[i])) for i in range(n)]

    in_tree = bytearray(n)
    in_tree[0] = 1
    succ = [-1] * n
    steps = 0

    for start in range(1, n):
        if in_tree[start]:
            continue
        x = start
        while not in_tree[x]:
            ns = nbrs[x]
            if use_weights:
                cw = cumw[x]
                r = gen.random() * cw[-1]
                x_next = ns[bisect_left(cw, r)]
            else:
                x_next = ns[int(gen.integers(len(ns)))]
            succ[x] = x_next  # overwriting erases loops
            x = x_next
            steps += 1
        x = start
        while not in_tree[x]:
            in_tree[x] = 1
            x = succ[x]

    edges = []
    for v in range(1, n):
        u = succ[v]
        w = g.edge_weight(v, u)
        if w is None:  # pragma: no cover - succ always follows a real edge
            raise DataError("walk bookkeeping broke; sampler bug")
        edges.append((v, u, w))
    tree = WeightedTree(n, edges, signed_mode=g.signed_mode, original_ids=g.original_ids)
    return TreeSample(tree, KIND_RST if use_weights else KIND_NWRST, seed, steps)


class _UnionFind:
    __slots__ = ("parent", "rank")

    def __init__(self, n):
        self.parent = list(range(n))
        self.rank = [0] * n

    def find(self, x):
        p = self.parent
        while p[x] != x:
            p[x] = p[p[x]]
            x = p[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.rank[ra] < self.rank[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        if self.rank[ra] == self.rank[rb]:
            self.rank[ra] += 1
        return True


def minimum_spanning_tree(g: WeightedGraph) -> TreeSample:
    """The spanning tree minimizing the sum of edge resistances 1/|w|.

    Equivalently the maximum-|weight| spanning tree.  Ties are broken by
    edge id (input order), so equal-weight graphs yield the
    lexicographically-first edge set deterministically.
    """
    n = g.node_count
    order = sorted(range(len(g.edges)), key=lambda e: (1.0 / abs(g.edges[e][2]), e))
    uf = _UnionFind(n)
    chosen = []
    for e in order:
        u, v, w = g.edges[e]
        if uf.union(u, v):
            chosen.append((u, v, w))
            if len(chosen) == n - 1:
                break
    if len(chosen) != n - 1:
        raise Disconnected("cannot span a disconnected graph")
    tree = WeightedTree(n, chosen, signed_mode=g.signed_mode, original_ids=g.original_ids)
    return TreeSample(tree, KIND_MST, None)


def dfs_linearize(t: WeightedTree, root: int) -> WeightedLine:
    """Flatten a tree to a line in first-visit depth-first order.

    Children are explored in ascending id.  Consecutive output nodes u,v
    get the weight of edge (u,v) when it exists; otherwise the minimum
    |edge weight| on the tree path between them, which never underestimates
    their resistance distance.
    """
    t.check_node(root)
    n = t.node_count
    children: list[list[tuple[int, float]]] = [[] for _ in range(n)]
    _, parent, parent_w = t.bfs_parents(root)
    for v in range(n):
        if v != root:
            children[parent[v]].append((v, parent_w[v]))
    for c in children:
        c.sort(reverse=True)  # stack pops lowest id first

    nodes = []
    weights = []
    # stack of (node, weight of edge to its parent); path tracks the
    # current root-to-node chain so backtrack minima come out in O(n)
    stack: list[tuple[int, float]] = [(root, 0.0)]
    path: list[tuple[int, float]] = []
    while stack:
        x, wx = stack.pop()
        if nodes:
            # pop the path back to x's parent, tracking the lightest edge
            m = abs(wx)
            while path and path[-1][0] != parent[x]:
                _, pw = path.pop()
                pw = abs(pw)
                if pw < m:
                    m = pw
            weights.append(m)
        path.append((x, wx))
        nodes.append(x)
        for child in children[x]:
            stack.append(child)
    return WeightedLine(tuple(nodes), tuple(weights))


def sample_tree(g: WeightedGraph, kind: str, seed: int | None = None) -> TreeSample:
    """Dispatch on the tree kind; rst/nwrst need a seed, mst ignores it."""
    kind = kind.lower()
    if kind == KIND_MST:
        return minimum_spanning_tree(g)
    if kind in (KIND_RST, KIND_NWRST):
        if seed is None:
            raise ConfigError(f"{kind} sampling needs a seed")
        return wilson_spanning_tree(g, seed, use_weights=(kind == KIND_RST))
    raise ConfigError(f"unknown tree kind {kind!r}; expected rst, nwrst or mst")
