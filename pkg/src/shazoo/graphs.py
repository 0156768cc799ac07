"""Weighted graphs, weighted trees, and the revealed-label state.

Nodes are always the integers ``0..n-1`` internally.  Loaders compact
arbitrary external id tokens to that range in first-appearance order and
keep the mapping on the graph so external label files can be joined back.

All types are immutable after construction and safe to share between
concurrent readers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .errors import (
    CycleDetected,
    DataError,
    Disconnected,
    EdgeListError,
)

Edge = tuple[int, int, float]


def _as_lines(stream) -> Iterable[str]:
    if isinstance(stream, str):
        return stream.splitlines()
    return stream


class WeightedGraph:
    """Undirected graph with at most one weighted edge per node pair.

    Weights must be strictly positive, unless ``signed_mode`` is set, in
    which case any nonzero weight is allowed and its sign encodes whether
    the edge expresses similarity (positive) or dissimilarity (negative).
    """

    __slots__ = ("node_count", "edges", "signed_mode", "original_ids", "adj", "_sealed")

    def __setattr__(self, name, value):
        if getattr(self, "_sealed", False):
            raise AttributeError(f"{type(self).__name__} is immutable")
        super().__setattr__(name, value)

    def __init__(
        self,
        node_count: int,
        edges: Sequence[Edge],
        signed_mode: bool = False,
        original_ids: Sequence[str] | None = None,
    ):
        if node_count < 0:
            raise DataError("node_count must be nonnegative")
        if original_ids is not None and len(original_ids) != node_count:
            raise DataError("original_ids length must equal node_count")
        adj: list[list[tuple[int, float]]] = [[] for _ in range(node_count)]
        seen: set[tuple[int, int]] = set()
        stored: list[Edge] = []
        for u, v, w in edges:
            if not (0 <= u < node_count and 0 <= v < node_count):
                raise DataError(f"edge ({u},{v}) references an unknown node")
            if u == v:
                raise DataError(f"self-loop at node {u}")
            key = (u, v) if u < v else (v, u)
            if key in seen:
                raise DataError(f"duplicate edge ({u},{v})")
            seen.add(key)
            w = float(w)
            if not math.isfinite(w) or w == 0.0:
                raise DataError(f"edge ({u},{v}) has invalid weight {w!r}")
            if w < 0.0 and not signed_mode:
                raise DataError(
                    f"edge ({u},{v}) has negative weight {w!r}; "
                    "negative weights require signed mode"
                )
            stored.append((u, v, w))
            adj[u].append((v, w))
            adj[v].append((u, w))
        self.node_count = node_count
        self.edges = tuple(stored)
        self.signed_mode = bool(signed_mode)
        self.original_ids = tuple(original_ids) if original_ids is not None else None
        self.adj = tuple(tuple(row) for row in adj)
        self._sealed = True

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def check_node(self, i: int) -> int:
        if not (0 <= i < self.node_count):
            raise DataError(f"node id {i} out of range 0..{self.node_count - 1}")
        return i

    def degree(self, i: int) -> int:
        return len(self.adj[self.check_node(i)])

    def neighbors(self, i: int) -> list[tuple[int, float]]:
        return list(self.adj[self.check_node(i)])

    def edge_weight(self, i: int, j: int) -> float | None:
        """Weight of edge (i, j), or None when the edge does not exist."""
        self.check_node(i)
        self.check_node(j)
        for nb, w in self.adj[i]:
            if nb == j:
                return w
        return None

    def is_connected(self) -> bool:
        n = self.node_count
        if n == 0:
            return False
        seen = bytearray(n)
        seen[0] = 1
        stack = [0]
        count = 1
        while stack:
            x = stack.pop()
            for nb, _ in self.adj[x]:
                if not seen[nb]:
                    seen[nb] = 1
                    count += 1
                    stack.append(nb)
        return count == n

    def internal_id(self, token: str) -> int:
        """Resolve an external id token to the compacted internal id."""
        if self.original_ids is None:
            try:
                i = int(token)
            except ValueError as exc:
                raise DataError(f"unknown node id {token!r}") from exc
            return self.check_node(i)
        try:
            return self.original_ids.index(token)
        except ValueError as exc:
            raise DataError(f"unknown node id {token!r}") from exc

    def id_map(self) -> dict[str, int]:
        """External token -> internal id (identity map when untokenized)."""
        if self.original_ids is None:
            return {str(i): i for i in range(self.node_count)}
        return {tok: i for i, tok in enumerate(self.original_ids)}

    def __eq__(self, other) -> bool:
        if not isinstance(other, WeightedGraph):
            return NotImplemented
        return (
            self.node_count == other.node_count
            and self.signed_mode == other.signed_mode
            and set(_norm(e) for e in self.edges) == set(_norm(e) for e in other.edges)
        )

    def __hash__(self):
        return hash((self.node_count, self.signed_mode, frozenset(map(_norm, self.edges))))

    def __repr__(self):
        mode = "signed" if self.signed_mode else "positive"
        return f"WeightedGraph(n={self.node_count}, m={self.edge_count}, {mode})"


def _norm(e: Edge) -> Edge:
    u, v, w = e
    return (u, v, w) if u < v else (v, u, w)


class WeightedTree(WeightedGraph):
    """A connected acyclic :class:`WeightedGraph` with rooted-traversal support."""

    __slots__ = ()

    def __init__(self, node_count, edges, signed_mode=False, original_ids=None):
        super().__init__(node_count, edges, signed_mode, original_ids)
        if node_count == 0:
            raise Disconnected("a tree needs at least one node")
        if self.edge_count > node_count - 1:
            raise CycleDetected(
                f"{self.edge_count} edges on {node_count} nodes cannot be acyclic"
            )
        if self.edge_count < node_count - 1 or not self.is_connected():
            raise Disconnected("edge set does not connect all nodes")

    def bfs_parents(self, root: int) -> tuple[list[int], list[int], list[float]]:
        """Breadth-first order, parent ids and parent edge weights from ``root``."""
        self.check_node(root)
        n = self.node_count
        parent = [-1] * n
        parent_w = [0.0] * n
        order = [root]
        parent[root] = root
        for x in order:
            for nb, w in self.adj[x]:
                if parent[nb] == -1:
                    parent[nb] = x
                    parent_w[nb] = w
                    order.append(nb)
        parent[root] = -1
        return order, parent, parent_w

    def path(self, i: int, j: int) -> list[int]:
        """The unique path from i to j, inclusive (length 1 when i == j)."""
        self.check_node(i)
        self.check_node(j)
        if i == j:
            return [i]
        # bidirectional walk up from j after a rooted BFS at i
        _, parent, _ = self.bfs_parents(i)
        out = [j]
        x = j
        while x != i:
            x = parent[x]
            out.append(x)
        out.reverse()
        return out

    def resistance(self, i: int, j: int) -> float:
        """Resistance distance: sum of reciprocal absolute weights along the path."""
        nodes = self.path(i, j)
        if len(nodes) == 1:
            return 0.0
        terms = []
        for a, b in zip(nodes, nodes[1:]):
            w = self.edge_weight(a, b)
            terms.append(1.0 / abs(w))
        return math.fsum(terms)


def connected_components(g: WeightedGraph) -> list[tuple[int, ...]]:
    """Node sets of the connected components, each sorted ascending."""
    n = g.node_count
    seen = bytearray(n)
    out = []
    for s in range(n):
        if seen[s]:
            continue
        seen[s] = 1
        comp = [s]
        for x in comp:
            for nb, _ in g.adj[x]:
                if not seen[nb]:
                    seen[nb] = 1
                    comp.append(nb)
        out.append(tuple(sorted(comp)))
    return out


def induced_subgraph(g: WeightedGraph, nodes) -> tuple[WeightedGraph, list[int]]:
    """Subgraph on ``nodes`` with ids compacted; returns it plus the
    original id of each compacted node."""
    keep = sorted(set(nodes))
    index = {orig: i for i, orig in enumerate(keep)}
    edges = [
        (index[u], index[v], w)
        for u, v, w in g.edges
        if u in index and v in index
    ]
    names = None
    if g.original_ids is not None:
        names = [g.original_ids[i] for i in keep]
    sub = WeightedGraph(len(keep), edges, signed_mode=g.signed_mode, original_ids=names)
    return sub, keep


def as_tree(g: WeightedGraph) -> WeightedTree:
    """Wrap ``g`` as a tree; raises CycleDetected / Disconnected otherwise."""
    if isinstance(g, WeightedTree):
        return g
    return WeightedTree(g.node_count, g.edges, g.signed_mode, g.original_ids)


def tree_path(t: WeightedTree, i: int, j: int) -> list[int]:
    return t.path(i, j)


def resistance_distance(t: WeightedTree, i: int, j: int) -> float:
    return t.resistance(i, j)


def load_edge_list(stream, signed: bool = False) -> WeightedGraph:
    """Parse "u<TAB>v<TAB>w" lines into a validated :class:`WeightedGraph`.

    Any run of whitespace separates the three fields.  Lines starting with
    '#' and blank lines are ignored.  Node id tokens are compacted to
    ``0..n-1`` in first-appearance order; the token list is retained as
    ``original_ids`` so labels keyed by external ids can be joined back.
    """
    ids: dict[str, int] = {}
    tokens: list[str] = []
    edges: list[Edge] = []
    seen: set[tuple[int, int]] = set()

    def intern(tok: str) -> int:
        i = ids.get(tok)
        if i is None:
            i = len(tokens)
            ids[tok] = i
            tokens.append(tok)
        return i

    for lineno, raw in enumerate(_as_lines(stream), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 3:
            raise EdgeListError(f"expected 'u v w', got {line!r}", lineno)
        ut, vt, wt = parts
        try:
            w = float(wt)
        except ValueError:
            raise EdgeListError(f"bad weight {wt!r}", lineno) from None
        if not math.isfinite(w):
            raise EdgeListError(f"non-finite weight {wt!r}", lineno)
        if w == 0.0:
            raise EdgeListError("zero-weight edge", lineno)
        if w < 0.0 and not signed:
            raise EdgeListError(
                "negative weight outside signed mode", lineno
            )
        u = intern(ut)
        v = intern(vt)
        if u == v:
            raise EdgeListError(f"self-loop at {ut!r}", lineno)
        key = (u, v) if u < v else (v, u)
        if key in seen:
            raise EdgeListError(f"duplicate edge {ut!r}-{vt!r}", lineno)
        seen.add(key)
        edges.append((u, v, w))

    return WeightedGraph(len(tokens), edges, signed_mode=signed, original_ids=tokens)


def dump_edge_list(g: WeightedGraph) -> str:
    """Serialize a graph back to the edge-list format.

    External tokens are used when the graph was loaded from a stream;
    otherwise internal ids.  Weight text round-trips exactly through
    :func:`load_edge_list`.
    """
    names = g.original_ids if g.original_ids is not None else [str(i) for i in range(g.node_count)]
    lines = [f"{names[u]}\t{names[v]}\t{w!r}" for u, v, w in g.edges]
    return "\n".join(lines) + ("\n" if lines else "")


def load_label_file(stream) -> dict[str, int]:
    """Parse "node<TAB>value" lines; integer values, '#' comments allowed."""
    out: dict[str, int] = {}
    for lineno, raw in enumerate(_as_lines(stream), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise EdgeListError(f"expected 'node value', got {line!r}", lineno)
        tok, val = parts
        try:
            y = int(val)
        except ValueError:
            raise EdgeListError(f"bad label {val!r}", lineno) from None
        if tok in out:
            raise EdgeListError(f"duplicate label for node {tok!r}", lineno)
        out[tok] = y
    return out


def load_binary_labels(stream, graph: WeightedGraph) -> dict[int, int]:
    """Parse a +/-1 label file and join it onto internal node ids."""
    raw = load_label_file(stream)
    out: dict[int, int] = {}
    for tok, y in raw.items():
        if y not in (-1, 1):
            raise DataError(f"label for node {tok!r} must be +1 or -1, got {y}")
        out[graph.internal_id(tok)] = y
    return out


def dump_labels(labels: Mapping[int, int], graph: WeightedGraph | None = None) -> str:
    names = None
    if graph is not None and graph.original_ids is not None:
        names = graph.original_ids
    lines = []
    for node in sorted(labels):
        tok = names[node] if names is not None else str(node)
        lines.append(f"{tok}\t{labels[node]:+d}")
    return "\n".join(lines) + ("\n" if lines else "")


@dataclass(frozen=True)
class RevealedState:
    """The time-t knowledge: which nodes are revealed, with which labels.

    ``labels`` maps node id to +/-1 and ``revealed_order`` records the
    revelation sequence.  Instances are immutable; :meth:`reveal` returns a
    new state.
    """

    labels: Mapping[int, int]
    revealed_order: tuple[int, ...]

    def __post_init__(self):
        order = tuple(self.revealed_order)
        object.__setattr__(self, "revealed_order", order)
        if len(set(order)) != len(order):
            raise DataError("revealed_order contains duplicates")
        labels = dict(self.labels)
        object.__setattr__(self, "labels", labels)
        if set(labels) != set(order):
            raise DataError("labels and revealed_order must cover the same nodes")
        for node, y in labels.items():
            if y not in (-1, 1):
                raise DataError(f"label of node {node} must be +1 or -1, got {y!r}")

    @classmethod
    def empty(cls) -> "RevealedState":
        return cls({}, ())

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[int, int]]) -> "RevealedState":
        pairs = list(pairs)
        return cls({n: y for n, y in pairs}, tuple(n for n, _ in pairs))

    def reveal(self, node: int, label: int) -> "RevealedState":
        if node in self.labels:
            raise DataError(f"node {node} already revealed")
        labels = dict(self.labels)
        labels[node] = label
        return RevealedState(labels, self.revealed_order + (node,))

    def is_revealed(self, node: int) -> bool:
        return node in self.labels

    def __len__(self) -> int:
        return len(self.revealed_order)

    def to_array(self, n: int) -> list[int]:
        """Dense 0 / +/-1 view used by the cut engine and predictors."""
        arr = [0] * n
        for node, y in self.labels.items():
            if not (0 <= node < n):
                raise DataError(f"revealed node {node} outside 0..{n - 1}")
            arr[node] = y
        return arr

    def signature(self) -> tuple[tuple[int, int], ...]:
        """Order-insensitive stamp used to tie caches to a state snapshot."""
        return tuple(sorted(self.labels.items()))


def random_tree(n: int, rng, weights: Sequence[float] | None = None) -> WeightedTree:
    """Random recursive tree on n nodes: node i attaches to a uniform j < i.

    ``weights`` supplies per-edge weights (edge i-1 connects node i); unit
    weights when omitted.
    """
    if n <= 0:
        raise DataError("need at least one node")
    edges = []
    for i in range(1, n):
        j = int(rng.integers(0, i))
        w = 1.0 if weights is None else float(weights[i - 1])
        edges.append((j, i, w))
    return WeightedTree(n, edges)
