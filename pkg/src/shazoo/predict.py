"""The Shazoo node predictor: hinge structure, online and batch drivers.

Terminology used throughout (all relative to a revealed-label state):

* a **fork** is an unrevealed node with three or more edge-disjoint paths
  to distinct revealed nodes.  On a tree that is equivalent to: at least
  three incident edges whose far side contains a revealed node.
* a **hinge node** is a revealed node or a fork.
* deleting every edge incident to a hinge node leaves a forest; the
  **hinge tree** ``H(q)`` is the component containing q.  Hinge nodes end
  up isolated, so a hinge node's hinge tree is the singleton {q}.
* the **connection nodes** of a hinge tree are the hinge nodes adjacent to
  it from outside (or the node itself for a singleton hinge tree).

A query is answered with the sign of the cut margin of the nearest
connection node (resistance distance, ties to the lowest node id) among
those with nonzero margin, falling back to the default label -1.  Both
drivers resolve "nearest" through the same label-propagation sweep over
the hinge tree, so their distance comparisons and tie-breaking coincide;
margin signs at connection forks come from the direct rooted recursion
online and from the rerooted pass in batch, identical values whenever
the weight sums round the same way (always, for dyadic weights).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from heapq import heapify, heappop, heappush
from typing import Iterable, Mapping, Sequence

from .cuts import CutContext, _boundary_pair
from .errors import DataError, RevealedQuery, SignedModeRequired
from .graphs import RevealedState, WeightedTree

DEFAULT_LABEL = -1


@dataclass(frozen=True)
class HingeView:
    """Derived hinge structure around one query node.

    ``margin_signs`` and ``distances`` are keyed by connection node;
    distances are resistance distances from the query (0.0 when the query
    is its own connection node).
    """

    query: int
    forks: frozenset[int]
    hinge_nodes: frozenset[int]
    hinge_tree: frozenset[int]
    connection_nodes: tuple[int, ...]
    margin_signs: Mapping[int, int]
    distances: Mapping[int, float]


@dataclass(frozen=True)
class PredictionStep:
    node: int
    predicted: int
    truth: int
    mistake: bool


@dataclass(frozen=True)
class MistakeTrace:
    """Per-step record of an online run."""

    steps: tuple[PredictionStep, ...]
    mistake_count: int

    def __post_init__(self):
        count = 0
        for s in self.steps:
            if s.mistake != (s.predicted != s.truth):
                raise DataError("mistake flag inconsistent with labels")
            count += s.mistake
        if count != self.mistake_count:
            raise DataError("mistake_count inconsistent with steps")

    def __len__(self):
        return len(self.steps)


class _Scratch:
    """Reusable per-tree buffers so online runs avoid O(n) work per step."""

    __slots__ = ("parent", "parent_w", "sub_rev", "dirs", "stamp", "cur", "blocked")

    def __init__(self, n: int):
        self.parent = [-1] * n
        self.parent_w = [0.0] * n
        self.sub_rev = [0] * n
        self.dirs = [0] * n
        self.stamp = [0] * n
        self.cur = 0
        self.blocked = bytearray(n)


def _component(tree: WeightedTree, labels: Sequence[int], q: int, sc: _Scratch):
    """Nodes reachable from q without crossing a revealed node.

    Returns (order, boundary): the BFS order of unrevealed member nodes and
    the revealed leaves hanging off them.  Parent pointers/weights stay in
    the scratch buffers for path recovery.
    """
    adj = tree.adj
    sc.cur += 1
    cur = sc.cur
    stamp = sc.stamp
    parent = sc.parent
    parent_w = sc.parent_w
    order = [q]
    stamp[q] = cur
    parent[q] = -1
    boundary = []
    for x in order:
        for nb, w in adj[x]:
            if stamp[nb] == cur:
                continue
            stamp[nb] = cur
            parent[nb] = x
            parent_w[nb] = w
            if labels[nb]:
                boundary.append(nb)
            else:
                order.append(nb)
    return order, boundary


def _mark_forks(tree, labels, order, sc: _Scratch) -> list[int]:
    """Fork detection inside one component by direction counting.

    A direction from x (an incident edge) counts when its far side holds a
    revealed node; subtree revealed counts give the downward directions and
    the complement against the component total gives the upward one.
    """
    adj = tree.adj
    parent = sc.parent
    sub_rev = sc.sub_rev
    dirs = sc.dirs
    for x in reversed(order):
        srev = 0
        nd = 0
        par = parent[x]
        for nb, _ in adj[x]:
            if nb == par:
                continue
            if labels[nb]:
                srev += 1
                nd += 1
            else:
                s = sub_rev[nb]
                if s:
                    srev += s
                    nd += 1
        sub_rev[x] = srev
        dirs[x] = nd
    total = sub_rev[order[0]]
    forks = []
    for x in order:
        if dirs[x] + (1 if total > sub_rev[x] else 0) >= 3:
            forks.append(x)
    return forks


def _propagate(adj, sources, blocked, assigned, target=None):
    """Multi-source nearest-label sweep over one hinge tree.

    ``sources`` holds (edge weight, connection node, entry member, sign)
    for every nonzero-margin connection node.  Members settle once, at
    their minimal (resistance distance, source id) key, and take the
    source's sign.  Stops early once ``target`` settles.
    """
    heap = [(1.0 / abs(w), j, x, s) for (w, j, x, s) in sources]
    heapify(heap)
    done = set()
    while heap:
        dist, j, x, s = heappop(heap)
        if x in done:
            continue
        done.add(x)
        assigned[x] = s
        if x == target:
            return
        for nb, w in adj[x]:
            if nb in done or blocked[nb]:
                continue
            heappush(heap, (dist + 1.0 / abs(w), j, nb, s))


def _margin_sign_local(tree, labels, v) -> int:
    pm, pp = _boundary_pair(tree, labels, v)
    if pm > pp:
        return 1
    if pm < pp:
        return -1
    return 0


def _local_structure(tree, labels, q, sc):
    """(hinge set, H(q) members) around an unrevealed query node."""
    order, boundary = _component(tree, labels, q, sc)
    forks = _mark_forks(tree, labels, order, sc) if len(boundary) >= 3 else []
    hinge = set(boundary)
    hinge.update(forks)
    if q in hinge:
        return frozenset(forks), hinge, [q]
    members = [q]
    seen = {q}
    adj = tree.adj
    for x in members:
        for nb, _ in adj[x]:
            if nb in seen or nb in hinge:
                continue
            seen.add(nb)
            members.append(nb)
    return frozenset(forks), hinge, members


def _predict_detail(tree, labels, q, sc) -> tuple[int, bool]:
    """(label, used-default flag) for one query; shared by both drivers."""
    if labels[q]:
        raise RevealedQuery(f"node {q} is already revealed")
    forks, hinge, members = _local_structure(tree, labels, q, sc)
    if q in hinge:  # q is a fork: its own closest connection node
        s = _margin_sign_local(tree, labels, q)
        return (s, False) if s else (DEFAULT_LABEL, True)

    adj = tree.adj
    member_set = set(members)
    sources = []
    for x in members:
        for nb, w in adj[x]:
            if nb in member_set:
                continue
            s = labels[nb] or _margin_sign_local(tree, labels, nb)
            if s:
                sources.append((w, nb, x, s))
    if not sources:
        return DEFAULT_LABEL, True

    blocked = sc.blocked
    for h in hinge:
        blocked[h] = 1
    assigned: dict[int, int] = {}
    try:
        _propagate(adj, sources, blocked, assigned, target=q)
    finally:
        for h in hinge:
            blocked[h] = 0
    s = assigned.get(q, 0)
    return (s, False) if s else (DEFAULT_LABEL, True)


def hinge_structure(tree: WeightedTree, state, q: int) -> HingeView:
    """Forks, hinge nodes, H(q) and its connection nodes around query q.

    The per-connection-node distances reported here are exact path sums;
    the prediction drivers resolve near-ties by the propagation sweep, so
    consult :func:`predict_online` rather than re-deriving the winner from
    this view when distances collide.
    """
    labels = state.to_array(tree.node_count) if isinstance(state, RevealedState) else list(state)
    tree.check_node(q)
    if labels[q]:
        raise RevealedQuery(f"node {q} is already revealed")
    return _hinge_view_from(tree, labels, q, _Scratch(tree.node_count))


def _path_distance(sc: _Scratch, q, j) -> float:
    """Resistance distance q -> j along parent pointers rooted at q."""
    terms = []
    x = j
    parent = sc.parent
    parent_w = sc.parent_w
    while x != q:
        terms.append(1.0 / abs(parent_w[x]))
        x = parent[x]
    return math.fsum(terms)


def predict_online(tree: WeightedTree, state, q: int) -> int:
    """Predict the label of unrevealed node q from the revealed state.

    Among the connection nodes of H(q) with nonzero cut margin, the nearest
    one in resistance distance wins (ties to the lowest node id) and its
    margin sign is the prediction; -1 when no such node exists.
    """
    labels = state.to_array(tree.node_count) if isinstance(state, RevealedState) else list(state)
    tree.check_node(q)
    label, _ = _predict_detail(tree, labels, q, _Scratch(tree.node_count))
    return label


def predict_signed(tree: WeightedTree, state, q: int) -> int:
    """Signed-graph prediction: margin sign flipped by negative-edge parity.

    Margins come from the frustration cut; the chosen connection node's
    sign is multiplied by (-1)^z, z the number of negative edges on the
    path from q to it.  The default -1 is unchanged.
    """
    if not tree.signed_mode:
        raise SignedModeRequired("predict_signed needs a signed-mode tree")
    labels = state.to_array(tree.node_count) if isinstance(state, RevealedState) else list(state)
    tree.check_node(q)
    if labels[q]:
        raise RevealedQuery(f"node {q} is already revealed")
    sc = _Scratch(tree.node_count)
    view = _hinge_view_from(tree, labels, q, sc)
    best = None
    for j in view.connection_nodes:
        s = view.margin_signs[j]
        if s == 0:
            continue
        key = (view.distances[j], j)
        if best is None or key < best[0]:
            best = (key, j, s)
    if best is None:
        return DEFAULT_LABEL
    _, j, s = best
    z = 0
    x = j
    while x != q:
        if sc.parent_w[x] < 0.0:
            z += 1
        x = sc.parent[x]
    return -s if z % 2 else s


def _hinge_view_from(tree, labels, q, sc):
    # same construction as hinge_structure but reusing a caller's scratch,
    # so predict_signed can walk the parent pointers afterwards
    forks, hinge, members = _local_structure(tree, labels, q, sc)
    if q in hinge:
        connection = (q,)
    else:
        member_set = set(members)
        conn = set()
        for x in members:
            for nb, _ in tree.adj[x]:
                if nb not in member_set:
                    conn.add(nb)
        connection = tuple(sorted(conn))
    signs = {j: (labels[j] or _margin_sign_local(tree, labels, j)) for j in connection}
    dists = {j: (0.0 if j == q else _path_distance(sc, q, j)) for j in connection}
    return HingeView(q, forks, frozenset(hinge), frozenset(members), connection, signs, dists)


def run_online(tree: WeightedTree, truth, order: Sequence[int]) -> MistakeTrace:
    """Present nodes in ``order``, predicting each before its label is revealed."""
    n = tree.node_count
    order = list(order)
    if sorted(order) != list(range(n)):
        raise DataError("order must be a permutation of all nodes")
    truth_arr = _truth_array(truth, n)
    labels = [0] * n
    sc = _Scratch(n)
    steps = []
    mistakes = 0
    for q in order:
        pred, _ = _predict_detail(tree, labels, q, sc)
        t = truth_arr[q]
        bad = pred != t
        mistakes += bad
        steps.append(PredictionStep(q, pred, t, bad))
        labels[q] = t
    return MistakeTrace(tuple(steps), mistakes)


def _truth_array(truth, n: int) -> list[int]:
    if isinstance(truth, Mapping):
        arr = [0] * n
        for k, y in truth.items():
            arr[k] = y
    else:
        arr = list(truth)
        if len(arr) != n:
            raise DataError("truth must assign a label to every node")
    for i, y in enumerate(arr):
        if y not in (-1, 1):
            raise DataError(f"truth label of node {i} must be +/-1, got {y!r}")
    return arr


def predict_batch(tree: WeightedTree, train, test: Iterable[int]) -> dict[int, int]:
    """Predict every test node at once; matches predict_online pointwise.

    One linear cut pass yields margins for all forks; each hinge tree is
    then swept once from its nonzero-margin connection nodes, every member
    keeping the nearest source (ties to the lowest source id).
    """
    preds, _ = _predict_batch_detail(tree, *_batch_args(tree, train, test))
    return preds


def predict_batch_with_stats(tree: WeightedTree, train, test: Iterable[int]):
    """predict_batch plus a stats dict (default-branch usage)."""
    labels, test = _batch_args(tree, train, test)
    preds, defaults = _predict_batch_detail(tree, labels, test)
    frac = defaults / len(test) if test else 0.0
    return preds, {"default_count": defaults, "default_fraction": frac}


def _batch_args(tree, train, test):
    labels = train.to_array(tree.node_count) if isinstance(train, RevealedState) else list(train)
    test = list(test)
    for q in test:
        tree.check_node(q)
        if labels[q]:
            raise RevealedQuery(f"test node {q} overlaps the training set")
    return labels, test


def _predict_batch_detail(tree: WeightedTree, labels: Sequence[int], test: list[int]):
    n = tree.node_count
    adj = tree.adj
    ctx = CutContext(tree, labels)
    fork = ctx.fork

    blocked = bytearray(n)
    for i in range(n):
        if labels[i] or fork[i]:
            blocked[i] = 1

    result: dict[int, int] = {}
    defaults = 0
    assigned = [0] * n
    swept = bytearray(n)

    for q in test:
        if fork[q]:
            s = ctx.margin_sign(q)
            if s == 0:
                s = DEFAULT_LABEL
                defaults += 1
            result[q] = s
            continue
        if not swept[q]:
            members = [q]
            swept[q] = 1
            sources = []
            for x in members:
                for nb, w in adj[x]:
                    if blocked[nb]:
                        s = ctx.margin_sign(nb)
                        if s:
                            sources.append((w, nb, x, s))
                    elif not swept[nb]:
                        swept[nb] = 1
                        members.append(nb)
            _propagate(adj, sources, blocked, assigned)
        s = assigned[q]
        if s == 0:
            s = DEFAULT_LABEL
            defaults += 1
        result[q] = s
    return result, defaults
