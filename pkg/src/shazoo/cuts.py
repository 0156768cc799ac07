"""Exact weighted mincut values on trees under revealed-label constraints.

Everything here reduces to one recursion.  Root a subtree anywhere and let
``pair(x) = (best cutsize below x if x is labeled -1, same for +1)``; a
child contributes the cheapest of keeping or flipping its own label, paying
the edge weight on a disagreement.  In signed mode the payment is the
absolute weight and is charged when the labels *frustrate* the edge sign
(equal labels across a negative edge, differing labels across a positive
one), which for positive weights degenerates to the plain disagreement
charge.

Cut values are exact sums of input weights; minima use exact comparisons,
no epsilon.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from .errors import (
    PositiveWeightsRequired,
    RevealedQuery,
    SignedModeRequired,
)
from .graphs import RevealedState, WeightedTree


def _trans(m: float, p: float, w: float) -> tuple[float, float]:
    """Child contribution to the parent's (-1, +1) slots.

    (m, p) is the child's own pair; w the connecting weight.  Negative w
    charges |w| on label agreement instead of disagreement.
    """
    if w > 0.0:
        tm = m if m <= p + w else p + w
        tp = p if p <= m + w else m + w
    else:
        aw = -w
        tm = p if p <= m + aw else m + aw
        tp = m if m <= p + aw else p + aw
    return tm, tp


def _leaf_charge(y: int, w: float) -> tuple[float, float]:
    """Contribution of a revealed neighbor with label y across weight w."""
    if w > 0.0:
        # disagreement charge
        return (w, 0.0) if y > 0 else (0.0, w)
    aw = -w
    # agreement (frustration) charge
    return (aw, 0.0) if y < 0 else (0.0, aw)


def _labels_array(tree: WeightedTree, state) -> list[int]:
    if isinstance(state, RevealedState):
        return state.to_array(tree.node_count)
    return list(state)


def _rooted_pair(tree: WeightedTree, labels: Sequence[int], root: int) -> tuple[float, float]:
    """(cut(root,-1), cut(root,+1)) over the WHOLE tree rooted at root.

    Revealed nodes stay internal but are pinned to their label, so the
    result is the global constrained minimum, not just the portion inside
    the revealed-free subtree around the root.
    """
    adj = tree.adj
    order, parent, _ = tree.bfs_parents(root)
    pm = [0.0] * tree.node_count
    pp = [0.0] * tree.node_count
    for x in reversed(order):
        am = ap = 0.0
        par = parent[x]
        for nb, w in adj[x]:
            if nb == par:
                continue
            ly = labels[nb]
            if ly:
                cm, cp = pm[nb], pp[nb]
                base = cm if ly < 0 else cp
                lm, lp = _leaf_charge(ly, w)
                am += base + lm
                ap += base + lp
            else:
                tm, tp = _trans(pm[nb], pp[nb], w)
                am += tm
                ap += tp
        pm[x] = am
        pp[x] = ap
    return pm[root], pp[root]


def _boundary_pair(tree: WeightedTree, labels: Sequence[int], root: int) -> tuple[float, float]:
    """Like :func:`_rooted_pair` but only over the revealed-free subtree.

    The walk stops at revealed nodes (they act as leaves with a pinned
    label), yielding the component-local cut pair.  The difference of the
    two slots equals the global one exactly in real arithmetic.
    """
    adj = tree.adj
    n = tree.node_count
    parent = [-2] * n  # -2 unvisited, -1 root marker
    order = [root]
    parent[root] = -1
    for x in order:
        for nb, _ in adj[x]:
            if parent[nb] == -2 and not labels[nb]:
                parent[nb] = x
                order.append(nb)
    pm = [0.0] * n
    pp = [0.0] * n
    for x in reversed(order):
        am = ap = 0.0
        par = parent[x]
        for nb, w in adj[x]:
            if nb == par:
                continue
            ly = labels[nb]
            if ly:
                lm, lp = _leaf_charge(ly, w)
                am += lm
                ap += lp
            else:
                tm, tp = _trans(pm[nb], pp[nb], w)
                am += tm
                ap += tp
        pm[x] = am
        pp[x] = ap
    return pm[root], pp[root]


def _check_unsigned_weights(tree: WeightedTree):
    if tree.signed_mode:
        for _, _, w in tree.edges:
            if w < 0.0:
                raise PositiveWeightsRequired(
                    "disagreement cuts are undefined with negative weights; "
                    "use frustration_value"
                )


def cut_value(tree: WeightedTree, state, v: int, y: int) -> float:
    """Minimum weighted cutsize over labelings consistent with ``state`` and y_v = y.

    Evaluated by a depth-first pass of the disagreement recursion over the
    whole tree with revealed labels pinned, so the value matches a brute
    force over every consistent completion exactly.
    """
    _check_unsigned_weights(tree)
    labels = _labels_array(tree, state)
    tree.check_node(v)
    if labels[v]:
        raise RevealedQuery(f"node {v} is already revealed")
    if y not in (-1, 1):
        raise RevealedQuery(f"label must be +1 or -1, got {y!r}")
    pm, pp = _rooted_pair(tree, labels, v)
    return pm if y < 0 else pp


def frustration_value(tree: WeightedTree, state, v: int, y: int) -> float:
    """Minimum total weight of frustrated edges, signed-graph analogue of cut_value."""
    if not tree.signed_mode:
        raise SignedModeRequired("frustration_value needs a signed-mode tree")
    labels = _labels_array(tree, state)
    tree.check_node(v)
    if labels[v]:
        raise RevealedQuery(f"node {v} is already revealed")
    if y not in (-1, 1):
        raise RevealedQuery(f"label must be +1 or -1, got {y!r}")
    pm, pp = _rooted_pair(tree, labels, v)
    return pm if y < 0 else pp


def cut_margin(tree: WeightedTree, state, v: int) -> float:
    """cut(v,-1) - cut(v,+1) for unrevealed v; the +/-1 label for revealed v.

    Positive means +1 is the cheaper completion.  Zero is a meaningful
    third state and is preserved.  Signed-mode trees use the frustration
    charge, as do all predictors built on top of this margin.
    """
    labels = _labels_array(tree, state)
    tree.check_node(v)
    if labels[v]:
        return float(labels[v])
    pm, pp = _boundary_pair(tree, labels, v)
    return pm - pp


@dataclass(frozen=True)
class CutTable:
    """cut(v,-1) and cut(v,+1) for every unrevealed node of one snapshot."""

    values: Mapping[int, tuple[float, float]]
    state_signature: tuple[tuple[int, int], ...]

    def cut(self, v: int, y: int) -> float:
        pm, pp = self.values[v]
        return pm if y < 0 else pp

    def margin(self, v: int) -> float:
        pm, pp = self.values[v]
        return pm - pp

    def __contains__(self, v: int) -> bool:
        return v in self.values

    def __len__(self) -> int:
        return len(self.values)


class CutContext:
    """Shared product of one linear pass over the tree for a given state.

    Splitting the tree at revealed nodes yields edge-disjoint components
    whose interiors are unrevealed.  Per component the bottom-up pass
    computes rooted pairs and the top-down rerooting pass turns them into
    per-node local pairs; fork flags fall out of the same traversal by
    counting incident directions that hold at least one revealed node.
    """

    __slots__ = (
        "tree", "labels", "comp_of", "comp_min", "parent", "parent_weight",
        "local_minus", "local_plus", "fork", "rr_weight", "total_min",
    )

    def __init__(self, tree: WeightedTree, labels: Sequence[int]):
        self.tree = tree
        self.labels = labels
        n = tree.node_count
        adj = tree.adj
        comp_of = [-1] * n
        parent = [-2] * n
        parent_w = [0.0] * n
        down_m = [0.0] * n
        down_p = [0.0] * n
        full_m = [0.0] * n
        full_p = [0.0] * n
        sub_rev = [0] * n
        down_dirs = [0] * n
        fork = bytearray(n)
        comp_min: list[float] = []

        for seed in range(n):
            if labels[seed] or comp_of[seed] >= 0:
                continue
            cid = len(comp_min)
            order = [seed]
            comp_of[seed] = cid
            parent[seed] = -1
            for x in order:
                for nb, w in adj[x]:
                    if nb == parent[x] or labels[nb]:
                        continue
                    if comp_of[nb] >= 0:
                        continue
                    comp_of[nb] = cid
                    parent[nb] = x
                    parent_w[nb] = w
                    order.append(nb)

            # bottom-up: rooted pairs, revealed counts, revealed directions
            for x in reversed(order):
                am = ap = 0.0
                srev = 0
                dirs = 0
                par = parent[x]
                for nb, w in adj[x]:
                    if nb == par:
                        continue
                    ly = labels[nb]
                    if ly:
                        lm, lp = _leaf_charge(ly, w)
                        am += lm
                        ap += lp
                        srev += 1
                        dirs += 1
                    else:
                        tm, tp = _trans(down_m[nb], down_p[nb], w)
                        am += tm
                        ap += tp
                        if sub_rev[nb]:
                            srev += sub_rev[nb]
                            dirs += 1
                down_m[x] = am
                down_p[x] = ap
                sub_rev[x] = srev
                down_dirs[x] = dirs

            total_rev = sub_rev[seed]

            # top-down rerooting in breadth-first order: parents first
            for x in order:
                par = parent[x]
                if par < 0:
                    full_m[x] = down_m[x]
                    full_p[x] = down_p[x]
                else:
                    w = parent_w[x]
                    txm, txp = _trans(down_m[x], down_p[x], w)
                    um = full_m[par] - txm
                    up = full_p[par] - txp
                    tm, tp = _trans(um, up, w)
                    full_m[x] = down_m[x] + tm
                    full_p[x] = down_p[x] + tp
                if (down_dirs[x] + (1 if total_rev > sub_rev[x] else 0)) >= 3:
                    fork[x] = 1

            cmin = full_m[seed]
            if full_p[seed] < cmin:
                cmin = full_p[seed]
            comp_min.append(cmin)

        # edges joining two revealed nodes carry a forced, constant charge
        rr = 0.0
        for u, v, w in tree.edges:
            lu = labels[u]
            lv = labels[v]
            if lu and lv:
                if w > 0.0:
                    if lu != lv:
                        rr += w
                elif lu == lv:
                    rr += -w

        self.comp_of = comp_of
        self.comp_min = comp_min
        self.parent = parent
        self.parent_weight = parent_w
        self.local_minus = full_m
        self.local_plus = full_p
        self.fork = fork
        self.rr_weight = rr
        self.total_min = rr + sum(comp_min)

    def local_pair(self, v: int) -> tuple[float, float]:
        return self.local_minus[v], self.local_plus[v]

    def margin_sign(self, v: int) -> int:
        """Sign of the cut margin at v; revealed nodes return their label."""
        ly = self.labels[v]
        if ly:
            return ly
        pm = self.local_minus[v]
        pp = self.local_plus[v]
        if pm > pp:
            return 1
        if pm < pp:
            return -1
        return 0

    def global_pair(self, v: int) -> tuple[float, float]:
        rest = self.total_min - self.comp_min[self.comp_of[v]]
        return self.local_minus[v] + rest, self.local_plus[v] + rest


def cut_context(tree: WeightedTree, state) -> CutContext:
    return CutContext(tree, _labels_array(tree, state))


def batch_cut_values(tree: WeightedTree, state) -> CutTable:
    """cut(v,+/-1) for every unrevealed node in one linear pass.

    One rooted depth-first pass per revealed-free component computes the
    child-aggregated pairs; a breadth-first top-down pass applies the
    rerooting identity, so ancestors' values exist before descendants'.
    Signed-mode trees yield frustration values.
    """
    labels = _labels_array(tree, state)
    ctx = CutContext(tree, labels)
    sig = state.signature() if isinstance(state, RevealedState) else tuple(
        (i, y) for i, y in enumerate(labels) if y
    )
    values = {
        v: ctx.global_pair(v)
        for v in range(tree.node_count)
        if not labels[v]
    }
    return CutTable(values, sig)
