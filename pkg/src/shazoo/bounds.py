"""Theory instrumentation: cutsize measures, the edge-budget function, the
adversarial labeling generator, and mistake-bound comparison reports.

The upper-bound figure emitted by :func:`bound_gap_report` is a PROXY: the
per-line logarithmic terms of the exact analysis are replaced by a single
worst-case log factor built from the tree's resistance diameter, so it is
a diagnostic yardstick, not the exact bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .errors import ConfigError, DataError
from .graphs import WeightedTree
from .predict import MistakeTrace


def _grow_expansion(partials: list[float], x: float) -> None:
    """Add x to a nonoverlapping float expansion holding an exact real sum."""
    i = 0
    for y in partials:
        if abs(x) < abs(y):
            x, y = y, x
        hi = x + y
        lo = y - (hi - x)
        if lo:
            partials[i] = lo
            i += 1
        x = hi
    del partials[i:]
    partials.append(x)


def _greedy_budget_edges(t: WeightedTree, budget: float) -> list[int]:
    """Edge ids of the maximum lightest-edge set whose weights fit the budget.

    Prefix sums are kept as exact expansions and compared through their
    correctly-rounded float value, the same number ``math.fsum`` reports,
    so a budget equal to a reported weighted cutsize always admits that
    cutsize's own edges.  Ties take lower edge ids first (the count is
    unaffected either way).
    """
    if budget < 0:
        raise ConfigError("budget must be nonnegative")
    order = sorted(range(len(t.edges)), key=lambda e: (abs(t.edges[e][2]), e))
    chosen = []
    partials: list[float] = []
    for e in order:
        _grow_expansion(partials, abs(t.edges[e][2]))
        if math.fsum(partials) > budget:
            break
        chosen.append(e)
    return chosen


def max_edges_within_budget(t: WeightedTree, budget: float) -> int:
    """Largest number of edges whose |weights| sum to at most ``budget``.

    Greedy over ascending weights is exact for this cardinality knapsack.
    """
    return len(_greedy_budget_edges(t, budget))


def _frustrated(y_u: int, y_v: int, w: float) -> bool:
    if w > 0.0:
        return y_u != y_v
    return y_u == y_v


def resistance_diameter(t: WeightedTree) -> float:
    """Largest resistance distance between any node pair (double sweep)."""

    def farthest(src: int) -> tuple[int, float]:
        order, parent, parent_w = t.bfs_parents(src)
        dist = [0.0] * t.node_count
        best, bd = src, 0.0
        for x in order[1:]:
            dist[x] = dist[parent[x]] + 1.0 / abs(parent_w[x])
            if dist[x] > bd:
                best, bd = x, dist[x]
        return best, bd

    if t.node_count <= 1:
        return 0.0
    a, _ = farthest(0)
    _, d = farthest(a)
    return d


@dataclass(frozen=True)
class CutsizeReport:
    """Cutsize measures of one full labeling of one tree."""

    cut_edge_count: int          # number of label-violating edges
    weighted_cutsize: float      # their total |weight|
    budget_edge_count: int       # max edges fitting within that weight
    resistance_diameter: float

    def __post_init__(self):
        if self.budget_edge_count < self.cut_edge_count:
            raise DataError("budget edge count can never undercut the raw count")


def cutsize_report(t: WeightedTree, labeling) -> CutsizeReport:
    """Count and weigh the violated edges of a full labeling.

    Positive mode counts disagreement edges; signed mode counts frustrated
    edges with their absolute weights.
    """
    labels = _full_labels(t, labeling)
    phi = 0
    terms = []
    for u, v, w in t.edges:
        if _frustrated(labels[u], labels[v], w):
            phi += 1
            terms.append(abs(w))
    phi_w = math.fsum(terms)
    return CutsizeReport(
        cut_edge_count=phi,
        weighted_cutsize=phi_w,
        budget_edge_count=max_edges_within_budget(t, phi_w),
        resistance_diameter=resistance_diameter(t),
    )


def _full_labels(t: WeightedTree, labeling) -> list[int]:
    if isinstance(labeling, Mapping):
        missing = [i for i in range(t.node_count) if i not in labeling]
        if missing:
            raise DataError(f"labeling misses nodes {missing[:5]}")
        arr = [labeling[i] for i in range(t.node_count)]
    else:
        arr = list(labeling)
        if len(arr) != t.node_count:
            raise DataError("labeling must cover every node")
    for i, y in enumerate(arr):
        if y not in (-1, 1):
            raise DataError(f"label of node {i} must be +/-1, got {y!r}")
    return arr


@dataclass(frozen=True)
class AdversarialInstance:
    """A hard random labeling: constant on each component left by the
    removed edges, so its weighted cutsize never exceeds the budget."""

    labeling: tuple[int, ...]
    removed_edges: tuple[int, ...]
    budget: float


def adversarial_instance(t: WeightedTree, budget: float, rng) -> AdversarialInstance:
    """Remove the greedy lightest edge set fitting the budget and flip one
    independent fair coin per remaining component."""
    if budget < 0:
        raise ConfigError("budget must be nonnegative")
    gen = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
    removed = _greedy_budget_edges(t, budget)
    removed_set = set(removed)
    n = t.node_count

    comp = [-1] * n
    ncomp = 0
    adj: list[list[int]] = [[] for _ in range(n)]
    for e, (u, v, _) in enumerate(t.edges):
        if e not in removed_set:
            adj[u].append(v)
            adj[v].append(u)
    for s in range(n):
        if comp[s] >= 0:
            continue
        comp[s] = ncomp
        stack = [s]
        while stack:
            x = stack.pop()
            for nb in adj[x]:
                if comp[nb] < 0:
                    comp[nb] = ncomp
                    stack.append(nb)
        ncomp += 1

    coins = [1 if gen.integers(2) else -1 for _ in range(ncomp)]
    labeling = tuple(coins[comp[i]] for i in range(n))

    # construction guarantee, asserted per instance
    cut_w = math.fsum(
        abs(w) for e, (u, v, w) in enumerate(t.edges)
        if _frustrated(labeling[u], labeling[v], w)
    )
    if cut_w > budget + 1e-12 * max(budget, 1.0):  # pragma: no cover
        raise DataError("adversarial instance exceeded its cutsize budget")
    return AdversarialInstance(labeling, tuple(removed), budget)


@dataclass(frozen=True)
class BoundGapReport:
    """Observed mistakes framed by the theory proxies (diagnostic only)."""

    mistakes: int
    budget_edge_count: int
    weighted_cutsize: float
    lower_proxy: float
    upper_proxy: float
    lower_ratio: float | None
    upper_ratio: float | None
    saturated: bool
    note: str = "upper_proxy replaces per-line log terms with the worst-case diameter log factor (PROXY)"

    def csv_row(self, tree_id: str, n: int, phi: int) -> str:
        vals = [
            tree_id, str(n), str(phi),
            _fmt(self.weighted_cutsize), str(self.budget_edge_count),
            str(self.mistakes), _fmt(self.lower_proxy), _fmt(self.upper_proxy),
        ]
        return ",".join(vals)

    CSV_HEADER = "tree_id,n,cut_edges,weighted_cutsize,budget_edges,mistakes,lower_proxy,upper_proxy"


def _fmt(x: float) -> str:
    return f"{x:.6g}"


def bound_gap_report(trace: MistakeTrace, report: CutsizeReport) -> BoundGapReport:
    """Frame an online trace's mistakes between the two theory proxies."""
    xi = report.budget_edge_count
    lower = xi / 2.0
    upper = xi * (1.0 + math.log1p(report.weighted_cutsize * report.resistance_diameter))
    m = trace.mistake_count
    return BoundGapReport(
        mistakes=m,
        budget_edge_count=xi,
        weighted_cutsize=report.weighted_cutsize,
        lower_proxy=lower,
        upper_proxy=upper,
        lower_ratio=(m / lower) if lower > 0 else None,
        upper_ratio=(m / upper) if upper > 0 else None,
        saturated=_saturated(trace, report),
    )


def _saturated(trace: MistakeTrace, report: CutsizeReport) -> bool:
    # every edge fits the budget: structure cannot help, upper ~ lower regime
    return report.budget_edge_count >= len(trace.steps) - 1
