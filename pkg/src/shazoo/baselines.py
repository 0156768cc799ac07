"""Comparison algorithms: online majority vote, label propagation,
nearest-neighbor prediction on a linearized tree, and committee voting.

All predictors share the label-asymmetric default of -1 on zero evidence
so comparisons against the tree predictor stay fair.
"""

from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import (
    ConfigError,
    DataError,
    NoTrainingLabels,
    PositiveWeightsRequired,
)
from .graphs import RevealedState, WeightedGraph
from .predict import DEFAULT_LABEL, MistakeTrace, PredictionStep, _truth_array, predict_batch
from .spanning import KIND_MST, WeightedLine, dfs_linearize, sample_tree


def omv_run(g: WeightedGraph, truth, order: Sequence[int]) -> MistakeTrace:
    """Online majority vote: sign of the weighted sum of revealed neighbor labels.

    An empty or exactly balanced sum falls back to the default -1.
    """
    n = g.node_count
    order = list(order)
    if sorted(order) != list(range(n)):
        raise DataError("order must be a permutation of all nodes")
    truth_arr = _truth_array(truth, n)
    revealed = [0] * n
    steps = []
    mistakes = 0
    for q in order:
        vote = 0.0
        for nb, w in g.adj[q]:
            vote += revealed[nb] * w
        pred = 1 if vote > 0.0 else DEFAULT_LABEL
        t = truth_arr[q]
        bad = pred != t
        mistakes += bad
        steps.append(PredictionStep(q, pred, t, bad))
        revealed[q] = t
    return MistakeTrace(tuple(steps), mistakes)


def label_propagation(
    g: WeightedGraph,
    train,
    tol: float = 1e-8,
    max_iter: int | None = None,
) -> dict[int, float]:
    """Harmonic values: training nodes clamped to +/-1, every other node the
    weighted average of its neighbors, solved by Gauss-Seidel sweeps.

    Stops when the largest per-sweep update falls to ``tol`` or after
    ``max_iter`` sweeps (default 10 * n * max degree).  Values stay inside
    [-1, 1] by construction.  Unlabeled nodes in components without any
    training label keep the value 0.
    """
    for _, _, w in g.edges:
        if w < 0.0:
            raise PositiveWeightsRequired("label propagation needs positive weights")
    labels = train.to_array(g.node_count) if isinstance(train, RevealedState) else list(train)
    n = g.node_count
    clamped = [y != 0 for y in labels]
    if not any(clamped):
        raise NoTrainingLabels("no clamped nodes; harmonic system is underdetermined")
    values = [float(y) for y in labels]
    free = [i for i in range(n) if not clamped[i] and g.adj[i]]
    if max_iter is None:
        max_deg = max((len(g.adj[i]) for i in range(n)), default=0)
        max_iter = 10 * n * max(max_deg, 1)
    for _ in range(max_iter):
        worst = 0.0
        for i in free:
            num = 0.0
            den = 0.0
            for nb, w in g.adj[i]:
                num += w * values[nb]
                den += w
            new = num / den
            change = abs(new - values[i])
            if change > worst:
                worst = change
            values[i] = new
        if worst <= tol:
            break
    for v in values:
        if not -1.0 <= v <= 1.0:  # pragma: no cover - maximum principle
            raise DataError("harmonic value escaped [-1, 1]")
    return {i: values[i] for i in range(n)}


def labprop_predict(g: WeightedGraph, train, test: Iterable[int], **kw) -> dict[int, int]:
    """Sign of the harmonic value on the test nodes; ties (0) go to -1."""
    values = label_propagation(g, train, **kw)
    return {q: (1 if values[q] > 0.0 else DEFAULT_LABEL) for q in test}


def wta_predict(line: WeightedLine, train, test: Iterable[int]) -> dict[int, int]:
    """Nearest revealed node along the line, in resistance distance.

    Distance ties go to the lower line position; with no revealed node at
    all every prediction is the default -1.
    """
    pos_of = {node: i for i, node in enumerate(line.nodes)}
    if isinstance(train, RevealedState):
        train_items = dict(train.labels)
    else:
        train_items = dict(train)
    positions = line.positions()
    rev = sorted(pos_of[node] for node in train_items)
    out: dict[int, int] = {}
    for q in test:
        if q not in pos_of:
            raise DataError(f"test node {q} is not on the line")
        if q in train_items:
            raise DataError(f"test node {q} overlaps the training set")
        if not rev:
            out[q] = DEFAULT_LABEL
            continue
        p = pos_of[q]
        x = positions[p]
        k = bisect_left(rev, p)
        best = None
        for idx in (k - 1, k):
            if 0 <= idx < len(rev):
                r = rev[idx]
                key = (abs(positions[r] - x), r)
                if best is None or key < best[0]:
                    best = (key, line.nodes[r])
        out[q] = train_items[best[1]]
    return out


@dataclass(frozen=True)
class CommitteeConfig:
    """Majority vote over k spanning trees of one kind."""

    k: int
    tree_kind: str
    base_seed: int = 0

    def __post_init__(self):
        if self.k < 1 or self.k % 2 == 0:
            raise ConfigError(f"committee size must be odd and positive, got {self.k}")
        if self.tree_kind not in ("rst", "nwrst", "mst"):
            raise ConfigError(f"unknown tree kind {self.tree_kind!r}")

    def member_seed(self, index: int) -> int:
        # documented splitting rule: member i samples with base_seed + i
        return self.base_seed + index


def committee_predict(
    g: WeightedGraph,
    train,
    test: Iterable[int],
    cfg: CommitteeConfig,
    algo: str = "shazoo",
) -> dict[int, int]:
    """Per-node majority label over k independently sampled spanning trees."""
    algo = algo.lower()
    if algo not in ("shazoo", "wta"):
        raise ConfigError(f"committee algorithm must be shazoo or wta, got {algo!r}")
    test = list(test)
    votes = {q: 0 for q in test}
    for i in range(cfg.k):
        seed = cfg.member_seed(i)
        sample = sample_tree(g, cfg.tree_kind, seed)
        if algo == "shazoo":
            preds = predict_batch(sample.tree, train, test)
        else:
            line = dfs_linearize(sample.tree, root=0)
            preds = wta_predict(line, train, test)
        for q, y in preds.items():
            votes[q] += y
        if cfg.tree_kind == KIND_MST:
            # deterministic members are identical; one of them decides
            return dict(preds)
    return {q: (1 if v > 0 else -1) for q, v in votes.items()}
