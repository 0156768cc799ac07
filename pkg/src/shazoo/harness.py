"""Experiment pipeline: dataset construction, splits, metrics, synthetic
generators and the CSV-reporting experiment runner.

Protocol decisions that the underlying references leave open are flagged in
the CSV metadata header rather than silently baked in: kNN graphs are
symmetrized by union, zero votes and zero harmonic values fall to -1, and
online baselines score test nodes only (training labels revealed first).
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .baselines import (
    CommitteeConfig,
    committee_predict,
    labprop_predict,
    omv_run,
    wta_predict,
)
from .bounds import cutsize_report, CutsizeReport
from .errors import ConfigError, DataError, DegenerateSigma
from .graphs import RevealedState, WeightedGraph, WeightedTree
from .predict import predict_batch_with_stats
from .spanning import dfs_linearize, sample_tree

CSV_SCHEMA_VERSION = 1

ALGORITHMS = ("shazoo", "wta", "omv", "labprop", "k*shazoo", "k*wta")
METRICS = ("error_rate", "f_measure")


def knn_graph(features, k: int) -> WeightedGraph:
    """Symmetrized k-nearest-neighbor graph with Gaussian kernel weights.

    Edge (i, j) exists when either point ranks among the other's k nearest
    Euclidean neighbors.  Each point's bandwidth sigma2_i is the mean
    squared distance to its own k nearest neighbors, and the edge weight is
    exp(-d2(i,j) / ((sigma2_i + sigma2_j) / 2)).
    """
    X = np.asarray(features, dtype=float)
    if X.ndim != 2:
        raise DataError("feature matrix must be 2-dimensional")
    if not np.isfinite(X).all():
        raise DataError("feature matrix contains non-finite entries")
    n = X.shape[0]
    if not 1 <= k < n:
        raise ConfigError(f"need 1 <= k < n, got k={k}, n={n}")

    norms = (X * X).sum(axis=1)
    sq = norms[:, None] + norms[None, :] - 2.0 * (X @ X.T)
    np.maximum(sq, 0.0, out=sq)
    np.fill_diagonal(sq, np.inf)
    nn_idx = np.argsort(sq, axis=1, kind="stable")[:, :k]
    nn_d2 = np.take_along_axis(sq, nn_idx, axis=1)
    sigma2 = nn_d2.mean(axis=1)

    pairs = set()
    for i in range(n):
        for j in nn_idx[i]:
            a, b = (i, int(j)) if i < j else (int(j), i)
            pairs.add((a, b))
    edges = []
    for a, b in sorted(pairs):
        s = 0.5 * (sigma2[a] + sigma2[b])
        if s == 0.0:
            raise DegenerateSigma(a if sigma2[a] == 0.0 else b)
        edges.append((a, b, float(math.exp(-sq[a, b] / s))))
    return WeightedGraph(n, edges)


def load_feature_csv(stream) -> np.ndarray:
    """Comma-separated reals, one row per node; '#' comments allowed."""
    rows = []
    text = stream if isinstance(stream, str) else stream.read()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            rows.append([float(x) for x in line.split(",")])
        except ValueError as exc:
            raise DataError(f"bad feature row at line {lineno}: {exc}") from None
    if not rows:
        raise DataError("empty feature matrix")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise DataError("feature rows have inconsistent lengths")
    return np.asarray(rows, dtype=float)


def make_split(n: int, train_fraction: float, rng) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Uniform random train subset of size round(fraction * n); rest is test."""
    if not 0.0 < train_fraction < 1.0:
        raise ConfigError("train_fraction must be in (0, 1)")
    gen = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
    size = round(train_fraction * n)
    if size == 0 or size == n:
        raise ConfigError(
            f"train_fraction={train_fraction} on n={n} leaves an empty train or test set"
        )
    train = np.sort(gen.choice(n, size=size, replace=False))
    mask = np.ones(n, dtype=bool)
    mask[train] = False
    test = np.flatnonzero(mask)
    return tuple(int(i) for i in train), tuple(int(i) for i in test)


@dataclass(frozen=True)
class BinaryTask:
    """One +1-vs-rest labeling derived from a multiclass assignment."""

    positive_class: int
    labels: tuple[int, ...]


def one_vs_all(class_ids: Sequence[int]) -> list[BinaryTask]:
    """One binary labeling per class: +1 for the class, -1 for the rest."""
    classes = sorted(set(class_ids))
    if len(classes) < 2:
        raise ConfigError("one-vs-all needs at least two classes")
    return [
        BinaryTask(c, tuple(1 if y == c else -1 for y in class_ids))
        for c in classes
    ]


def error_rate(predictions: Mapping[int, int], truth: Mapping[int, int]) -> float:
    if not predictions:
        raise ConfigError("empty test set")
    wrong = sum(1 for q, y in predictions.items() if truth[q] != y)
    return wrong / len(predictions)


def f_measure(predictions: Mapping[int, int], truth: Mapping[int, int]) -> float:
    """F1 with +1 the positive class.

    Conventions: precision is 0 with no predicted positives, and F is 0
    when precision + recall is 0.
    """
    if not predictions:
        raise ConfigError("empty test set")
    tp = fp = fn = 0
    for q, y in predictions.items():
        t = truth[q]
        if y == 1 and t == 1:
            tp += 1
        elif y == 1 and t == -1:
            fp += 1
        elif y == -1 and t == 1:
            fn += 1
    precision = tp / (tp + fp) if (tp + fp) else 0.0
    recall = tp / (tp + fn) if (tp + fn) else 0.0
    if precision + recall == 0.0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def evaluate(predictions, truth, kind: str) -> float:
    if kind == "error_rate":
        return error_rate(predictions, truth)
    if kind == "f_measure":
        return f_measure(predictions, truth)
    raise ConfigError(f"unknown metric {kind!r}")


@dataclass(frozen=True)
class PlantedInstance:
    tree: WeightedTree
    labeling: tuple[int, ...]
    report: CutsizeReport
    cut_edges: tuple[int, ...]


def synth_planted_tree(n: int, clusters: int, phi_w_budget: float, rng) -> PlantedInstance:
    """Random tree with ``clusters`` contiguous +/-1 regions.

    The clusters-1 edges between regions get light weights summing to at
    most half the budget; all other edges are heavy (dyadic in [1, 2]).
    Region labels alternate across every cut edge, so the cut-edge count is
    exactly clusters-1 and the weighted cutsize stays within budget.
    """
    if clusters < 1 or n < clusters:
        raise ConfigError("need clusters >= 1 and n >= clusters")
    if clusters > 1:
        light = phi_w_budget / (2 * (clusters - 1))
        if not light > 0.0:
            raise ConfigError(
                f"budget {phi_w_budget} cannot pay for {clusters - 1} positive cut edges"
            )
    gen = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)

    parents = [int(gen.integers(0, i)) for i in range(1, n)]
    cut_ids = set()
    if clusters > 1:
        cut_ids = set(int(e) for e in gen.choice(n - 1, size=clusters - 1, replace=False))
    edges = []
    for i, p in enumerate(parents):
        if i in cut_ids:
            w = light
        else:
            w = int(gen.integers(8, 17)) / 8.0
        edges.append((p, i + 1, w))
    tree = WeightedTree(n, edges)

    # regions = components after removing the cut edges; 2-color the
    # region adjacency (a tree), so every cut edge separates labels
    region = [-1] * n
    nregions = 0
    adj: list[list[int]] = [[] for _ in range(n)]
    for e, (u, v, _) in enumerate(edges):
        if e not in cut_ids:
            adj[u].append(v)
            adj[v].append(u)
    for s in range(n):
        if region[s] >= 0:
            continue
        region[s] = nregions
        stack = [s]
        while stack:
            x = stack.pop()
            for nb in adj[x]:
                if region[nb] < 0:
                    region[nb] = nregions
                    stack.append(nb)
        nregions += 1

    # cut edges of a tree chain the regions into a tree; alternate the
    # region colors across every cut edge by sweeping to a fixpoint
    color = [0] * nregions
    color[region[0]] = 1
    changed = True
    while changed:
        changed = False
        for e in cut_ids:
            u, v, _ = edges[e]
            ru, rv = region[u], region[v]
            if color[ru] and not color[rv]:
                color[rv] = -color[ru]
                changed = True
            elif color[rv] and not color[ru]:
                color[ru] = -color[rv]
                changed = True
    labeling = tuple(color[region[i]] for i in range(n))

    report = cutsize_report(tree, labeling)
    if report.weighted_cutsize > phi_w_budget:  # pragma: no cover - constructive
        raise DataError("planted tree exceeded its cutsize budget")
    if report.cut_edge_count != clusters - 1:  # pragma: no cover - constructive
        raise DataError("planted tree has the wrong number of cut edges")
    return PlantedInstance(tree, labeling, report, tuple(sorted(cut_ids)))


@dataclass(frozen=True)
class ExperimentConfig:
    """One experiment: algorithm x tree kind x split size x repetitions."""

    algorithm: str
    train_fraction: float
    repetitions: int = 10
    seed: int = 0
    tree_kind: str = "mst"
    committee_size: int = 11
    metric: str = "error_rate"

    def __post_init__(self):
        algo = self.algorithm.lower()
        object.__setattr__(self, "algorithm", algo)
        if algo not in ALGORITHMS:
            raise ConfigError(f"unknown algorithm {self.algorithm!r}; expected one of {ALGORITHMS}")
        if self.repetitions < 1:
            raise ConfigError("repetitions must be >= 1")
        if self.metric not in METRICS:
            raise ConfigError(f"unknown metric {self.metric!r}")
        if algo.startswith("k*") and self.committee_size % 2 == 0:
            raise ConfigError("committee size must be odd")
        if self.tree_kind not in ("rst", "nwrst", "mst"):
            raise ConfigError(f"unknown tree kind {self.tree_kind!r}")


def _split_rng(seed: int, repetition: int) -> np.random.Generator:
    return np.random.default_rng([seed, repetition, 0x5eed])


def _tree_seed(seed: int, repetition: int) -> int:
    return seed * 1_000_003 + repetition


def _predict_split(cfg, graph, labels, train_ids, test_ids, repetition):
    """Run one algorithm on one split; returns (predictions, default_fraction).

    The spanning-tree algorithms operate per connected component (graphs
    built by kNN union can come apart); test nodes in components without
    any training label fall to the default -1.
    """
    train_state = RevealedState.from_pairs((i, labels[i]) for i in train_ids)
    algo = cfg.algorithm
    if algo == "labprop":
        return labprop_predict(graph, train_state, test_ids), 0.0
    if algo == "omv":
        preds = _omv_split_predict(graph, labels, train_ids, test_ids,
                                   _split_rng(cfg.seed, repetition))
        return preds, 0.0

    preds: dict[int, int] = {}
    defaults = 0
    for sub, originals in _component_graphs(graph):
        back = dict(enumerate(originals))
        fwd = {orig: i for i, orig in back.items()}
        sub_test = [fwd[q] for q in test_ids if q in fwd]
        if not sub_test:
            continue
        sub_train = RevealedState.from_pairs(
            (fwd[i], labels[i]) for i in train_ids if i in fwd
        )
        sub_preds, dcount = _tree_algo_predict(cfg, sub, sub_train, sub_test, repetition)
        defaults += dcount
        for q, y in sub_preds.items():
            preds[back[q]] = y
    default_fraction = defaults / len(test_ids) if test_ids else 0.0
    return preds, default_fraction


def _component_graphs(graph):
    from .graphs import connected_components, induced_subgraph

    comps = connected_components(graph)
    if len(comps) == 1:
        return [(graph, list(range(graph.node_count)))]
    return [induced_subgraph(graph, comp) for comp in comps]


def _tree_algo_predict(cfg, graph, train_state, test_ids, repetition):
    """One spanning-tree algorithm on one connected graph."""
    algo = cfg.algorithm
    if not len(train_state):
        return {q: -1 for q in test_ids}, len(test_ids)
    if algo == "shazoo":
        sample = sample_tree(graph, cfg.tree_kind, _tree_seed(cfg.seed, repetition))
        preds, stats = predict_batch_with_stats(sample.tree, train_state, test_ids)
        return preds, stats["default_count"]
    if algo == "wta":
        sample = sample_tree(graph, cfg.tree_kind, _tree_seed(cfg.seed, repetition))
        line = dfs_linearize(sample.tree, root=0)
        return wta_predict(line, train_state, test_ids), 0
    if algo in ("k*shazoo", "k*wta"):
        committee = CommitteeConfig(
            k=cfg.committee_size,
            tree_kind=cfg.tree_kind,
            base_seed=_tree_seed(cfg.seed, repetition),
        )
        preds = committee_predict(graph, train_state, test_ids, committee,
                                  algo=algo.removeprefix("k*"))
        return preds, 0
    raise ConfigError(algo)  # pragma: no cover


def _omv_split_predict(graph, labels, train_ids, test_ids, gen):
    """Score the online majority vote on test nodes only: training labels
    are presented first, then the test nodes in random order."""
    test_perm = list(test_ids)
    gen.shuffle(test_perm)
    order = list(train_ids) + test_perm
    trace = omv_run(graph, labels, order)
    return {s.node: s.predicted for s in trace.steps[len(train_ids):]}


@dataclass
class ExperimentRow:
    repetition: int
    task: str
    value: float
    default_fraction: float
    degenerate: bool


@dataclass
class ExperimentReport:
    config: ExperimentConfig
    rows: list[ExperimentRow] = field(default_factory=list)
    mean: float = float("nan")
    std: float = float("nan")
    components: int = 1

    def to_csv(self) -> str:
        buf = io.StringIO()
        c = self.config
        buf.write(f"# schema_version={CSV_SCHEMA_VERSION}\n")
        buf.write(
            f"# algorithm={c.algorithm} tree_kind={c.tree_kind} "
            f"train_fraction={_g(c.train_fraction)} repetitions={c.repetitions} "
            f"seed={c.seed} committee_size={c.committee_size} metric={c.metric} "
            f"graph_components={self.components}\n"
        )
        buf.write("# decisions: knn_symmetrization=union omv_zero_vote=-1 "
                  "labprop_zero_value=-1 default_label=-1 "
                  "disconnected=per-component\n")
        buf.write("repetition,task,metric,value,default_fraction,degenerate\n")
        for r in self.rows:
            buf.write(
                f"{r.repetition},{r.task},{c.metric},{_g(r.value)},"
                f"{_g(r.default_fraction)},{int(r.degenerate)}\n"
            )
        buf.write(f"summary,mean,{c.metric},{_g(self.mean)},,\n")
        buf.write(f"summary,std,{c.metric},{_g(self.std)},,\n")
        return buf.getvalue()


def _g(x: float) -> str:
    return f"{x:.6g}"


def run_experiment(cfg: ExperimentConfig, graph: WeightedGraph, class_ids: Sequence[int]) -> ExperimentReport:
    """Repetitions of split -> (sample tree) -> predict -> metric.

    ``class_ids`` may be binary (+/-1) for a single task or arbitrary ints,
    in which case every repetition macro-averages over the one-vs-all
    tasks.  Tasks whose positive class is absent from a train split are
    flagged degenerate but still scored.
    """
    n = graph.node_count
    if len(class_ids) != n:
        raise DataError("need one class id per node")
    values = sorted(set(class_ids))
    if values == [-1, 1] or values in ([-1], [1]):
        tasks = [BinaryTask(1, tuple(class_ids))]
    else:
        tasks = one_vs_all(class_ids)

    from .graphs import connected_components

    report = ExperimentReport(cfg, components=len(connected_components(graph)))
    per_rep_means = []
    for rep in range(cfg.repetitions):
        train_ids, test_ids = make_split(n, cfg.train_fraction, _split_rng(cfg.seed, rep))
        if set(train_ids) & set(test_ids):  # pragma: no cover - split contract
            raise DataError("train and test overlap")
        task_values = []
        for task in tasks:
            labels = task.labels
            degenerate = all(labels[i] != 1 for i in train_ids)
            preds, dfrac = _predict_split(cfg, graph, labels, train_ids, test_ids, rep)
            truth = {q: labels[q] for q in test_ids}
            value = evaluate(preds, truth, cfg.metric)
            task_values.append(value)
            report.rows.append(ExperimentRow(
                repetition=rep,
                task=("binary" if len(tasks) == 1 else f"class_{task.positive_class}"),
                value=value,
                default_fraction=dfrac,
                degenerate=degenerate,
            ))
        per_rep_means.append(sum(task_values) / len(task_values))

    report.mean = float(np.mean(per_rep_means))
    report.std = float(np.std(per_rep_means, ddof=1)) if len(per_rep_means) > 1 else 0.0
    return report


def mincut_failure_search(max_leaves: int = 8, light: float = 1e-3, seed: int = 0):
    """Search tiny trees where count-based cut margins mispredict but the
    weighted margin does not.

    Family searched: a hub with one heavy edge to a +1 node and k light
    edges to -1 nodes; counting edges prefers cutting the single heavy
    edge, while weighing them prefers cutting the k light ones.  Returns
    the (tree, labeling, query) triples found.
    """
    from .cuts import cut_margin

    found = []
    for k in range(3, max_leaves + 1):
        # node 0 = hub, node 1 = heavy +1 neighbor, nodes 2..k+1 light -1
        edges = [(0, 1, 1.0)] + [(0, j, light) for j in range(2, k + 2)]
        tree = WeightedTree(k + 2, edges)
        truth = {i: -1 for i in range(k + 2)}
        truth[0] = truth[1] = 1
        state = RevealedState.from_pairs((i, truth[i]) for i in range(1, k + 2))
        weighted = cut_margin(tree, state, 0)
        count_margin = _count_based_margin(tree, state, 0)
        if weighted > 0 > count_margin:
            found.append((tree, truth, 0))
    return found


def _count_based_margin(tree: WeightedTree, state, v: int) -> float:
    """Margin computed on edge counts instead of weights (diagnostic only)."""
    from .cuts import cut_margin

    unit = WeightedTree(tree.node_count, [(a, b, 1.0) for a, b, _ in tree.edges])
    return cut_margin(unit, state, v)
