"""Request handlers shared by the FastAPI app and the CLI.

Each handler turns one request model into one response model; the CLI is a
thin client of this surface (in process, or over HTTP against the app).
"""

from __future__ import annotations

import numpy as np

from ..bounds import BoundGapReport, adversarial_instance, bound_gap_report, cutsize_report
from ..errors import ConfigError, DataError
from ..graphs import (
    RevealedState,
    WeightedGraph,
    as_tree,
    dump_edge_list,
    dump_labels,
    load_binary_labels,
    load_edge_list,
)
from ..harness import (
    ExperimentConfig,
    knn_graph,
    load_feature_csv,
    run_experiment,
)
from ..predict import predict_batch_with_stats, predict_signed, run_online
from ..spanning import sample_tree
from . import models as m


def _load_graph(g: m.GraphIn) -> WeightedGraph:
    return load_edge_list(g.edge_list, signed=g.signed)


def _summary(g: WeightedGraph) -> m.GraphSummary:
    return m.GraphSummary(
        node_count=g.node_count,
        edge_count=g.edge_count,
        signed=g.signed_mode,
        edge_list=dump_edge_list(g),
        id_map=g.id_map(),
    )


def build_graph(req: m.BuildGraphRequest) -> m.GraphSummary:
    if (req.edge_list is None) == (req.features_csv is None):
        raise ConfigError("provide exactly one of edge_list or features_csv")
    if req.edge_list is not None:
        return _summary(load_edge_list(req.edge_list, signed=req.signed))
    X = load_feature_csv(req.features_csv)
    return _summary(knn_graph(X, req.knn_k))


def sample_tree_handler(req: m.SampleTreeRequest) -> m.SampleTreeResponse:
    g = _load_graph(req.graph)
    sample = sample_tree(g, req.kind, req.seed)
    return m.SampleTreeResponse(
        kind=sample.kind,
        seed=sample.seed,
        walk_steps=sample.steps,
        edge_list=dump_edge_list(sample.tree),
    )


def predict(req: m.PredictRequest) -> m.PredictResponse:
    g = _load_graph(req.graph)
    labels = load_binary_labels(req.labels, g)
    if req.test_nodes is None:
        test = [i for i in range(g.node_count) if i not in labels]
    else:
        test = [g.internal_id(tok) for tok in req.test_nodes]
    if not test:
        raise DataError("no test nodes: every node already carries a label")

    defaults = 0
    preds: dict[int, int] = {}
    pieces = _tree_pieces(g, req)
    for tree, originals in pieces:
        back = dict(enumerate(originals))
        fwd = {orig: i for i, orig in back.items()}
        sub_test = [fwd[q] for q in test if q in fwd]
        if not sub_test:
            continue
        sub_labels = {fwd[i]: y for i, y in labels.items() if i in fwd}
        state = RevealedState.from_pairs(sorted(sub_labels.items()))
        if not sub_labels:
            sub_preds = {q: -1 for q in sub_test}
            defaults += len(sub_test)
        elif req.mode == "signed":
            sub_preds = {q: predict_signed(tree, state, q) for q in sub_test}
        else:
            sub_preds, stats = predict_batch_with_stats(tree, state, sub_test)
            defaults += stats["default_count"]
        for q, y in sub_preds.items():
            preds[back[q]] = y

    names = g.original_ids or [str(i) for i in range(g.node_count)]
    return m.PredictResponse(
        predictions={names[q]: y for q, y in preds.items()},
        default_fraction=(defaults / len(test) if req.mode != "signed" else 0.0),
        tree_kind=(req.tree_kind if req.tree_kind is not None else None),
        components=len(pieces),
    )


def _tree_pieces(g, req) -> list:
    """(tree, original ids) per connected component, reduced via the
    requested spanning-tree kind when the input is not already a tree."""
    from ..graphs import connected_components, induced_subgraph

    comps = connected_components(g)
    if len(comps) <= 1:
        subs = [(g, list(range(g.node_count)))]
    else:
        # forests work as-is; cyclic components still need a tree_kind
        subs = [induced_subgraph(g, comp) for comp in comps]
    out = []
    for sub, originals in subs:
        if req.tree_kind is not None:
            tree = sample_tree(sub, req.tree_kind, req.tree_seed).tree
        else:
            tree = as_tree(sub)
        out.append((tree, originals))
    return out


def adversary(req: m.AdversaryRequest) -> m.AdversaryResponse:
    tree = as_tree(_load_graph(req.graph))
    if req.runs == 0:
        inst = adversarial_instance(tree, req.budget, req.seed)
        return m.AdversaryResponse(
            budget=req.budget,
            removed_edges=list(inst.removed_edges),
            labels=dump_labels(dict(enumerate(inst.labeling)), tree),
        )
    rng = np.random.default_rng(req.seed)
    mistakes = []
    removed: tuple[int, ...] = ()
    for _ in range(req.runs):
        inst = adversarial_instance(tree, req.budget, rng)
        removed = inst.removed_edges
        order = rng.permutation(tree.node_count)
        trace = run_online(tree, list(inst.labeling), [int(i) for i in order])
        mistakes.append(trace.mistake_count)
    xi = len(removed)
    return m.AdversaryResponse(
        budget=req.budget,
        removed_edges=list(removed),
        stats=m.AdversaryStats(
            runs=req.runs,
            mean_mistakes=float(np.mean(mistakes)),
            lower_bound=(xi + 1) / 2.0,
            budget_edges=xi,
        ),
    )


def audit(req: m.AuditRequest) -> m.AuditResponse:
    tree = as_tree(_load_graph(req.graph))
    labels = load_binary_labels(req.labels, tree)
    if len(labels) != tree.node_count:
        raise DataError("audit needs a label for every node")
    full = [labels[i] for i in range(tree.node_count)]
    report = cutsize_report(tree, full)
    rng = np.random.default_rng(req.order_seed)
    rows = []
    lines = [BoundGapReport.CSV_HEADER]
    note = ""
    for rep in range(req.repetitions):
        order = [int(i) for i in rng.permutation(tree.node_count)]
        trace = run_online(tree, full, order)
        gap = bound_gap_report(trace, report)
        note = gap.note
        rows.append(m.AuditRow(
            repetition=rep,
            mistakes=gap.mistakes,
            cut_edges=report.cut_edge_count,
            weighted_cutsize=report.weighted_cutsize,
            budget_edges=gap.budget_edge_count,
            lower_proxy=gap.lower_proxy,
            upper_proxy=gap.upper_proxy,
            saturated=gap.saturated,
        ))
        lines.append(gap.csv_row(f"t0r{rep}", tree.node_count, report.cut_edge_count))
    return m.AuditResponse(rows=rows, csv="\n".join(lines) + "\n", note=note)


def experiment(req: m.ExperimentRequest) -> m.ExperimentResponse:
    if (req.graph is None) == (req.features_csv is None):
        raise ConfigError("provide exactly one of graph or features_csv")
    if req.graph is not None:
        g = _load_graph(req.graph)
    else:
        g = knn_graph(load_feature_csv(req.features_csv), req.knn_k)
    raw = {}
    for tok, y in _parse_class_labels(req.labels).items():
        raw[g.internal_id(tok)] = y
    if len(raw) != g.node_count:
        raise DataError("experiments need a label for every node")
    class_ids = [raw[i] for i in range(g.node_count)]
    cfg = ExperimentConfig(
        algorithm=req.algorithm,
        train_fraction=req.train_fraction,
        repetitions=req.repetitions,
        seed=req.seed,
        tree_kind=req.tree_kind,
        committee_size=req.committee_size,
        metric=req.metric,
    )
    report = run_experiment(cfg, g, class_ids)
    return m.ExperimentResponse(csv=report.to_csv(), mean=report.mean, std=report.std)


def _parse_class_labels(text: str) -> dict[str, int]:
    from ..graphs import load_label_file

    return load_label_file(text)
