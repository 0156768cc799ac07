"""Command-line interface: a thin client over the service handlers.

Every subcommand builds the same request model the REST endpoints accept
and dispatches it either in process (default) or to a running service via
``--server URL``.  Inputs come from files; outputs go to stdout or --out.

Exit codes: 0 ok, 1 data error (bad files or graph invariants), 2 config
error (bad flags or parameters).
"""

from __future__ import annotations

import functools
import sys
from pathlib import Path

import click

from .errors import ConfigError, DataError
from .service import handlers
from .service import models as m


def _friendly(fn):
    """Map package errors to the documented exit codes (1 data, 2 config)."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except ConfigError as exc:
            click.echo(f"config error: {exc}", err=True)
            sys.exit(2)
        except DataError as exc:
            click.echo(f"data error: {exc}", err=True)
            sys.exit(1)

    return wrapper

_ENDPOINTS = {
    "build_graph": "/graph/build",
    "sample_tree_handler": "/tree/sample",
    "predict": "/predict",
    "adversary": "/adversary",
    "audit": "/audit",
    "experiment": "/experiment/run",
}


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc


def _dispatch(ctx_obj, handler_name: str, request, response_model):
    server = ctx_obj.get("server")
    if server is None:
        return getattr(handlers, handler_name)(request)
    client = ctx_obj.get("client")
    if client is None:
        import httpx

        client = httpx.Client(base_url=server)
        ctx_obj["client"] = client
    resp = client.post(_ENDPOINTS[handler_name], json=request.model_dump())
    if resp.status_code != 200:
        try:
            body = resp.json()
        except ValueError:
            body = {"error": resp.text, "kind": "data"}
        err = ConfigError if body.get("kind") == "config" else DataError
        raise err(body.get("error", f"HTTP {resp.status_code}"))
    return response_model.model_validate(resp.json())


def _emit(ctx_obj, text: str):
    out = ctx_obj.get("out")
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        click.echo(text, nl=not text.endswith("\n"))


def _run(ctx, handler_name, request, response_model, to_text):
    obj = ctx.obj
    resp = _dispatch(obj, handler_name, request, response_model)
    if obj.get("format") == "json":
        _emit(obj, resp.model_dump_json(indent=2) + "\n")
    else:
        _emit(obj, to_text(resp))



def _out_option(fn):
    """Per-subcommand --out, overriding the group-level default."""
    return click.option("--out", "out_path", default=None, type=click.Path(),
                        help="write output to a file")(fn)

@click.group()
@click.option("--seed", type=int, default=0, show_default=True, help="global RNG seed")
@click.option("--signed", is_flag=True, help="treat inputs as signed graphs")
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text",
              show_default=True, help="output format")
@click.option("--server", default=None, metavar="URL",
              help="dispatch to a running service instead of in-process")
@click.option("--out", default=None, type=click.Path(), help="write output to a file")
@click.pass_context
def main(ctx, seed, signed, fmt, server, out):
    """Node-label prediction on weighted trees and graphs."""
    ctx.obj = {"seed": seed, "signed": signed, "format": fmt, "server": server, "out": out}


@main.command("build-graph")
@click.option("--edges", type=click.Path(), help="edge-list file to validate/normalize")
@click.option("--features", type=click.Path(), help="feature CSV to turn into a kNN graph")
@click.option("--knn", type=int, default=10, show_default=True, help="neighbors per node")
@click.option("--id-map-out", type=click.Path(), default=None,
              help="also write the external-to-internal id map (TSV)")
@_out_option
@click.pass_context
@_friendly
def build_graph(ctx, edges, features, knn, id_map_out, out_path):
    if out_path:
        ctx.obj["out"] = out_path
    """Validate an edge list or build a Gaussian-weighted kNN graph."""
    req = m.BuildGraphRequest(
        edge_list=_read_opt(edges),
        features_csv=_read_opt(features),
        knn_k=knn,
        signed=ctx.obj["signed"],
    )

    def to_text(r: m.GraphSummary) -> str:
        if id_map_out:
            lines = [f"{tok}\t{i}" for tok, i in r.id_map.items()]
            Path(id_map_out).write_text("\n".join(lines) + "\n", encoding="utf-8")
        return r.edge_list

    _run(ctx, "build_graph", req, m.GraphSummary, to_text)


def _read_opt(path):
    return _read(path) if path else None


@main.command("sample-tree")
@click.option("--edges", type=click.Path(), required=True)
@click.option("--kind", type=click.Choice(["rst", "nwrst", "mst"]), default="rst",
              show_default=True)
@_out_option
@click.pass_context
@_friendly
def sample_tree(ctx, edges, kind, out_path):
    if out_path:
        ctx.obj["out"] = out_path
    """Extract a spanning tree (random, unweighted-random, or minimum)."""
    req = m.SampleTreeRequest(
        graph=m.GraphIn(edge_list=_read(edges), signed=ctx.obj["signed"]),
        kind=kind,
        seed=ctx.obj["seed"],
    )
    _run(ctx, "sample_tree_handler", req, m.SampleTreeResponse, lambda r: r.edge_list)


@main.command("predict")
@click.option("--edges", type=click.Path(), required=True, help="tree or graph edge list")
@click.option("--labels", type=click.Path(), required=True, help="training labels")
@click.option("--test", type=click.Path(), default=None,
              help="file of node ids to predict (default: all unlabeled)")
@click.option("--mode", type=click.Choice(["batch", "signed"]), default="batch",
              show_default=True)
@click.option("--tree-kind", type=click.Choice(["rst", "nwrst", "mst"]), default=None,
              help="reduce a general graph through this spanning tree first")
@_out_option
@click.pass_context
@_friendly
def predict(ctx, edges, labels, test, mode, tree_kind, out_path):
    if out_path:
        ctx.obj["out"] = out_path
    """Predict +/-1 labels for test nodes from the training labels."""
    test_nodes = None
    if test:
        test_nodes = [
            line.strip() for line in _read(test).splitlines()
            if line.strip() and not line.startswith("#")
        ]
    req = m.PredictRequest(
        graph=m.GraphIn(edge_list=_read(edges), signed=ctx.obj["signed"]),
        labels=_read(labels),
        test_nodes=test_nodes,
        mode=mode,
        tree_kind=tree_kind,
        tree_seed=ctx.obj["seed"],
    )

    def to_text(r: m.PredictResponse) -> str:
        lines = [f"{tok}\t{y:+d}" for tok, y in sorted(r.predictions.items())]
        return "\n".join(lines) + "\n"

    _run(ctx, "predict", req, m.PredictResponse, to_text)


@main.command("adversary")
@click.option("--edges", type=click.Path(), required=True, help="tree edge list")
@click.option("--budget", type=float, required=True, help="weighted-cutsize budget")
@click.option("--runs", type=int, default=0, show_default=True,
              help="online runs to score; 0 emits a single labeling")
@_out_option
@click.pass_context
@_friendly
def adversary(ctx, edges, budget, runs, out_path):
    if out_path:
        ctx.obj["out"] = out_path
    """Generate hard labelings whose weighted cutsize fits a budget."""
    req = m.AdversaryRequest(
        graph=m.GraphIn(edge_list=_read(edges), signed=ctx.obj["signed"]),
        budget=budget,
        seed=ctx.obj["seed"],
        runs=runs,
    )

    def to_text(r: m.AdversaryResponse) -> str:
        if r.stats is None:
            return r.labels or ""
        s = r.stats
        return (
            "runs,mean_mistakes,lower_bound,budget_edges\n"
            f"{s.runs},{s.mean_mistakes:.6g},{s.lower_bound:.6g},{s.budget_edges}\n"
        )

    _run(ctx, "adversary", req, m.AdversaryResponse, to_text)


@main.command("audit")
@click.option("--edges", type=click.Path(), required=True, help="tree edge list")
@click.option("--labels", type=click.Path(), required=True, help="full labeling")
@click.option("--repetitions", type=int, default=1, show_default=True)
@_out_option
@click.pass_context
@_friendly
def audit(ctx, edges, labels, repetitions, out_path):
    if out_path:
        ctx.obj["out"] = out_path
    """Run online prediction and frame its mistakes with the theory proxies."""
    req = m.AuditRequest(
        graph=m.GraphIn(edge_list=_read(edges), signed=ctx.obj["signed"]),
        labels=_read(labels),
        order_seed=ctx.obj["seed"],
        repetitions=repetitions,
    )
    _run(ctx, "audit", req, m.AuditResponse, lambda r: r.csv)


@main.command("run")
@click.option("--edges", type=click.Path(), default=None, help="graph edge list")
@click.option("--features", type=click.Path(), default=None, help="feature CSV")
@click.option("--knn", type=int, default=10, show_default=True)
@click.option("--labels", type=click.Path(), required=True,
              help="labels: +/-1 for a binary task, class ids for one-vs-all")
@click.option("--algorithm", default="shazoo", show_default=True,
              type=click.Choice(["shazoo", "wta", "omv", "labprop", "k*shazoo", "k*wta"]))
@click.option("--tree-kind", type=click.Choice(["rst", "nwrst", "mst"]), default="mst",
              show_default=True)
@click.option("--train-fraction", type=float, default=0.1, show_default=True)
@click.option("--repetitions", type=int, default=10, show_default=True)
@click.option("--k", "committee_size", type=int, default=11, show_default=True,
              help="committee size for k* algorithms")
@click.option("--metric", type=click.Choice(["error_rate", "f_measure"]),
              default="error_rate", show_default=True)
@_out_option
@click.pass_context
@_friendly
def run(ctx, edges, features, knn, labels, algorithm, tree_kind, train_fraction,
        repetitions, committee_size, metric, out_path):
    if out_path:
        ctx.obj["out"] = out_path
    """Full experiment: repeated splits, prediction, and a CSV report."""
    req = m.ExperimentRequest(
        graph=(m.GraphIn(edge_list=_read(edges), signed=ctx.obj["signed"])
               if edges else None),
        features_csv=_read_opt(features),
        knn_k=knn,
        labels=_read(labels),
        algorithm=algorithm,
        tree_kind=tree_kind,
        train_fraction=train_fraction,
        repetitions=repetitions,
        seed=ctx.obj["seed"],
        committee_size=committee_size,
        metric=metric,
    )
    _run(ctx, "experiment", req, m.ExperimentResponse, lambda r: r.csv)


if __name__ == "__main__":
    main()
