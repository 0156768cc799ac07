import math

import pytest
from fastapi.testclient import TestClient

from shazoo.service.app import app

PATH = "a\tb\t1.0\nb\tc\t2.0\n"
SQUARE = "0 1 1\n1 2 1\n2 3 1\n3 0 1\n"


@pytest.fixture(scope="module")
def client():
    with TestClient(app) as c:
        yield c


def test_health(client):
    body = client.get("/health").json()
    assert body["status"] == "ok"


def test_build_graph_from_edges(client):
    r = client.post("/graph/build", json={"edge_list": PATH})
    assert r.status_code == 200
    body = r.json()
    assert body["node_count"] == 3 and body["edge_count"] == 2
    assert body["id_map"] == {"a": 0, "b": 1, "c": 2}


def test_build_graph_from_features(client):
    r = client.post("/graph/build", json={"features_csv": "0\n1\n3\n", "knn_k": 1})
    assert r.status_code == 200
    body = r.json()
    assert body["node_count"] == 3 and body["edge_count"] == 2


def test_build_graph_needs_exactly_one_source(client):
    r = client.post("/graph/build", json={})
    assert r.status_code == 422
    r = client.post("/graph/build", json={"edge_list": PATH, "features_csv": "0\n1\n"})
    assert r.status_code == 422


def test_data_errors_are_400(client):
    r = client.post("/graph/build", json={"edge_list": "0 1 1.0\n0 1 2.0\n"})
    assert r.status_code == 400
    assert r.json()["kind"] == "data"


def test_sample_tree_endpoint(client):
    r = client.post("/tree/sample", json={"graph": {"edge_list": SQUARE}, "kind": "rst", "seed": 4})
    assert r.status_code == 200
    body = r.json()
    assert body["kind"] == "rst" and body["walk_steps"] >= 0
    assert len(body["edge_list"].strip().splitlines()) == 3  # spanning tree of 4 nodes


def test_sample_tree_deterministic(client):
    req = {"graph": {"edge_list": SQUARE}, "kind": "nwrst", "seed": 9}
    a = client.post("/tree/sample", json=req).json()
    b = client.post("/tree/sample", json=req).json()
    assert a["edge_list"] == b["edge_list"]


def test_predict_batch_endpoint(client):
    r = client.post("/predict", json={"graph": {"edge_list": PATH}, "labels": "a\t+1\nc\t-1\n"})
    assert r.status_code == 200
    body = r.json()
    assert body["predictions"] == {"b": -1}
    assert body["default_fraction"] == 0.0


def test_predict_with_tree_reduction(client):
    r = client.post("/predict", json={
        "graph": {"edge_list": SQUARE},
        "labels": "0\t+1\n2\t-1\n",
        "tree_kind": "mst",
    })
    assert r.status_code == 200
    assert set(r.json()["predictions"]) == {"1", "3"}


def test_predict_signed_endpoint(client):
    r = client.post("/predict", json={
        "graph": {"edge_list": "a\tb\t-1.0\n", "signed": True},
        "labels": "a\t+1\n",
        "mode": "signed",
    })
    assert r.status_code == 200
    assert r.json()["predictions"] == {"b": -1}


def test_predict_rejects_cyclic_without_reduction(client):
    r = client.post("/predict", json={"graph": {"edge_list": SQUARE}, "labels": "0\t+1\n"})
    assert r.status_code == 400


def test_adversary_instance(client):
    r = client.post("/adversary", json={"graph": {"edge_list": "0 1 1\n1 2 1\n2 3 1\n"},
                                        "budget": 2.0, "seed": 1})
    assert r.status_code == 200
    body = r.json()
    assert len(body["removed_edges"]) == 2
    assert body["labels"].count("\n") == 4


def test_adversary_stats(client):
    r = client.post("/adversary", json={"graph": {"edge_list": "0 1 1\n1 2 1\n2 3 1\n"},
                                        "budget": 3.0, "seed": 2, "runs": 60})
    stats = r.json()["stats"]
    assert stats["runs"] == 60
    assert stats["budget_edges"] == 3
    assert stats["mean_mistakes"] >= stats["lower_bound"] - 3 * math.sqrt(4 / 4 / 60)


def test_audit_endpoint(client):
    r = client.post("/audit", json={
        "graph": {"edge_list": "0 1 1\n1 2 1\n2 3 1\n"},
        "labels": "0\t1\n1\t1\n2\t-1\n3\t-1\n",
        "repetitions": 3,
    })
    assert r.status_code == 200
    body = r.json()
    assert len(body["rows"]) == 3
    assert body["csv"].splitlines()[0] == (
        "tree_id,n,cut_edges,weighted_cutsize,budget_edges,mistakes,"
        "lower_proxy,upper_proxy"
    )
    assert "PROXY" in body["note"]


def test_experiment_endpoint(client):
    edge_lines = []
    for i in range(29):
        edge_lines.append(f"{i} {i + 1} {1.0 if i != 14 else 0.05}")
    labels = "\n".join(f"{i}\t{1 if i <= 14 else -1}" for i in range(30))
    r = client.post("/experiment/run", json={
        "graph": {"edge_list": "\n".join(edge_lines)},
        "labels": labels,
        "algorithm": "shazoo",
        "tree_kind": "mst",
        "train_fraction": 0.2,
        "repetitions": 3,
        "seed": 5,
    })
    assert r.status_code == 200
    body = r.json()
    assert 0.0 <= body["mean"] <= 1.0
    assert "repetition,task,metric" in body["csv"]


def test_experiment_config_error_is_422(client):
    r = client.post("/experiment/run", json={
        "graph": {"edge_list": PATH},
        "labels": "a\t1\nb\t1\nc\t-1\n",
        "train_fraction": 0.9,
        "repetitions": 0,
    })
    assert r.status_code == 422


def test_predict_disconnected_graph_per_component(client):
    two = "0 1 1.0\n2 3 1.0\n"
    r = client.post("/predict", json={
        "graph": {"edge_list": two},
        "labels": "0\t+1\n2\t-1\n",
        "tree_kind": "mst",
    })
    assert r.status_code == 200
    body = r.json()
    assert body["components"] == 2
    assert body["predictions"] == {"1": 1, "3": -1}
    # a forest needs no reduction: each component is already a tree
    r = client.post("/predict", json={"graph": {"edge_list": two}, "labels": "0\t+1\n"})
    assert r.status_code == 200
    assert r.json()["predictions"] == {"1": 1, "2": -1, "3": -1}
    # a disconnected graph with a cyclic component still needs a tree_kind
    r = client.post("/predict", json={
        "graph": {"edge_list": "0 1 1\n1 2 1\n0 2 1\n3 4 1\n"},
        "labels": "0\t+1\n",
    })
    assert r.status_code == 400
