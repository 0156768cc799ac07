import math
from collections import Counter

import numpy as np
import pytest
from scipy.stats import chisquare

from shazoo import (
    ConfigError,
    Disconnected,
    WeightedGraph,
    WeightedTree,
    dfs_linearize,
    minimum_spanning_tree,
    resistance_distance,
    sample_tree,
    wilson_spanning_tree,
)
from helpers import enumerate_spanning_trees, tree_edge_key


def triangle(w1=1.0, w2=1.0, w3=1.0):
    return WeightedGraph(3, [(0, 1, w1), (1, 2, w2), (0, 2, w3)])


def test_wilson_on_tree_returns_it():
    t = WeightedTree(4, [(0, 1, 1.0), (1, 2, 2.0), (1, 3, 0.5)])
    for kind in (True, False):
        sample = wilson_spanning_tree(t, 0, use_weights=kind)
        assert tree_edge_key(sample.tree) == tree_edge_key(t)
        assert sample.tree.edge_weight(1, 2) == 2.0


def test_wilson_rejects_disconnected():
    g = WeightedGraph(4, [(0, 1, 1.0), (2, 3, 1.0)])
    with pytest.raises(Disconnected):
        wilson_spanning_tree(g, 0)


def test_wilson_spans_and_subsets_source_edges():
    rng = np.random.default_rng(2)
    g = WeightedGraph(6, [(0, 1, 1.0), (1, 2, 2.0), (2, 3, 1.0), (3, 4, 0.5),
                          (4, 5, 1.0), (5, 0, 2.0), (1, 4, 1.0)])
    source = {(min(u, v), max(u, v)) for u, v, _ in g.edges}
    for seed in range(30):
        s = wilson_spanning_tree(g, seed, use_weights=bool(seed % 2))
        assert s.tree.node_count == 6 and s.tree.edge_count == 5
        assert tree_edge_key(s.tree) <= source
        assert s.steps > 0


def test_wilson_weighted_distribution_triangle():
    # weights (2,1,1); leaving out the heavy edge has probability 1/5
    g = triangle(2.0, 1.0, 1.0)
    trees = enumerate_spanning_trees(g)
    weight_of = {t: math.prod(abs(g.edges[e][2]) for e in t) for t in trees}
    total = sum(weight_of.values())
    rng = np.random.default_rng(1234)
    counts = Counter()
    n_samples = 6000
    for _ in range(n_samples):
        s = wilson_spanning_tree(g, rng, use_weights=True)
        key = frozenset(
            next(e for e, (a, b, _) in enumerate(g.edges)
                 if {a, b} == {u, v})
            for u, v, _ in s.tree.edges
        )
        counts[key] += 1
    expected = [n_samples * weight_of[t] / total for t in trees]
    observed = [counts[t] for t in trees]
    assert chisquare(observed, expected).pvalue > 0.001


def test_mst_triangle_example():
    g = triangle(3.0, 2.0, 1.0)
    t = minimum_spanning_tree(g).tree
    kept = {frozenset((u, v)) for u, v, _ in t.edges}
    assert kept == {frozenset((0, 1)), frozenset((1, 2))}  # weights 3 and 2


def test_mst_of_tree_is_itself():
    t = WeightedTree(4, [(0, 1, 1.0), (1, 2, 2.0), (1, 3, 0.5)])
    assert tree_edge_key(minimum_spanning_tree(t).tree) == tree_edge_key(t)


def test_mst_unit_weights_lexicographic():
    g = WeightedGraph(4, [(0, 1, 1.0), (0, 2, 1.0), (0, 3, 1.0),
                          (1, 2, 1.0), (1, 3, 1.0), (2, 3, 1.0)])
    t = minimum_spanning_tree(g).tree
    kept = {frozenset((u, v)) for u, v, _ in t.edges}
    assert kept == {frozenset((0, 1)), frozenset((0, 2)), frozenset((0, 3))}


def test_mst_matches_enumeration_random_graphs():
    rng = np.random.default_rng(9)
    for _ in range(20):
        n = int(rng.integers(3, 6))
        edges = []
        for i in range(1, n):
            j = int(rng.integers(0, i))
            edges.append((j, i, int(rng.integers(1, 257)) / 64.0))
        for u in range(n):
            for v in range(u + 1, n):
                if any({a, b} == {u, v} for a, b, _ in edges):
                    continue
                if rng.random() < 0.5:
                    edges.append((u, v, int(rng.integers(1, 257)) / 64.0))
        g = WeightedGraph(n, edges)
        best = min(
            math.fsum(1.0 / abs(g.edges[e][2]) for e in t)
            for t in enumerate_spanning_trees(g)
        )
        got = minimum_spanning_tree(g).tree
        got_sum = math.fsum(1.0 / abs(w) for _, _, w in got.edges)
        assert got_sum == best


def test_dfs_linearize_path_identity():
    t = WeightedTree(4, [(0, 1, 1.0), (1, 2, 2.0), (2, 3, 0.5)])
    line = dfs_linearize(t, 0)
    assert line.nodes == (0, 1, 2, 3)
    assert line.weights == (1.0, 2.0, 0.5)


def test_dfs_linearize_star_minima():
    w1, w2, w3 = 1.0, 4.0, 2.0
    t = WeightedTree(4, [(0, 1, w1), (0, 2, w2), (0, 3, w3)])
    line = dfs_linearize(t, 0)
    assert line.nodes == (0, 1, 2, 3)
    assert line.weights == (w1, min(w1, w2), min(w2, w3))


def test_dfs_linearize_two_nodes():
    t = WeightedTree(2, [(0, 1, 3.0)])
    line = dfs_linearize(t, 0)
    assert line.nodes == (0, 1) and line.weights == (3.0,)


def test_dfs_linearize_hop_resistance_bounds():
    rng = np.random.default_rng(15)
    from helpers import POW2_WEIGHTS, prufer_tree

    for _ in range(15):
        n = int(rng.integers(3, 9))
        seq = [int(rng.integers(0, n)) for _ in range(n - 2)]
        ws = [POW2_WEIGHTS[int(rng.integers(0, 5))] for _ in range(n - 1)]
        t = prufer_tree(n, seq, ws)
        line = dfs_linearize(t, 0)
        assert len(line.nodes) == n and len(line.weights) == n - 1
        diameter = max(resistance_distance(t, i, j) for i in range(n) for j in range(n))
        for (u, v), w in zip(zip(line.nodes, line.nodes[1:]), line.weights):
            path = t.path(u, v)
            max_edge_res = max(1.0 / abs(t.edge_weight(a, b)) for a, b in zip(path, path[1:]))
            assert 1.0 / w == max_edge_res  # min weight <-> max single-edge resistance
            assert 1.0 / w <= diameter + 1e-12


def test_sample_tree_dispatch():
    g = triangle()
    assert sample_tree(g, "mst").kind == "mst"
    assert sample_tree(g, "rst", 1).kind == "rst"
    assert sample_tree(g, "nwrst", 1).kind == "nwrst"
    with pytest.raises(ConfigError):
        sample_tree(g, "rst")  # missing seed
    with pytest.raises(ConfigError):
        sample_tree(g, "bogus", 1)


def test_sampling_deterministic_given_seed():
    g = WeightedGraph(5, [(0, 1, 1.0), (1, 2, 2.0), (2, 3, 1.0), (3, 4, 1.0),
                          (4, 0, 2.0), (1, 3, 0.5)])
    a = wilson_spanning_tree(g, 99).tree
    b = wilson_spanning_tree(g, 99).tree
    assert tree_edge_key(a) == tree_edge_key(b)


def test_signed_graph_sampled_on_magnitudes():
    g = WeightedGraph(3, [(0, 1, -2.0), (1, 2, 1.0), (0, 2, -1.0)], signed_mode=True)
    s = wilson_spanning_tree(g, 5)
    assert s.tree.signed_mode
    # original (negative) weights are preserved on the output tree
    for u, v, w in s.tree.edges:
        assert g.edge_weight(u, v) == w


def test_wilson_matches_matrix_tree_on_sampled_small_graphs():
    # representative <=5-node graphs; the full sweep over all 771 connected
    # graphs at 30k draws apiece is out of unit-test budget (the acceptance
    # suite pins the three canonical cases)
    rng_global = np.random.default_rng(314)
    cases = [
        WeightedGraph(4, [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (3, 0, 1.0), (0, 2, 1.0)]),
        WeightedGraph(4, [(0, 1, 2.0), (1, 2, 1.0), (2, 3, 0.5), (3, 0, 1.0)]),
        WeightedGraph(5, [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (3, 4, 1.0),
                          (4, 0, 1.0), (1, 3, 2.0)]),
    ]
    for i, g in enumerate(cases):
        trees = enumerate_spanning_trees(g)
        weight_of = {t: math.prod(abs(g.edges[e][2]) for e in t) for t in trees}
        total = sum(weight_of.values())
        rng = np.random.default_rng(1000 + i)
        counts = {t: 0 for t in trees}
        n_samples = 30_000
        for _ in range(n_samples):
            s = wilson_spanning_tree(g, rng, use_weights=True)
            key = frozenset(
                next(e for e, (a, b, _) in enumerate(g.edges) if {a, b} == {u, v})
                for u, v, _ in s.tree.edges
            )
            counts[key] += 1
        from scipy.stats import chisquare
        observed = [counts[t] for t in trees]
        expected = [n_samples * weight_of[t] / total for t in trees]
        assert chisquare(observed, expected).pvalue > 0.001
