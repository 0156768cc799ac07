import itertools
import math

import numpy as np
import pytest

from shazoo import (
    ConfigError,
    DataError,
    WeightedTree,
    adversarial_instance,
    bound_gap_report,
    cutsize_report,
    max_edges_within_budget,
    resistance_diameter,
    run_online,
)
from helpers import DYADIC_EIGHTHS, prufer_tree


def unit_path(n):
    return WeightedTree(n, [(i, i + 1, 1.0) for i in range(n - 1)])


def test_budget_count_examples():
    t = WeightedTree(4, [(0, 1, 1.0), (1, 2, 2.0), (2, 3, 3.0)])
    assert max_edges_within_budget(t, 3.0) == 2
    assert max_edges_within_budget(t, 0.0) == 0
    assert max_edges_within_budget(t, 6.0) == 3
    with pytest.raises(ConfigError):
        max_edges_within_budget(t, -1.0)


def test_budget_count_matches_exhaustive():
    rng = np.random.default_rng(6)
    for _ in range(12):
        n = int(rng.integers(3, 14))  # up to 12 edges
        ws = [DYADIC_EIGHTHS[int(rng.integers(0, 32))] for _ in range(n - 1)]
        seq = [int(rng.integers(0, n)) for _ in range(max(n - 2, 0))]
        t = prufer_tree(n, seq, ws)
        weights = [abs(w) for _, _, w in t.edges]
        for _ in range(50):
            budget = float(rng.uniform(0, sum(weights) * 1.1))
            best = 0
            for r in range(len(weights) + 1):
                if any(sum(c) <= budget for c in itertools.combinations(weights, r)):
                    best = r
            assert max_edges_within_budget(t, budget) == best


def test_budget_count_nondecreasing():
    rng = np.random.default_rng(14)
    t = prufer_tree(9, [3, 3, 1, 0, 5, 2, 2], [DYADIC_EIGHTHS[int(rng.integers(0, 32))] for _ in range(8)])
    grid = np.linspace(0, 12, 60)
    vals = [max_edges_within_budget(t, float(m)) for m in grid]
    assert all(a <= b for a, b in zip(vals, vals[1:]))


def test_cutsize_report_examples():
    t = WeightedTree(3, [(0, 1, 1.0), (1, 2, 2.0)])
    const = cutsize_report(t, [1, 1, 1])
    assert const.cut_edge_count == 0 and const.weighted_cutsize == 0.0
    assert const.budget_edge_count == 0

    r = cutsize_report(t, [1, 1, -1])
    assert r.cut_edge_count == 1 and r.weighted_cutsize == 2.0
    assert r.budget_edge_count == 1  # lightest subset within 2.0 is {1.0} or {2.0}

    n = 6
    p = unit_path(n)
    alt = cutsize_report(p, [(-1) ** i for i in range(n)])
    assert alt.cut_edge_count == n - 1 and alt.weighted_cutsize == float(n - 1)
    assert alt.budget_edge_count == n - 1


def test_cutsize_report_signed_counts_frustration():
    t = WeightedTree(2, [(0, 1, -2.0)], signed_mode=True)
    same = cutsize_report(t, [1, 1])
    assert same.cut_edge_count == 1 and same.weighted_cutsize == 2.0
    diff = cutsize_report(t, [1, -1])
    assert diff.cut_edge_count == 0


def test_cutsize_report_rejects_partial():
    t = unit_path(3)
    with pytest.raises(DataError):
        cutsize_report(t, {0: 1, 1: 1})


def test_budget_edge_count_dominates_raw_count():
    rng = np.random.default_rng(21)
    for _ in range(20):
        n = int(rng.integers(2, 10))
        ws = [DYADIC_EIGHTHS[int(rng.integers(0, 32))] for _ in range(n - 1)]
        seq = [int(rng.integers(0, n)) for _ in range(max(n - 2, 0))]
        t = prufer_tree(n, seq, ws)
        labeling = [1 if rng.integers(2) else -1 for _ in range(n)]
        r = cutsize_report(t, labeling)
        assert r.budget_edge_count >= r.cut_edge_count


def test_resistance_diameter():
    t = WeightedTree(4, [(0, 1, 1.0), (1, 2, 2.0), (1, 3, 0.25)])
    # farthest pair is 3 <-> 0: 4 + 1
    assert resistance_diameter(t) == 5.0
    assert resistance_diameter(WeightedTree(1, [])) == 0.0


def test_adversarial_instance_unit_path():
    t = unit_path(4)
    inst = adversarial_instance(t, 2.0, 0)
    assert len(inst.removed_edges) == 2
    r = cutsize_report(t, list(inst.labeling))
    assert r.weighted_cutsize <= 2.0


def test_adversarial_instance_zero_budget():
    t = unit_path(5)
    inst = adversarial_instance(t, 0.0, 3)
    assert inst.removed_edges == ()
    assert len(set(inst.labeling)) == 1  # one component, constant labeling


def test_adversarial_per_component_constancy():
    rng = np.random.default_rng(10)
    t = prufer_tree(9, [0, 2, 2, 4, 4, 6, 6],
                    [DYADIC_EIGHTHS[int(rng.integers(0, 32))] for _ in range(8)])
    for seed in range(10):
        inst = adversarial_instance(t, 1.0, seed)
        removed = set(inst.removed_edges)
        # walk the kept edges: endpoints must agree
        for e, (u, v, _) in enumerate(t.edges):
            if e not in removed:
                assert inst.labeling[u] == inst.labeling[v]
        assert cutsize_report(t, list(inst.labeling)).weighted_cutsize <= 1.0


def test_adversary_forces_expected_mistakes_quick():
    # small-scale version of the lower-bound statistic
    t = unit_path(8)
    budget = 3.0
    xi = max_edges_within_budget(t, budget)
    rng = np.random.default_rng(77)
    runs = 400
    total = 0
    for _ in range(runs):
        inst = adversarial_instance(t, budget, rng)
        order = [int(i) for i in rng.permutation(t.node_count)]
        total += run_online(t, list(inst.labeling), order).mistake_count
    mean = total / runs
    sigma = math.sqrt((xi + 1) / 4.0 / runs)
    assert mean >= (xi + 1) / 2.0 - 3.0 * sigma


def test_bound_gap_report_shapes():
    t = unit_path(6)
    labeling = [1, 1, 1, -1, -1, -1]
    trace = run_online(t, labeling, list(range(6)))
    rep = cutsize_report(t, labeling)
    gap = bound_gap_report(trace, rep)
    assert gap.lower_proxy == rep.budget_edge_count / 2.0
    expect_upper = rep.budget_edge_count * (1.0 + math.log1p(rep.weighted_cutsize * rep.resistance_diameter))
    assert gap.upper_proxy == expect_upper
    assert "PROXY" in gap.note
    assert not gap.saturated

    alt = [(-1) ** i for i in range(6)]
    trace2 = run_online(t, alt, list(range(6)))
    gap2 = bound_gap_report(trace2, cutsize_report(t, alt))
    assert gap2.saturated  # every edge is cut: budget count == n-1

    const = [1] * 6
    gap3 = bound_gap_report(run_online(t, const, list(range(6))), cutsize_report(t, const))
    assert gap3.lower_proxy == 0.0 and gap3.mistakes <= 1


def test_csv_row_format():
    t = unit_path(4)
    labeling = [1, 1, -1, -1]
    trace = run_online(t, labeling, [0, 1, 2, 3])
    rep = cutsize_report(t, labeling)
    gap = bound_gap_report(trace, rep)
    row = gap.csv_row("tree0", 4, rep.cut_edge_count)
    assert row.startswith("tree0,4,1,")
    assert len(row.split(",")) == len(gap.CSV_HEADER.split(","))
