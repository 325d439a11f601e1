from __future__ import annotations

import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from planarsep.congest_engine import SimConfig
from planarsep.dfs_builder import PartialDfsTree, build_dfs, phase_bound
from planarsep.errors import Disconnected
from planarsep.oracle_verify import check_dfs_tree
from planarsep.planar_core import build_graph, cycle, grid, k4, path, random_planar, random_tree, random_triangulation, star, wheel


def assert_dfs(g, root, res):
    assert res.root == root
    assert res.parent[root] == -1
    assert check_dfs_tree(g, res.parent, root)
    assert res.phases <= phase_bound(g.n)
    assert all(d >= 0 for d in res.depth)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 100_000))
def test_random_graphs_any_root(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 90)
    kind = rng.randrange(3)
    if kind == 0 and n >= 4:
        g = random_triangulation(n, seed=seed)
    elif kind == 1 and n >= 2:
        g = random_planar(n, rng.randint(n - 1, max(n - 1, 2 * n - 4)), seed=seed)
    else:
        g = random_tree(n, seed=seed)
    root = rng.randrange(g.n)
    assert_dfs(g, root, build_dfs(g, root))


@pytest.mark.parametrize("g", [path(1), path(2), star(8), cycle(9), wheel(7), k4(), grid(5)], ids=repr)
def test_every_root_of_small_graphs(g):
    for root in g.nodes:
        assert_dfs(g, root, build_dfs(g, root))


def test_each_phase_shrinks_components_by_a_third():
    g = random_triangulation(300, seed=2)
    res = build_dfs(g, 5)
    assert res.ledger[0].largest == g.n - 1
    for a, b in zip(res.ledger, res.ledger[1:]):
        assert 3 * b.largest <= 2 * a.largest
    # every node but the root joins in exactly one phase
    joined = sum(sum(1 for p in res.phase if p == j.phase) for j in res.ledger)
    assert joined == g.n - 1


def test_phase_labels_follow_the_ledger():
    g = grid(10)
    res = build_dfs(g, 0)
    for j in res.ledger:
        assert all(res.phase[v] == j.phase for v in j.marked)
    assert res.phase[0] == 0


def test_phase_bound_values():
    assert phase_bound(1) == 1
    assert phase_bound(2) == 3
    for n in (3, 10, 100, 4096):
        assert phase_bound(n) == math.ceil(math.log(n, 1.5)) + 1


def test_literal_and_charged_trees_agree():
    g = random_planar(50, 70, seed=4)
    a = build_dfs(g, 3, cfg=SimConfig(mode="literal"))
    b = build_dfs(g, 3, cfg=SimConfig(mode="charged"))
    assert a.to_json() == b.to_json()
    assert a.report.rounds_literal > 0 and b.report.rounds_literal == 0


def test_output_is_stable_json():
    g = random_triangulation(40, seed=9)
    assert build_dfs(g, 0).to_json() == build_dfs(g, 0).to_json()
    assert set(build_dfs(g, 0).to_dict()) == {"root", "parent", "depth", "phase"}


def test_disconnected_graph_is_refused():
    g = build_graph(4, [[1], [0], [3], [2]], (0, 1))
    with pytest.raises(Disconnected):
        build_dfs(g, 0)
    with pytest.raises(ValueError):
        build_dfs(path(3), 7)


def test_partial_tree_attach_rules():
    t = PartialDfsTree(5, 0)
    t.attach([1, 2], 0, 1)
    assert t.depth[:3] == [0, 1, 2] and t.size == 3
    with pytest.raises(ValueError):
        t.attach([3], 4, 2)
    with pytest.raises(ValueError):
        t.attach([2], 0, 2)
