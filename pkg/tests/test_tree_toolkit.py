from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from planarsep.congest_engine import SimConfig
from planarsep.errors import CrossPartQuery, NodeNotInPart
from planarsep.planar_core import Partition, components, grid, quadrant_partition, random_triangulation
from planarsep.tree_toolkit import RunEnv, boruvka, build_part_trees, lca, reroot, tree_of_graph

from corpus import plane_trees, seq_depths, seq_orient
from subroutine_checks import check_tree, random_fixture


@pytest.mark.parametrize("n", range(1, 6))
@pytest.mark.parametrize("mode", ["literal", "charged"])
def test_every_small_plane_tree(n, mode):
    for g, parent, r0 in plane_trees(n, seed=1):
        assert check_tree(g, parent, r0, random.Random(n), mode=mode) == []


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 100_000))
def test_random_spanning_trees(i):
    g, parent, r0, rng = random_fixture(i)
    assert check_tree(g, parent, r0, rng, pairs=8) == []


@pytest.mark.parametrize("g", [grid(8), random_triangulation(120, seed=7)], ids=repr)
def test_part_trees_span_their_parts(g):
    part = quadrant_partition(g)
    trees = build_part_trees(g, part)
    assert set(trees) == set(part.parts)
    for pid, t in trees.items():
        assert sorted(t.glob) == sorted(part.parts[pid])
        for v in range(t.n):
            p = t.parent[v]
            if p >= 0:
                assert g.has_edge(t.glob[v], t.glob[p])
        assert t.depth == seq_depths(t.parent)


def test_single_tree_is_rooted_at_the_anchor():
    g = random_triangulation(50, seed=3)
    t = tree_of_graph(g)
    assert t.glob[t.root] == g.anchor
    assert t.r0_after is not None and t.glob[t.r0_after] == g.outer[0]


def test_boruvka_with_zero_weights_spans_each_component():
    g = grid(6)
    members = [v for v in g.nodes if v % 6 != 2]
    adj, frag = boruvka(g, members, lambda a, b: 0, RunEnv(n_budget=g.n), stop_at_one=False)
    comps = components(g, members)
    assert len({frag[v] for v in members}) == len(comps)
    for comp in comps:
        assert len({frag[v] for v in comp}) == 1
        assert sum(len(adj[v]) for v in comp) == 2 * (len(comp) - 1)


def test_boruvka_stops_at_heavy_edges():
    g = grid(4)
    part = quadrant_partition(g)
    _, frag = boruvka(g, list(g.nodes), lambda a, b: 0 if part.part_of[a] == part.part_of[b] else 1, RunEnv(n_budget=g.n), stop_at_one=True)
    for vs in part.parts.values():
        assert len({frag[v] for v in vs}) == 1
    assert len({frag[v] for v in g.nodes}) == 4


def test_literal_and_charged_trees_agree():
    g = random_triangulation(40, seed=2)
    a = tree_of_graph(g, RunEnv(cfg=SimConfig(mode="literal"), n_budget=g.n))
    b = tree_of_graph(g, RunEnv(cfg=SimConfig(mode="charged"), n_budget=g.n))
    assert (a.parent, a.pil, a.pir, a.size) == (b.parent, b.pil, b.pir, b.size)


def test_reroot_without_orders_keeps_edges():
    t = tree_of_graph(random_triangulation(30, seed=5))
    adj = [[] for _ in range(t.n)]
    for v in range(t.n):
        if t.parent[v] >= 0:
            adj[v].append(t.parent[v])
            adj[t.parent[v]].append(v)
    t2 = reroot(t, 17, orders=False)
    assert t2.parent == seq_orient(adj, 17)
    assert t2.depth == seq_depths(t2.parent)
    assert t2.pil is None


def test_queries_reject_foreign_nodes():
    t = tree_of_graph(grid(3))
    with pytest.raises(CrossPartQuery):
        lca(t, 0, 99)
    with pytest.raises(NodeNotInPart):
        reroot(t, -1)


def test_partition_labels_below_zero_are_skipped():
    g = grid(4)
    labels = [0 if v < 8 else -1 for v in g.nodes]
    trees = build_part_trees(g, Partition(labels), members=[v for v in g.nodes if v < 8])
    assert list(trees) == [0]
    assert sorted(trees[0].glob) == list(range(8))
