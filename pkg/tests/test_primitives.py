from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from planarsep.congest_engine import CostMeter, SimConfig
from planarsep.errors import MultipleSources, NodeNotInPart
from planarsep.planar_core import grid, quadrant_partition, random_planar, random_triangulation
from planarsep.primitives import (
    PartContext,
    ancestor_sum,
    broadcast_within_part,
    check_single_sources,
    decode,
    descendant_sum,
    encode,
    find_extreme,
    find_in_range,
    neighbor_exchange,
    orient_forest,
    partwise_aggregate,
)

from corpus import seq_ancestors


def part_bfs_parents(g, part_of):
    """BFS tree of every part rooted at its smallest node."""
    parent = [-1] * g.n
    for p in sorted(set(part_of)):
        if p < 0:
            continue
        nodes = [v for v in g.nodes if part_of[v] == p]
        seen = {nodes[0]}
        queue = [nodes[0]]
        for x in queue:
            for y in g.rotations[x]:
                if part_of[y] == p and y not in seen:
                    seen.add(y)
                    parent[y] = x
                    queue.append(y)
    return parent


def contexts(g, part_of):
    parent = part_bfs_parents(g, part_of)
    return [
        PartContext(g, part_of, parent, SimConfig(mode=mode), CostMeter(), diameter=5, n_budget=g.n)
        for mode in ("literal", "charged")
    ]


def fixture(seed):
    rng = random.Random(seed)
    n = rng.randint(8, 70)
    g = random_planar(n, rng.randint(n - 1, 2 * n - 3), seed=seed)
    if rng.random() < 0.5:
        part_of = quadrant_partition(g).part_of
    else:
        part_of = [0] * n
    # drop one part to exercise non-members
    if rng.random() < 0.3 and len(set(part_of)) > 1:
        gone = max(part_of)
        part_of = [-1 if p == gone else p for p in part_of]
    return g, part_of, rng


FOLD = {"sum": sum, "min": min, "max": max}


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), st.sampled_from(["sum", "min", "max"]))
def test_aggregates_match_sequential_folds(seed, op):
    g, part_of, rng = fixture(seed)
    values = [rng.randint(0, 50) if rng.random() < 0.8 else None for _ in g.nodes]
    lit, chg = contexts(g, part_of)
    parent = lit.parent
    want_pa, want_anc, want_desc = [None] * g.n, [None] * g.n, [None] * g.n
    for v in g.nodes:
        if part_of[v] < 0:
            continue
        same = [values[x] for x in g.nodes if part_of[x] == part_of[v] and values[x] is not None]
        want_pa[v] = FOLD[op](same) if same else None
        up = [values[x] for x in seq_ancestors(parent, v) if values[x] is not None]
        want_anc[v] = FOLD[op](up) if up else None
        below = [values[x] for x in g.nodes if part_of[x] >= 0 and v in seq_ancestors(parent, x) and values[x] is not None]
        want_desc[v] = FOLD[op](below) if below else None
    for ctx in (lit, chg):
        assert partwise_aggregate(ctx, op, values) == want_pa
        assert ancestor_sum(ctx, op, values) == want_anc
        assert descendant_sum(ctx, op, values) == want_desc


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000))
def test_selection_primitives_agree_across_modes(seed):
    g, part_of, rng = fixture(seed)
    keys = [(rng.randint(0, 5), rng.randint(0, 5)) if rng.random() < 0.7 else None for _ in g.nodes]
    vals = [rng.randint(0, 30) for _ in g.nodes]
    lit, chg = contexts(g, part_of)
    parts = sorted({p for p in part_of if p >= 0})
    ranges = {p: (10, 20) for p in parts}
    for which in ("min", "max"):
        a, b = find_extreme(lit, which, keys), find_extreme(chg, which, keys)
        assert a == b
        for p in parts:
            cands = [(keys[v], v) for v in g.nodes if part_of[v] == p and keys[v] is not None]
            if not cands:
                assert a[p] is None
                continue
            best = min(cands) if which == "min" else max(cands, key=lambda kv: (kv[0], -kv[1]))
            assert a[p] == best[1]
    got = find_in_range(lit, vals, ranges)
    assert got == find_in_range(chg, vals, ranges)
    for p in parts:
        inside = [v for v in g.nodes if part_of[v] == p and 10 <= vals[v] <= 20]
        assert got[p] == (min(inside) if inside else None)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10_000))
def test_broadcast_and_exchange(seed):
    g, part_of, rng = fixture(seed)
    lit, chg = contexts(g, part_of)
    parts = sorted({p for p in part_of if p >= 0})
    sources = {p: (rng.choice([v for v in g.nodes if part_of[v] == p]), (p, 7)) for p in parts[::2]}
    for ctx in (lit, chg):
        got = broadcast_within_part(ctx, sources)
        for v in g.nodes:
            p = part_of[v]
            assert got[v] == (sources[p][1] if p in sources else None)
    vals = [v + 1 for v in g.nodes]
    for scope in ("part", "all"):
        a = neighbor_exchange(lit, vals, scope=scope)
        assert a == neighbor_exchange(chg, vals, scope=scope)
        for v in g.nodes:
            if part_of[v] < 0:
                continue
            want = {
                y: y + 1
                for y in g.rotations[v]
                if part_of[y] >= 0 and (scope == "all" or part_of[y] == part_of[v])
            }
            assert a[v] == want


def test_broadcast_rejects_foreign_source():
    g = grid(4)
    lit, _ = contexts(g, quadrant_partition(g).part_of)
    other = next(v for v in g.nodes if lit.part_of[v] != 0)
    with pytest.raises(NodeNotInPart):
        broadcast_within_part(lit, {0: (other, 1)})


def test_single_source_check():
    g = grid(3)
    lit, _ = contexts(g, [0] * g.n)
    check_single_sources(lit, [v == 4 for v in g.nodes])
    with pytest.raises(MultipleSources):
        check_single_sources(lit, [v in (1, 4) for v in g.nodes])


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10_000))
def test_orient_forest(seed):
    g = random_triangulation(random.Random(seed).randint(5, 60), seed=seed)
    part_of = quadrant_partition(g).part_of
    parent = part_bfs_parents(g, part_of)
    adj = [[] for _ in g.nodes]
    for v in g.nodes:
        if parent[v] >= 0:
            adj[v].append(parent[v])
            adj[parent[v]].append(v)
    rng = random.Random(seed)
    roots = [rng.choice(c) for c in components_of(adj)]
    outs = [
        orient_forest(g, adj, roots, list(g.nodes), SimConfig(mode=m), CostMeter(), n_budget=g.n)
        for m in ("literal", "charged")
    ]
    assert outs[0] == outs[1]
    par, depth, root_of = outs[0]
    for v in g.nodes:
        chain = seq_ancestors(par, v)
        assert chain[-1] in roots and root_of[v] == chain[-1]
        assert depth[v] == len(chain) - 1


def components_of(adj):
    seen, out = set(), []
    for s in range(len(adj)):
        if s in seen:
            continue
        comp, stack = [], [s]
        seen.add(s)
        while stack:
            x = stack.pop()
            comp.append(x)
            for y in adj[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        out.append(sorted(comp))
    return out


@given(st.one_of(st.none(), st.integers(0, 1 << 20), st.tuples(st.integers(0, 99), st.integers(0, 99))))
def test_encode_round_trip(v):
    assert decode(encode(v)) == v


def test_charged_mode_bills_each_call_once():
    g = grid(5)
    _, chg = contexts(g, [0] * g.n)
    partwise_aggregate(chg, "sum", [1] * g.n)
    ancestor_sum(chg, "max", [1] * g.n)
    assert chg.meter.primitives == {"partwise_aggregate": 1, "ancestor_sum": 1}
