"""Distributed tree subroutines against plain sequential answers."""
from __future__ import annotations

import random

from planarsep.congest_engine import SimConfig
from planarsep.oracle_verify import oracle_dfs_orders, tree_path
from planarsep.planar_core import random_planar, random_tree, random_triangulation
from planarsep.primitives import ancestor_sum, descendant_sum, partwise_aggregate, relation_to
from planarsep.tree_toolkit import RunEnv, lca, make_tree, mark_path, reroot, tree_of_graph

from corpus import plane_trees, seq_ancestors, seq_depths, seq_lca, seq_orient


def _relation(parent, v0, x):
    if x == v0:
        return "self"
    if v0 in seq_ancestors(parent, x):
        return "descendant"
    if x in seq_ancestors(parent, v0):
        return "ancestor"
    return "neither"


def check_tree(g, parent, r0, rng: random.Random, mode: str = "charged", pairs: int | None = None) -> list[str]:
    """Mismatches between the distributed answers and the sequential ones.

    ``pairs`` limits the node pairs and re-root targets tried (all if None).
    """
    env = RunEnv(cfg=SimConfig(mode=mode), diameter=max(1, g.n - 1), n_budget=g.n)
    tree = make_tree(g, list(parent), env, r0_after=r0)
    bad: list[str] = []
    n = g.n
    pil, pir = oracle_dfs_orders(g, parent, r0)
    if tree.pil != pil or tree.pir != pir:
        bad.append("dfs_orders")
    if tree.depth != seq_depths(parent):
        bad.append("depth")
    sizes = [sum(1 for x in range(n) if v in seq_ancestors(parent, x)) for v in range(n)]
    if tree.size != sizes:
        bad.append("size")
    all_pairs = [(a, b) for a in range(n) for b in range(n)]
    chosen = all_pairs if pairs is None else [rng.choice(all_pairs) for _ in range(pairs)]
    for a, b in chosen:
        if lca(tree, a, b) != seq_lca(parent, a, b):
            bad.append(f"lca {a} {b}")
        if mark_path(tree, a, b) != set(tree_path(parent, a, b)):
            bad.append(f"mark_path {a} {b}")
    targets = range(n) if pairs is None else [rng.randrange(n) for _ in range(max(1, pairs // 2))]
    adj = [[] for _ in range(n)]
    for v in range(n):
        if parent[v] >= 0:
            adj[v].append(parent[v])
            adj[parent[v]].append(v)
    for v0 in targets:
        rel = relation_to(tree.ctx, {0: v0})
        if rel != [_relation(parent, v0, x) for x in range(n)]:
            bad.append(f"relation_to {v0}")
        t2 = reroot(tree, v0)
        want = seq_orient(adj, v0)
        if t2.parent != want or t2.depth != seq_depths(want):
            bad.append(f"reroot {v0}")
        elif (t2.pil, t2.pir) != oracle_dfs_orders(g, want, t2.r0_after):
            bad.append(f"reroot orders {v0}")
    vals = [rng.randint(0, 9) for _ in range(n)]
    ctx = tree.ctx
    if partwise_aggregate(ctx, "sum", vals) != [sum(vals)] * n:
        bad.append("partwise sum")
    if partwise_aggregate(ctx, "max", vals) != [max(vals)] * n:
        bad.append("partwise max")
    if ancestor_sum(ctx, "sum", vals) != [sum(vals[x] for x in seq_ancestors(parent, v)) for v in range(n)]:
        bad.append("ancestor_sum")
    desc = [sum(vals[x] for x in range(n) if v in seq_ancestors(parent, x)) for v in range(n)]
    if descendant_sum(ctx, "sum", vals) != desc:
        bad.append("descendant_sum")
    return bad


def exhaustive_small_trees(max_n: int = 7):
    for n in range(1, max_n + 1):
        yield from plane_trees(n)


def random_fixture(i: int):
    """The ``i``-th of the larger random fixtures: a spanning tree of a random graph."""
    rng = random.Random(1_000 + i)
    n = rng.randint(8, 60)
    kind = i % 3
    if kind == 0:
        g = random_triangulation(max(n, 4), seed=i)
    elif kind == 1:
        g = random_planar(n, rng.randint(n - 1, 2 * n - 4), seed=i)
    else:
        g = random_tree(n, seed=i)
    t = tree_of_graph(g)
    if rng.random() < 0.5:
        t = reroot(t, rng.randrange(t.n))
    return t.graph, t.parent, t.r0_after, rng


def run_equivalence(random_count: int = 500) -> tuple[int, int, list[str]]:
    """Returns (fixtures checked, fixtures failing, first few messages)."""
    checked = failing = 0
    msgs: list[str] = []
    for g, parent, r0 in exhaustive_small_trees():
        for mode in ("literal", "charged"):
            bad = check_tree(g, parent, r0, random.Random(g.n), mode=mode)
            checked += 1
            if bad:
                failing += 1
                msgs.append(f"n={g.n} {mode}: {bad[:3]}")
    for i in range(random_count):
        g, parent, r0, rng = random_fixture(i)
        bad = check_tree(g, parent, r0, rng, mode="literal" if i % 10 == 0 else "charged", pairs=6)
        checked += 1
        if bad:
            failing += 1
            msgs.append(f"fixture {i}: {bad[:3]}")
    return checked, failing, msgs[:5]
