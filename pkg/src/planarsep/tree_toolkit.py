"""Rooted spanning trees of parts and the tree-shaped subroutines.

A :class:`RootedTree` lives on the *local* graph of its part (ids
``0..k-1``, see :func:`planar_core.induced`) and keeps ``glob`` to map back.
Rotation positions are stored doubled: a real neighbour at position ``t``
gets ``2t``, which leaves odd numbers for virtual edges squeezed between two
real ones.  The parent sits at 0; at the root the virtual root r0 takes 0 and
neighbours start at 2.
"""
from __future__ import annotations

import bisect
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .congest_engine import CostMeter, SimConfig
from .errors import CrossPartQuery, DisconnectedPart, NodeNotInPart
from .planar_core import PlanarGraph, Partition, induced
from .primitives import (
    PartContext,
    ancestor_sum,
    descendant_sum,
    find_extreme,
    neighbor_exchange,
    orient_forest,
    partwise_aggregate,
    relation_to,
)


@dataclass
class RunEnv:
    """Cost model shared by every subroutine of one algorithm run."""

    cfg: SimConfig = field(default_factory=SimConfig)
    meter: CostMeter = field(default_factory=CostMeter)
    diameter: int = 1
    n_budget: int = 1

    def branch(self, meter: CostMeter) -> "RunEnv":
        return RunEnv(self.cfg, meter, self.diameter, self.n_budget)


def default_r0_after(g: PlanarGraph, root: int) -> int | None:
    rot = g.rotations[root]
    if not rot:
        return None
    if root == g.outer[1] and g.outer[0] != root:
        return g.outer[0]
    return rot[-1]


def positions(g: PlanarGraph, parent: Sequence[int], v: int, r0_after: int | None) -> dict[int, int]:
    """Doubled rotation positions of the neighbours of ``v``."""
    rot = g.rotations[v]
    k = len(rot)
    if not k:
        return {}
    if parent[v] >= 0:
        base = g.index(v, parent[v])
        return {rot[(base + i) % k]: 2 * i for i in range(k)}
    start = (g.index(v, r0_after) + 1) % k if r0_after is not None else 0
    return {rot[(start + i) % k]: 2 * (i + 1) for i in range(k)}


@dataclass
class RootedTree:
    graph: PlanarGraph
    glob: list[int]
    root: int
    r0_after: int | None
    parent: list[int]
    depth: list[int]
    size: list[int]
    pil: list[int] | None
    pir: list[int] | None
    children: list[list[int]]
    tpos: list[dict[int, int]]
    env: RunEnv = field(default_factory=RunEnv)

    def __post_init__(self) -> None:
        self.local = {v: i for i, v in enumerate(self.glob)}
        self._ctx: PartContext | None = None
        if self.pil is not None:
            # children in increasing left position, for child lookups
            self._kids_l = [sorted(ch, key=lambda c: self.pil[c]) for ch in self.children]
            self._kids_l_pos = [[self.pil[c] for c in ch] for ch in self._kids_l]

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def ctx(self) -> PartContext:
        if self._ctx is None:
            self._ctx = PartContext(
                self.graph,
                [0] * self.n,
                self.parent,
                self.env.cfg,
                self.env.meter,
                self.env.diameter,
                self.env.n_budget,
            )
            self._ctx.pre = self.pil
            self._ctx.size = self.size
        return self._ctx

    def interval(self, v: int) -> tuple[int, int]:
        return self.pil[v], self.pil[v] + self.size[v] - 1

    def is_anc(self, a: int, b: int) -> bool:
        """``a`` is an ancestor of ``b`` or equal to it."""
        return self.pil[a] <= self.pil[b] < self.pil[a] + self.size[a]

    def child_toward(self, a: int, b: int) -> int:
        """The child of ``a`` whose subtree holds the proper descendant ``b``."""
        i = bisect.bisect_right(self._kids_l_pos[a], self.pil[b]) - 1
        return self._kids_l[a][i]

    def big(self, v: int) -> int:
        """A doubled position beyond every neighbour of ``v``."""
        return 2 * len(self.graph.rotations[v]) + 2

    def lca_seq(self, a: int, b: int) -> int:
        x = a
        while not self.is_anc(x, b):
            x = self.parent[x]
        return x

    def path_seq(self, a: int, b: int) -> list[int]:
        """Tree path from ``a`` to ``b`` (sequential twin of :func:`mark_path`)."""
        w = self.lca_seq(a, b)
        up = []
        x = a
        while x != w:
            up.append(x)
            x = self.parent[x]
        down = []
        y = b
        while y != w:
            down.append(y)
            y = self.parent[y]
        return up + [w] + down[::-1]

    def to_global_parent(self) -> dict[int, int | None]:
        return {
            self.glob[v]: (None if self.parent[v] < 0 else self.glob[self.parent[v]]) for v in range(self.n)
        }


# -- construction ----------------------------------------------------------


def dfs_orders(
    g: PlanarGraph, parent: Sequence[int], r0_after: int | None, env: RunEnv
) -> dict[str, list]:
    """Depth, subtree size, left and right DFS positions via tree folds.

    Sizes come from a descendant sum of ones; each parent then hands its
    children offsets (left order takes greater positions first, right order
    smaller first) and an ancestor sum turns offsets into positions.
    """
    n = g.n
    ctx = PartContext(g, [0] * n, list(parent), env.cfg, env.meter, env.diameter, env.n_budget)
    # children learn nothing new here but parents learn who their children are
    heard = neighbor_exchange(ctx, [p if p >= 0 else None for p in parent])
    root = next(v for v in range(n) if parent[v] < 0)
    kids: list[list[int]] = []
    tpos: list[dict[int, int]] = []
    for v in range(n):
        pos = positions(g, parent, v, r0_after if v == root else None)
        tpos.append(pos)
        kids.append(sorted((c for c, p in heard[v].items() if p == v), key=lambda c: pos[c]))
    ones = [1] * n
    size, child_sizes = descendant_sum(ctx, "sum", ones, with_children=True)
    depth = [d - 1 for d in ancestor_sum(ctx, "sum", ones)]
    off_l = [0] * n
    off_r = [0] * n
    off_l[root] = off_r[root] = 1
    for v in range(n):
        acc = 1
        for c in reversed(kids[v]):
            off_l[c] = acc
            acc += child_sizes[v][c]
        acc = 1
        for c in kids[v]:
            off_r[c] = acc
            acc += child_sizes[v][c]
    pil = ancestor_sum(ctx, "sum", off_l)
    pir = ancestor_sum(ctx, "sum", off_r)
    return {"size": size, "depth": depth, "pil": pil, "pir": pir, "children": kids, "tpos": tpos}


def make_tree(
    g: PlanarGraph,
    parent: Sequence[int],
    env: RunEnv | None = None,
    *,
    glob: Sequence[int] | None = None,
    r0_after: int | None = None,
) -> RootedTree:
    env = env or RunEnv(n_budget=g.n)
    root = next(v for v in range(g.n) if parent[v] < 0)
    if r0_after is None:
        r0_after = default_r0_after(g, root)
    d = dfs_orders(g, parent, r0_after, env)
    return RootedTree(
        graph=g,
        glob=list(glob) if glob is not None else list(range(g.n)),
        root=root,
        r0_after=r0_after,
        parent=list(parent),
        depth=d["depth"],
        size=d["size"],
        pil=d["pil"],
        pir=d["pir"],
        children=d["children"],
        tpos=d["tpos"],
        env=env,
    )


def boruvka(
    g: PlanarGraph,
    members: Sequence[int],
    weight: Callable[[int, int], int],
    env: RunEnv,
    *,
    stop_at_one: bool,
) -> tuple[list[list[int]], list[int]]:
    """Boruvka merging with 0/1 weights and id tie-breaks.

    Returns tree adjacency and fragment labels (the fragment root).  With
    ``stop_at_one`` a fragment stops once its lightest outgoing edge weighs 1.
    """
    n = g.n
    mem = sorted(members)
    in_mem = [False] * n
    for v in mem:
        in_mem[v] = True
    adj: list[list[int]] = [[] for _ in range(n)]
    frag = [v if in_mem[v] else -1 for v in range(n)]
    fparent = [-1] * n
    nn = n * n
    while True:
        ctx = PartContext(g, frag, fparent, env.cfg, env.meter, env.diameter, env.n_budget)
        heard = neighbor_exchange(ctx, frag, scope="all")
        keys: list[int | None] = [None] * n
        for v in mem:
            best = None
            for y, fy in heard[v].items():
                if fy != frag[v]:
                    a, b = (v, y) if v < y else (y, v)
                    k = weight(v, y) * nn + a * n + b
                    if best is None or k < best:
                        best = k
            keys[v] = best
        chosen = partwise_aggregate(ctx, "min", keys)
        active = [
            v
            for v in mem
            if chosen[v] is not None and not (stop_at_one and chosen[v] >= nn)
        ]
        if not active:
            break
        # endpoints compare the edges picked by both sides to find the core edges
        picked = [chosen[v] if chosen[v] is not None and not (stop_at_one and chosen[v] >= nn) else None for v in range(n)]
        seen_pick = neighbor_exchange(ctx, picked, scope="all")
        new_roots = set()
        added = set()
        for v in active:
            k = picked[v]
            a, b = (k % nn) // n, k % n
            if v not in (a, b):
                continue
            y = b if v == a else a
            if (a, b) not in added:
                added.add((a, b))
                adj[a].append(b)
                adj[b].append(a)
            if seen_pick[v].get(y) == k:
                new_roots.add(a)
        # fragments that did not move keep their root
        moving = {frag[v] for v in active}
        for v in mem:
            if frag[v] == v and v not in moving:
                new_roots.add(v)
        fparent, _, frag_new = orient_forest(
            g, adj, sorted(new_roots), mem, env.cfg, env.meter, diameter=env.diameter, n_budget=env.n_budget
        )
        frag = [frag_new[v] if in_mem[v] else -1 for v in range(n)]
    return adj, frag


def build_part_trees(
    g: PlanarGraph, partition: Partition, env: RunEnv | None = None, *, members: Sequence[int] | None = None
) -> dict[int, RootedTree]:
    """One spanning tree per part, each on the part's local graph.

    Intra-part edges weigh 0 and inter-part edges 1; merging stops at weight
    1.  Each tree is then re-rooted at the part's anchor (the node that
    owns the outer corner of the part) and its DFS data computed.
    """
    env = env or RunEnv(n_budget=g.n)
    part_of = partition.part_of
    mem = list(range(g.n)) if members is None else sorted(members)
    adj, frag = boruvka(g, mem, lambda u, v: 0 if part_of[u] == part_of[v] else 1, env, stop_at_one=True)
    locals_: dict[int, tuple[PlanarGraph, list[int]]] = {}
    roots = []
    for pid, nodes in sorted(partition.parts.items()):
        if pid < 0:
            continue
        nodes = [v for v in nodes if part_of[v] == pid]
        if not nodes:
            continue
        if len({frag[v] for v in nodes}) != 1:
            raise DisconnectedPart(f"part {pid} is not connected")
        lg, glob = induced(g, sorted(nodes))
        locals_[pid] = (lg, glob)
        roots.append(glob[lg.outer[1]])
    parent, _, _ = orient_forest(
        g, adj, roots, mem, env.cfg, env.meter, diameter=env.diameter, n_budget=env.n_budget
    )
    out: dict[int, RootedTree] = {}
    with env.meter.parallel() as branch:
        for pid, (lg, glob) in locals_.items():
            loc = {v: i for i, v in enumerate(glob)}
            lpar = [-1 if parent[v] < 0 else loc[parent[v]] for v in glob]
            out[pid] = make_tree(lg, lpar, env.branch(branch()), glob=glob)
    for t in out.values():
        t.env = env
        t._ctx = None
    return out


def tree_of_graph(g: PlanarGraph, env: RunEnv | None = None) -> RootedTree:
    """Spanning tree of a connected graph rooted at its anchor."""
    env = env or RunEnv(n_budget=g.n)
    return build_part_trees(g, Partition.single(g.n), env)[0]


# -- path queries ------------------------------------------------------------


def _check_same(tree: RootedTree, *nodes: int) -> None:
    for x in nodes:
        if not 0 <= x < tree.n:
            raise CrossPartQuery(f"node {x} is not in this part")


def lca(tree: RootedTree, u: int, v: int) -> int:
    """Deepest node that is an ancestor of both, found by a max-depth search."""
    _check_same(tree, u, v)
    ctx = tree.ctx
    ru = relation_to(ctx, {0: u})
    rv = relation_to(ctx, {0: v})
    common = [
        tree.depth[x] if ru[x] in ("self", "ancestor") and rv[x] in ("self", "ancestor") else None
        for x in range(tree.n)
    ]
    return find_extreme(ctx, "max", common)[0]


def mark_path(tree: RootedTree, u: int, v: int) -> set[int]:
    """Nodes on the tree path between ``u`` and ``v``.

    Every node learns its relation to both endpoints; the path is the set of
    nodes above exactly one endpoint, plus their lowest common ancestor.
    """
    _check_same(tree, u, v)
    ctx = tree.ctx
    ru = relation_to(ctx, {0: u})
    rv = relation_to(ctx, {0: v})
    above_u = [ru[x] in ("self", "ancestor") for x in range(tree.n)]
    above_v = [rv[x] in ("self", "ancestor") for x in range(tree.n)]
    common = [tree.depth[x] if above_u[x] and above_v[x] else None for x in range(tree.n)]
    w = find_extreme(ctx, "max", common)[0]
    return {x for x in range(tree.n) if above_u[x] != above_v[x] or x == w}


def reroot(tree: RootedTree, v0: int, *, orders: bool = True) -> RootedTree:
    """Same edges, rooted at ``v0``.

    Descendants of ``v0`` keep their parent, strict ancestors flip to their
    child toward ``v0``, every other node keeps its parent.  Depths are
    recomputed by an ancestor sum on the new orientation.
    """
    if not 0 <= v0 < tree.n:
        raise NodeNotInPart(f"node {v0} is not in this part")
    if v0 == tree.root:
        return tree
    ctx = tree.ctx
    rel = relation_to(ctx, {0: v0})
    parent = list(tree.parent)
    for x in range(tree.n):
        if rel[x] == "ancestor":
            parent[x] = tree.child_toward(x, v0)
    parent[v0] = -1
    env = tree.env
    if orders:
        return make_tree(tree.graph, parent, env, glob=tree.glob)
    ctx2 = PartContext(tree.graph, [0] * tree.n, parent, env.cfg, env.meter, env.diameter, env.n_budget)
    depth = [d - 1 for d in ancestor_sum(ctx2, "sum", [1] * tree.n)]
    kids: list[list[int]] = [[] for _ in range(tree.n)]
    for x in range(tree.n):
        if parent[x] >= 0:
            kids[parent[x]].append(x)
    return RootedTree(
        graph=tree.graph,
        glob=tree.glob,
        root=v0,
        r0_after=default_r0_after(tree.graph, v0),
        parent=parent,
        depth=depth,
        size=[0] * tree.n,
        pil=None,
        pir=None,
        children=kids,
        tpos=[],
        env=env,
    )
