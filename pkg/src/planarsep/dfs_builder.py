"""Depth-first search trees by repeated separation.

A partial DFS tree ``T_d`` starts as the root alone.  Each outer phase
splits ``G - T_d`` into connected components, computes a cycle separator
of every component in parallel, and joins all separator nodes to ``T_d``.
A join hangs a tree path below the deepest ``T_d`` neighbour of its
component, so every component keeps all its ``T_d`` neighbours on one
root-to-leaf path and the final tree has no cross edges.  Components shrink
to at most two thirds per phase.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from .congest_engine import ExecutionReport, SimConfig
from .errors import Disconnected, NotASeparatorInput
from .oracle_verify import check_separator
from .planar_core import Partition, PlanarGraph, components, diameter
from .primitives import PartContext, ancestor_sum, find_extreme, neighbor_exchange, orient_forest, partwise_aggregate
from .separator import compute_separators
from .tree_toolkit import RunEnv, boruvka


@dataclass
class PartialDfsTree:
    """Members of ``T_d`` with their parent and depth; values never change once set."""

    n: int
    root: int
    parent: list[int] = field(default_factory=list)
    depth: list[int] = field(default_factory=list)
    phase: list[int] = field(default_factory=list)

    def __post_init__(self) -> None:
        if not self.parent:
            self.parent = [-1] * self.n
            self.depth = [-1] * self.n
            self.phase = [-1] * self.n
            self.depth[self.root] = 0
            self.phase[self.root] = 0

    def member(self, v: int) -> bool:
        return self.depth[v] >= 0

    @property
    def size(self) -> int:
        return sum(1 for d in self.depth if d >= 0)

    def attach(self, path: list[int], below: int, phase: int) -> None:
        """Hang ``path`` (top node first) under the member ``below``."""
        if not self.member(below):
            raise ValueError(f"{below} is not in the tree")
        prev = below
        for x in path:
            if self.member(x):
                raise ValueError(f"{x} already joined")
            self.parent[x] = prev
            self.depth[x] = self.depth[prev] + 1
            self.phase[x] = phase
            prev = x

    def check(self, g: PlanarGraph) -> None:
        for v in range(self.n):
            if not self.member(v) or v == self.root:
                continue
            p = self.parent[v]
            if not g.has_edge(v, p) or self.depth[v] != self.depth[p] + 1:
                raise AssertionError(f"bad parent link at {v}")


@dataclass
class JoinRecord:
    phase: int
    components: int
    largest: int
    iterations: int
    marked: list[int]


@dataclass
class DfsResult:
    root: int
    parent: list[int]
    depth: list[int]
    phase: list[int]
    phases: int
    ledger: list[JoinRecord]
    report: ExecutionReport

    def to_dict(self) -> dict:
        return {"root": self.root, "parent": self.parent, "depth": self.depth, "phase": self.phase}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"))


def phase_bound(n: int) -> int:
    """``ceil(log_1.5 n) + 1``, the most outer phases a run may take."""
    if n <= 1:
        return 1
    return math.ceil(math.log(n) / math.log(1.5) - 1e-12) + 1


def _residual_forest(g: PlanarGraph, T: PartialDfsTree, marked: set[int], env: RunEnv):
    """Spanning forest of ``G - T_d`` whose marked nodes stay connected where possible.

    Edges between two marked nodes weigh 0, every other edge weighs 1.
    Returns the member list, component labels and the forest adjacency.
    """
    residual = [v for v in range(g.n) if not T.member(v)]
    adj, frag = boruvka(g, residual, lambda a, b: 0 if a in marked and b in marked else 1, env, stop_at_one=False)
    return residual, frag, adj


def _ctx(g: PlanarGraph, part_of: list[int], parent: list[int], env: RunEnv) -> PartContext:
    return PartContext(g, part_of, parent, env.cfg, env.meter, env.diameter, env.n_budget)


def join_separators(
    g: PlanarGraph, T: PartialDfsTree, marked: set[int], env: RunEnv, phase: int
) -> int:
    """Join every marked node to ``T`` under the DFS rule; returns the iteration count.

    Per iteration and per residual component holding marked nodes: pick the
    node ``r`` whose ``T_d`` neighbour is deepest, re-root the component's
    forest at ``r`` and hang the tree path from ``r`` to the marked node with
    the most marked nodes above it.
    """
    n = g.n
    todo = {v for v in marked if not T.member(v)}
    iterations = 0
    everyone = _ctx(g, list(range(n)), [-1] * n, env)
    while todo:
        iterations += 1
        residual, frag, adj = _residual_forest(g, T, todo, env)
        part_of = [frag[v] if not T.member(v) else -1 for v in range(n)]
        roots = sorted({frag[v] for v in residual})
        par0, _, _ = orient_forest(g, adj, roots, residual, env.cfg, env.meter, diameter=env.diameter, n_budget=env.n_budget)
        ctx = _ctx(g, part_of, par0, env)
        has_marked = partwise_aggregate(ctx, "max", [1 if v in todo else None for v in range(n)])
        # members announce their depth; residual nodes keep their deepest member neighbour
        heard = neighbor_exchange(everyone, [T.depth[v] if T.member(v) else None for v in range(n)], scope="all")
        best_nb: dict[int, int] = {}
        keys: list = [None] * n
        for v in residual:
            if not has_marked[v]:
                continue
            cands = [(d, n - 1 - y) for y, d in heard[v].items() if d is not None]
            if cands:
                d, ny = max(cands)
                best_nb[v] = n - 1 - ny
                keys[v] = (d, ny)
        pick = find_extreme(ctx, "max", keys)
        starts = sorted(r for r in pick.values() if r is not None)
        parent, _, root_of = orient_forest(
            g, adj, starts, [v for v in residual if has_marked[v]], env.cfg, env.meter,
            diameter=env.diameter, n_budget=env.n_budget,
        )
        act = [part_of[v] if root_of[v] >= 0 else -1 for v in range(n)]
        ctx2 = _ctx(g, act, parent, env)
        above = ancestor_sum(ctx2, "sum", [1 if v in todo else 0 for v in range(n)])
        target = find_extreme(ctx2, "max", [above[v] if v in todo else None for v in range(n)])
        for pid in sorted(target):
            t = target[pid]
            if t is None:
                continue
            path = [t]
            while parent[path[-1]] >= 0:
                path.append(parent[path[-1]])
            path.reverse()
            r = path[0]
            T.attach(path, best_nb[r], phase)
            todo.difference_update(path)
        # the hung paths learn their parents and depths from one ancestor sum
        ancestor_sum(ctx2, "sum", [0] * n)
    return iterations


def build_dfs(
    g: PlanarGraph, root: int = 0, env: RunEnv | None = None, *, cfg: SimConfig | None = None
) -> DfsResult:
    """DFS tree of ``g`` rooted at ``root`` with a ledger of outer phases."""
    if not 0 <= root < g.n:
        raise ValueError(f"root {root} is not a node")
    if len(components(g, range(g.n))) != 1:
        raise Disconnected("the graph is not connected")
    if env is None:
        env = RunEnv(cfg=cfg or SimConfig(), diameter=diameter(g), n_budget=g.n)
    T = PartialDfsTree(g.n, root)
    ledger: list[JoinRecord] = []
    k = 0
    while T.size < g.n:
        k += 1
        residual = [v for v in range(g.n) if not T.member(v)]
        _, frag = boruvka(g, residual, lambda a, b: 0, env, stop_at_one=False)
        labels = [frag[v] if not T.member(v) else -1 for v in range(g.n)]
        partition = Partition(labels)
        sizes = {p: len(vs) for p, vs in partition.parts.items() if p >= 0}
        ws = compute_separators(g, partition, env, members=residual)
        marked: set[int] = set()
        for pid, w in ws.items():
            if not check_separator(g, partition.parts[pid], w.S):
                raise NotASeparatorInput(f"part {pid} returned an unbalanced separator")
            marked.update(w.S)
        iters = join_separators(g, T, marked, env, k)
        ledger.append(JoinRecord(k, len(sizes), max(sizes.values()), iters, sorted(marked)))
    T.check(g)
    return DfsResult(root, T.parent, T.depth, T.phase, k, ledger, env.meter.report())
