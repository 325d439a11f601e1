"""Part-wise aggregation and tree folds, runnable literally or by charged oracle.

Every public operation works on all parts of a :class:`PartContext` at once
and counts as one invocation.  In literal mode it runs a :class:`NodeProgram`
over the part trees through :func:`congest_engine.run`; in charged mode the
same answer is computed sequentially and billed ``alpha * D * log n`` rounds.
Both modes return identical outputs.

Ancestor and descendant folds include the node itself.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Any, Callable, Mapping, Sequence

from .congest_engine import CostMeter, LocalView, SimConfig, charge_primitive, run
from .errors import MultipleSources, NodeNotInPart, OverflowBeyondBudget
from .planar_core import PlanarGraph

Value = Any  # int, tuple of ints, or None

_OPS: dict[str, Callable[[Any, Any], Any]] = {
    "sum": lambda a, b: a + b,
    "min": min,
    "max": max,
}


def _fold(op: str, a: Value, b: Value) -> Value:
    if a is None:
        return b
    if b is None:
        return a
    return _OPS[op](a, b)


def encode(v: Value) -> tuple[int, ...]:
    if v is None:
        return (0,)
    if isinstance(v, tuple):
        return (2, *v)
    return (1, v)


def decode(msg: tuple[int, ...]) -> Value:
    tag = msg[0]
    if tag == 0:
        return None
    if tag == 1:
        return msg[1]
    return tuple(msg[1:])


@dataclass
class PartContext:
    """Parts of ``graph`` together with one rooted spanning tree per part.

    ``part_of[v] < 0`` marks a node that takes no part; ``parent[v] < 0``
    marks a part root.  ``n_budget`` and ``diameter`` come from the input
    graph and fix the message budget and the charged cost.
    """

    graph: PlanarGraph
    part_of: list[int]
    parent: list[int]
    cfg: SimConfig = field(default_factory=SimConfig)
    meter: CostMeter = field(default_factory=CostMeter)
    diameter: int = 1
    n_budget: int | None = None

    def __post_init__(self) -> None:
        n = self.graph.n
        if self.n_budget is None:
            self.n_budget = n
        self.members = [v for v in range(n) if self.part_of[v] >= 0]
        self.children: list[list[int]] = [[] for _ in range(n)]
        self.roots: dict[int, int] = {}
        for v in self.members:
            p = self.parent[v]
            if p >= 0:
                self.children[p].append(v)
            else:
                if self.part_of[v] in self.roots:
                    raise ValueError(f"part {self.part_of[v]} has two roots")
                self.roots[self.part_of[v]] = v
        self.budget = self.cfg.budget(self.n_budget)
        # optional DFS data, attached by tree_toolkit
        self.pre: list[int] | None = None
        self.size: list[int] | None = None

    @property
    def literal(self) -> bool:
        return self.cfg.mode == "literal"

    def _charge(self, name: str) -> None:
        charge_primitive(self.meter, name, self.diameter, self.n_budget, self.cfg.charge_alpha)

    def _run(self, name: str, prog, data: Mapping[int, Any]):
        rep = run(
            self.graph, prog, self.cfg, data=data, nodes=self.members, budget_n=self.n_budget
        )
        self.meter.add_run(name, rep)
        return rep.outputs

    def _check_sum(self, value: Value) -> None:
        if isinstance(value, int) and value >= 1 << self.budget:
            raise OverflowBeyondBudget(f"sum {value} does not fit in {self.budget} bits")
        if isinstance(value, tuple) and any(x >= 1 << self.budget for x in value):
            raise OverflowBeyondBudget(f"sum {value} does not fit in {self.budget} bits")

    # sequential helpers shared by charged mode
    def _postorder(self) -> list[int]:
        order: list[int] = []
        for r in self.roots.values():
            stack = [r]
            while stack:
                x = stack.pop()
                order.append(x)
                stack.extend(self.children[x])
        return order[::-1]


# -- literal programs ------------------------------------------------------


class _Convergecast:
    """Fold values up the part tree; optionally send the root result back down."""

    def __init__(self, op: str, down: bool, budget: int) -> None:
        self.op, self.down, self.budget = op, down, budget

    def init(self, view: LocalView):
        parent, children, value = view.data
        return {
            "parent": parent,
            "children": children,
            "acc": value,
            "missing": set(children),
            "child_vals": {},
            "sent": False,
            "result": None,
            "done": False,
        }

    def step(self, st, inbox):
        out: dict[int, tuple[int, ...]] = {}
        for src, msg in inbox.items():
            val = decode(msg)
            if src == st["parent"]:
                st["result"] = val
                st["done"] = True
                for c in st["children"]:
                    out[c] = msg
            else:
                st["missing"].discard(src)
                st["child_vals"][src] = val
                st["acc"] = _fold(self.op, st["acc"], val)
        if not st["sent"] and not st["missing"]:
            st["sent"] = True
            if self.op == "sum":
                acc = st["acc"]
                if isinstance(acc, int) and acc >= 1 << self.budget:
                    raise OverflowBeyondBudget(f"sum {acc} does not fit in {self.budget} bits")
            if st["parent"] >= 0:
                out[st["parent"]] = encode(st["acc"])
            else:
                st["result"] = st["acc"]
                st["done"] = True
                if self.down:
                    for c in st["children"]:
                        out[c] = encode(st["acc"])
        return st, out, True

    def output(self, st):
        return st


class _PrefixDown:
    """Each node folds the value of its parent chain into its own."""

    def __init__(self, op: str, budget: int) -> None:
        self.op, self.budget = op, budget

    def init(self, view: LocalView):
        parent, children, value = view.data
        return {"parent": parent, "children": children, "own": value, "result": None}

    def step(self, st, inbox):
        out = {}
        ready = False
        if st["parent"] < 0 and st["result"] is None:
            st["result"] = st["own"]
            ready = True
        for src, msg in inbox.items():
            st["result"] = _fold(self.op, decode(msg), st["own"])
            ready = True
        if ready:
            r = st["result"]
            if self.op == "sum" and isinstance(r, int) and r >= 1 << self.budget:
                raise OverflowBeyondBudget(f"sum {r} does not fit in {self.budget} bits")
            for c in st["children"]:
                out[c] = encode(r)
        return st, out, True

    def output(self, st):
        return st["result"]


class _TreeFlood:
    """Deliver one payload from a source to every node of its tree."""

    def init(self, view: LocalView):
        tree_nbrs, payload = view.data
        return {"nbrs": tree_nbrs, "payload": payload, "start": payload is not None}

    def step(self, st, inbox):
        out = {}
        if st["start"]:
            st["start"] = False
            for y in st["nbrs"]:
                out[y] = encode(st["payload"])
        for src, msg in inbox.items():
            if st["payload"] is None:
                st["payload"] = decode(msg)
                for y in st["nbrs"]:
                    if y != src:
                        out[y] = msg
        return st, out, True

    def output(self, st):
        return st["payload"]


class _Orient:
    """Root a forest given by undirected tree edges: flood ``(depth, root)`` from the roots."""

    def init(self, view: LocalView):
        tree_nbrs, is_root = view.data
        me = view.node
        return {
            "nbrs": tree_nbrs,
            "parent": -1,
            "depth": 0 if is_root else None,
            "root": me if is_root else None,
            "start": is_root,
        }

    def step(self, st, inbox):
        out = {}
        if st["start"]:
            st["start"] = False
            for y in st["nbrs"]:
                out[y] = (1, st["root"])
        for src, msg in inbox.items():
            if st["depth"] is None:
                st["parent"] = src
                st["depth"], st["root"] = msg
                for y in st["nbrs"]:
                    if y != src:
                        out[y] = (msg[0] + 1, msg[1])
        return st, out, True

    def output(self, st):
        return (st["parent"], st["depth"], st["root"])


class _Exchange:
    """One round: every node tells each listed neighbour its value."""

    def init(self, view: LocalView):
        targets, value = view.data
        return {"targets": targets, "value": value, "heard": {}, "sent": False}

    def step(self, st, inbox):
        out = {}
        if not st["sent"]:
            st["sent"] = True
            val = st["value"]
            for y in st["targets"]:
                out[y] = encode(val.get(y) if isinstance(val, dict) else val)
        for src, msg in inbox.items():
            st["heard"][src] = decode(msg)
        return st, out, True

    def output(self, st):
        return st["heard"]


# -- public operations -------------------------------------------------------


def partwise_aggregate(ctx: PartContext, op: str, inputs: Sequence[Value]) -> list[Value]:
    """Every member learns the ``op``-fold of the inputs of its part."""
    return partwise_aggregate_named(ctx, "partwise_aggregate", op, inputs)


def descendant_sum(
    ctx: PartContext, op: str, inputs: Sequence[Value], *, with_children: bool = False
):
    """Fold over each node's subtree (node included).

    With ``with_children`` also return, per node, the folds reported by its
    children (a by-product of the convergecast).
    """
    n = ctx.graph.n
    out: list[Value] = [None] * n
    kids: list[dict[int, Value]] = [dict() for _ in range(n)]
    if ctx.literal:
        data = {v: (ctx.parent[v], tuple(ctx.children[v]), inputs[v]) for v in ctx.members}
        res = ctx._run("descendant_sum", _Convergecast(op, False, ctx.budget), data)
        for v in ctx.members:
            out[v] = res[v]["acc"]
            kids[v] = res[v]["child_vals"]
    else:
        ctx._charge("descendant_sum")
        for v in ctx._postorder():
            acc = inputs[v]
            for c in ctx.children[v]:
                acc = _fold(op, acc, out[c])
                kids[v][c] = out[c]
            if op == "sum":
                ctx._check_sum(acc)
            out[v] = acc
    return (out, kids) if with_children else out


def ancestor_sum(ctx: PartContext, op: str, inputs: Sequence[Value]) -> list[Value]:
    """Fold over each node's root path (node included)."""
    n = ctx.graph.n
    out: list[Value] = [None] * n
    if ctx.literal:
        data = {v: (ctx.parent[v], tuple(ctx.children[v]), inputs[v]) for v in ctx.members}
        res = ctx._run("ancestor_sum", _PrefixDown(op, ctx.budget), data)
        for v in ctx.members:
            out[v] = res[v]
        return out
    ctx._charge("ancestor_sum")
    for v in reversed(ctx._postorder()):
        p = ctx.parent[v]
        out[v] = inputs[v] if p < 0 else _fold(op, out[p], inputs[v])
        if op == "sum":
            ctx._check_sum(out[v])
    return out


def _extreme_keys(ctx: PartContext, which: str, inputs: Sequence[Value]) -> list[Value]:
    n = ctx.graph.n
    keys: list[Value] = [None] * n
    for v in ctx.members:
        x = inputs[v]
        if x is None:
            continue
        # smallest id wins ties in both directions
        keys[v] = (x, v) if which == "min" else (x, n - 1 - v)
    return keys


def find_extreme(ctx: PartContext, which: str, inputs: Sequence[Value]) -> dict[int, int | None]:
    """Per part, the node holding the min/max input (``None`` inputs skipped)."""
    if which not in ("min", "max"):
        raise ValueError(which)
    n = ctx.graph.n
    keys = _extreme_keys(ctx, which, inputs)
    flat = [None if k is None else (*_flat(k[0]), k[1]) for k in keys]
    res = partwise_aggregate_named(ctx, "find_extreme", which, flat)
    out: dict[int, int | None] = {}
    for p, r in ctx.roots.items():
        best = res[r]
        if best is None:
            out[p] = None
        else:
            tag = best[-1]
            out[p] = tag if which == "min" else n - 1 - tag
    return out


def _flat(x: Value) -> tuple[int, ...]:
    return x if isinstance(x, tuple) else (x,)


def partwise_aggregate_named(ctx: PartContext, name: str, op: str, inputs: Sequence[Value]) -> list[Value]:
    """:func:`partwise_aggregate` billed under another primitive name."""
    n = ctx.graph.n
    out: list[Value] = [None] * n
    if ctx.literal:
        data = {v: (ctx.parent[v], tuple(ctx.children[v]), inputs[v]) for v in ctx.members}
        res = ctx._run(name, _Convergecast(op, True, ctx.budget), data)
        for v in ctx.members:
            out[v] = res[v]["result"]
        return out
    ctx._charge(name)
    acc: dict[int, Value] = {}
    for v in ctx.members:
        p = ctx.part_of[v]
        acc[p] = _fold(op, acc.get(p), inputs[v])
    if op == "sum":
        for val in acc.values():
            ctx._check_sum(val)
    for v in ctx.members:
        out[v] = acc[ctx.part_of[v]]
    return out


def find_in_range(
    ctx: PartContext, inputs: Sequence[Value], ranges: Mapping[int, tuple[Any, Any]]
) -> dict[int, int | None]:
    """Per part, the smallest id whose input lies in the closed range of its part.

    Ranges are compared with ``lo <= x <= hi`` so callers may pass exact
    rationals; nodes test membership locally and only ids travel.
    """
    marks: list[Value] = [None] * ctx.graph.n
    for v in ctx.members:
        rng = ranges.get(ctx.part_of[v])
        x = inputs[v]
        if rng is not None and x is not None and rng[0] <= x <= rng[1]:
            marks[v] = v
    res = partwise_aggregate_named(ctx, "find_in_range", "min", marks)
    return {p: res[r] for p, r in ctx.roots.items()}


def broadcast_within_part(ctx: PartContext, sources: Mapping[int, tuple[int, Value]]) -> list[Value]:
    """Deliver ``payload`` from ``source`` to every node of the source's part.

    ``sources`` maps part id to ``(source node, payload)``.
    """
    n = ctx.graph.n
    for p, (s, _) in sources.items():
        if s < 0 or s >= n or ctx.part_of[s] != p:
            raise NodeNotInPart(f"source {s} is not in part {p}")
    out: list[Value] = [None] * n
    if ctx.literal:
        data = {}
        src_of = {s: pay for s, pay in sources.values()}
        for v in ctx.members:
            nb = list(ctx.children[v])
            if ctx.parent[v] >= 0:
                nb.append(ctx.parent[v])
            data[v] = (tuple(nb), src_of.get(v))
        res = ctx._run("broadcast_within_part", _TreeFlood(), data)
        for v in ctx.members:
            out[v] = res[v] if ctx.part_of[v] in sources else None
        return out
    ctx._charge("broadcast_within_part")
    for v in ctx.members:
        p = ctx.part_of[v]
        if p in sources:
            out[v] = sources[p][1]
    return out


def check_single_sources(ctx: PartContext, flags: Sequence[bool]) -> None:
    seen: dict[int, int] = {}
    for v in ctx.members:
        if flags[v]:
            p = ctx.part_of[v]
            if p in seen:
                raise MultipleSources(f"part {p} has sources {seen[p]} and {v}")
            seen[p] = v


def relation_to(ctx: PartContext, v0: Mapping[int, int]) -> list[str | None]:
    """Each member learns whether it is ``self``, ``ancestor``, ``descendant`` or ``neither`` of v0.

    Needs DFS intervals attached to the context (``ctx.pre``, ``ctx.size``);
    the source broadcasts its interval and everyone compares locally.
    """
    if ctx.pre is None or ctx.size is None:
        raise ValueError("relation_to needs DFS intervals on the context")
    for p, s in v0.items():
        if s < 0 or s >= ctx.graph.n or ctx.part_of[s] != p:
            raise NodeNotInPart(f"node {s} is not in part {p}")
    pre, size = ctx.pre, ctx.size
    got = broadcast_within_part(ctx, {p: (s, (pre[s], size[s])) for p, s in v0.items()})
    out: list[str | None] = [None] * ctx.graph.n
    for v in ctx.members:
        if got[v] is None:
            continue
        a, sz = got[v]
        if v == v0[ctx.part_of[v]]:
            out[v] = "self"
        elif a <= pre[v] < a + sz:
            out[v] = "descendant"
        elif pre[v] <= a < pre[v] + size[v]:
            out[v] = "ancestor"
        else:
            out[v] = "neither"
    return out


def neighbor_exchange(
    ctx: PartContext, values: Sequence[Value], *, scope: str = "part"
) -> list[dict[int, Value]]:
    """One round in which every member sends its value to its neighbours.

    ``scope="part"`` restricts to neighbours in the same part, ``"all"``
    reaches every graph neighbour that is a member.  A dict value sends a
    different word to each neighbour (missing keys send ``None``).
    """
    g = ctx.graph
    n = g.n
    targets: dict[int, tuple[int, ...]] = {}
    for v in ctx.members:
        if scope == "part":
            targets[v] = tuple(y for y in g.rotations[v] if ctx.part_of[y] == ctx.part_of[v])
        else:
            targets[v] = tuple(y for y in g.rotations[v] if ctx.part_of[y] >= 0)
    out: list[dict[int, Value]] = [dict() for _ in range(n)]
    if ctx.literal:
        data = {v: (targets[v], values[v]) for v in ctx.members}
        res = ctx._run("neighbor_exchange", _Exchange(), data)
        for v in ctx.members:
            out[v] = res[v]
        return out
    # one genuine round; charged at cost 1 rather than as an aggregation
    ctx.meter.add_charge("neighbor_exchange", 1)
    for v in ctx.members:
        val = values[v]
        for y in targets[v]:
            out[y][v] = val.get(y) if isinstance(val, dict) else val
    return out


def orient_forest(
    graph: PlanarGraph,
    tree_nbrs: Sequence[Sequence[int]],
    roots: Sequence[int],
    members: Sequence[int],
    cfg: SimConfig,
    meter: CostMeter,
    *,
    diameter: int = 1,
    n_budget: int | None = None,
) -> tuple[list[int], list[int], list[int]]:
    """Parent, depth and root arrays for a forest given by adjacency lists and roots."""
    n = graph.n
    parent = [-1] * n
    depth = [-1] * n
    root_of = [-1] * n
    root_set = set(roots)
    if cfg.mode == "literal":
        data = {v: (tuple(tree_nbrs[v]), v in root_set) for v in members}
        rep = run(graph, _Orient(), cfg, data=data, nodes=members, budget_n=n_budget or n)
        meter.add_run("orient_forest", rep)
        for v in members:
            p, d, r = rep.outputs[v]
            parent[v] = p
            depth[v] = -1 if d is None else d
            root_of[v] = -1 if r is None else r
        return parent, depth, root_of
    charge_primitive(meter, "orient_forest", diameter, n_budget or n, cfg.charge_alpha)
    for r in roots:
        depth[r] = 0
        root_of[r] = r
        q = deque([r])
        while q:
            x = q.popleft()
            for y in tree_nbrs[x]:
                if depth[y] < 0:
                    depth[y] = depth[x] + 1
                    parent[y] = x
                    root_of[y] = r
                    q.append(y)
    return parent, depth, root_of
