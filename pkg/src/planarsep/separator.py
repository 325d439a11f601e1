"""Cycle separators for every part of a partition, with checkable witnesses.

Each part is handled on its own local graph and spanning tree.  The phases
are tried in order and exactly one fires:

* ``tree_centroid``: the part has no real fundamental edge; mark the root
  to a node whose subtree holds between a third and two thirds of the part.
* ``balanced_real``: some real fundamental edge has weight in range.
* ``aug_compatible`` / ``aug_hidden_detour``: a heavy edge exists.  Take a
  heavy edge whose face holds no other heavy edge and place virtual edges
  from ``u`` into its face, first at a promoted leaf and then fanning along
  the face next to ``e`` until the closed region reaches a third.
* ``small_weights_path`` / ``outer_rehang``: every weight is below a third.
  Take an edge contained in no other face; its path works when little is
  left outside, otherwise fan from the root along the outer face.

Every result is checked against the balance oracle before it is returned.
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Sequence

from .errors import InternalWitnessMismatch, NotACycle, NotPlanarEmbedding
from .face_geometry import (
    FundamentalEdge,
    classify,
    compute_weights,
    corner_of,
    face,
    full_augmentation_weights,
    hidden_edges,
    hug_position,
    promote_leaf,
    region_count,
    select_not_contained,
    select_not_contains,
)
from .oracle_verify import (
    Insertion,
    Verdict,
    check_separator,
    oracle_dfs_orders,
    oracle_regions,
    tree_path,
)
from .planar_core import Partition, PlanarGraph, induced
from .primitives import broadcast_within_part, find_extreme, find_in_range, partwise_aggregate
from .tree_toolkit import RootedTree, RunEnv, build_part_trees, mark_path

PHASES = (
    "tree_centroid",
    "balanced_real",
    "aug_compatible",
    "aug_hidden_detour",
    "small_weights_path",
    "outer_rehang",
)


@dataclass
class SeparatorWitness:
    """How the separator of one part was found, in global node ids.

    ``corners`` holds the ``(after, rank)`` placement of both ends of a
    virtual edge (see :class:`oracle_verify.Insertion`).  ``parent`` is the
    part tree, so the witness can be audited without rerunning anything.
    """

    part: int
    phase: str
    edge_kind: str
    edge: tuple[int, int] | None
    corners: tuple[tuple[int | None, int], tuple[int | None, int]] | None
    endpoints: tuple[int, int]
    S: list[int]
    weight: int | None
    root: int
    r0_after: int | None
    parent: dict[int, int | None] = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["parent"] = {str(k): v for k, v in sorted(self.parent.items())}
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "SeparatorWitness":
        corners = d.get("corners")
        return cls(
            part=int(d["part"]),
            phase=d["phase"],
            edge_kind=d["edge_kind"],
            edge=None if d.get("edge") is None else tuple(d["edge"]),
            corners=None if corners is None else (tuple(corners[0]), tuple(corners[1])),
            endpoints=tuple(d["endpoints"]),
            S=[int(x) for x in d["S"]],
            weight=d.get("weight"),
            root=int(d["root"]),
            r0_after=d.get("r0_after"),
            parent={int(k): v for k, v in d.get("parent", {}).items()},
        )


def witnesses_to_json(ws: dict[int, SeparatorWitness]) -> str:
    return json.dumps([ws[p].to_dict() for p in sorted(ws)], sort_keys=True, separators=(",", ":"))


def witnesses_from_json(text: str) -> dict[int, SeparatorWitness]:
    out = {}
    for d in json.loads(text):
        w = SeparatorWitness.from_dict(d)
        out[w.part] = w
    return out


# -- per-part search ----------------------------------------------------------------


@dataclass
class _Choice:
    """A separator in local ids, before it is turned into a witness."""

    phase: str
    a: int
    b: int
    kind: str  # real, virtual or none
    pa: int | None = None
    pb: int | None = None
    weight: int | None = None


def _balanced(n: int, inside: int, border: int) -> bool:
    return 3 * inside <= 2 * n and 3 * (n - inside - border) <= 2 * n


def _in_range(n: int, w: int) -> bool:
    return n <= 3 * w <= 2 * n


def _dart_faces(tree: RootedTree) -> dict[tuple[int, int], int]:
    cached = getattr(tree, "_dart_faces", None)
    if cached is None:
        g = tree.graph
        cached = {}
        for d0 in ((u, v) for u in range(g.n) for v in g.rotations[u]):
            if d0 in cached:
                continue
            f = len(cached)
            d = d0
            while d not in cached:
                cached[d] = f
                d = g.next_dart(d)
        tree._dart_faces = cached
    return cached


def _corners(tree: RootedTree, x: int) -> list[tuple[int, int]]:
    """``(face id, odd position)`` of every corner at ``x``."""
    faces = _dart_faces(tree)
    return [(faces[(a, x)], tree.tpos[x][a] + 1) for a in tree.graph.rotations[x]]


def _face_walk(tree: RootedTree, start: tuple[int, int]) -> list[tuple[int, int]]:
    """Darts of the face through ``start``, beginning with it."""
    out = [start]
    d = tree.graph.next_dart(start)
    while d != start:
        out.append(d)
        d = tree.graph.next_dart(d)
    return out


def _tree_centroid(tree: RootedTree) -> _Choice:
    n = tree.n
    ctx = tree.ctx
    hit = find_in_range(ctx, tree.size, {0: (Fraction(n, 3), Fraction(2 * n, 3))})[0]
    if hit is None:
        # no subtree in range: the deepest node with a third of the part
        keys = [(tree.depth[x], n - 1 - x) if 3 * tree.size[x] >= n else None for x in range(n)]
        hit = find_extreme(ctx, "max", keys)[0]
    return _Choice("tree_centroid", tree.root, hit, "none")


def _fan(
    tree: RootedTree,
    hub: int,
    hub_pos: int,
    walk: Sequence[tuple[int, int]],
    phase: str,
    weights: dict,
) -> _Choice | None:
    """Fan virtual edges from ``hub`` over the corners of one face.

    ``walk`` lists the darts ``(prev, x)`` arriving at the corners in sweep
    order.  The first corner whose closed region reaches a third of the part
    wins; if its inside overshoots two thirds, the real edge just crossed is
    used instead (its own inside is small and so is everything outside it).
    """
    n = tree.n
    step_kinds = []
    for prev, x in walk:
        pos = tree.tpos[x][prev] + 1
        inside, border = region_count(tree, hub, hub_pos, x, pos)
        step_kinds.append((prev, x, pos, inside, border))
    ctx = tree.ctx
    # every corner node evaluates its region locally; the first crossing is one aggregation
    keys = [None] * n
    first = None
    for i, (prev, x, pos, inside, border) in enumerate(step_kinds):
        if 3 * (inside + border) >= n:
            first = i
            break
    for i, (_, x, _, inside, border) in enumerate(step_kinds):
        if 3 * (inside + border) >= n and (keys[x] is None or i < keys[x]):
            keys[x] = i
    find_extreme(ctx, "min", keys)
    if first is None:
        return None
    prev, x, pos, inside, border = step_kinds[first]
    tree_step = tree.parent[x] == prev or tree.parent[prev] == x
    if 3 * inside <= 2 * n:
        label = phase if phase == "outer_rehang" else ("aug_compatible" if tree_step else "aug_hidden_detour")
        return _Choice(label, hub, x, "virtual", hub_pos, pos)
    if tree_step:
        return None
    fe = classify(tree, prev, x)
    label = phase if phase == "outer_rehang" else "aug_hidden_detour"
    return _Choice(label, fe.u, fe.v, "real", weight=weights[fe.key][1])


def _inner_walk(tree: RootedTree, fe: FundamentalEdge) -> tuple[int, list[tuple[int, int]]]:
    """Hub position at ``u`` and the arriving darts of the face hugging ``e`` inside."""
    u, v = fe.u, fe.v
    pos = hug_position(fe)
    if pos < fe.pu:
        # corner between pred_u(v) and v lies on the face through u -> v, swept backwards
        darts = _face_walk(tree, (u, v))
        arrive = darts[:-1][::-1]
    else:
        arrive = _face_walk(tree, (u, tree.graph.succ(u, v)))[:-1]
    return pos, arrive


def _phase4(tree: RootedTree, heavy: list[FundamentalEdge], weights: dict) -> _Choice:
    n = tree.n
    wmap = {k: w for k, (_, w) in weights.items()}
    fe = select_not_contained(tree, heavy, wmap)
    fh = face(tree, fe)
    aug = full_augmentation_weights(tree, fh)
    vals = [aug.get(x) for x in range(n)]
    hit = find_in_range(tree.ctx, vals, {0: (Fraction(n, 3), Fraction(2 * n, 3))})[0]
    if hit is not None:
        t = promote_leaf(tree, fe, hit)
        if not hidden_edges(tree, fe, t):
            lo, hi = fh.sectors[fe.u]
            tfaces = {}
            for f, p in _corners(tree, t):
                tfaces.setdefault(f, p)
            broadcast_within_part(tree.ctx, {0: (t, (tree.pil[t], tree.pir[t]))})
            for f, p in _corners(tree, fe.u):
                if lo < p < hi and f in tfaces:
                    inside, border = region_count(tree, fe.u, p, t, tfaces[f])
                    if _balanced(n, inside, border):
                        return _Choice("aug_compatible", fe.u, t, "virtual", p, tfaces[f])
    pos, walk = _inner_walk(tree, fe)
    got = _fan(tree, fe.u, pos, walk, "aug", weights)
    if got is None:
        raise InternalWitnessMismatch(f"fan walk inside {fe.key} found no balanced corner")
    return got


def _phase5(tree: RootedTree, edges: list[FundamentalEdge], weights: dict) -> _Choice:
    n = tree.n
    wmap = {k: w for k, (_, w) in weights.items()}
    fe = select_not_contains(tree, edges, wmap)
    fh = face(tree, fe)
    outside = n - fh.inside_count - len(fh.path)
    partwise_aggregate(tree.ctx, "sum", [0] * n)
    if 3 * outside <= 2 * n:
        return _Choice("small_weights_path", fe.u, fe.v, "real", weight=wmap[fe.key])
    root, g = tree.root, tree.graph
    start = (root, g.succ(root, tree.r0_after))
    darts = _face_walk(tree, start)
    got = _fan(tree, root, 1, darts, "outer_rehang", weights)
    if got is None:
        raise InternalWitnessMismatch("outer fan walk found no balanced corner")
    return got


def separate_tree(tree: RootedTree) -> _Choice:
    """Pick the separator of one part (local ids)."""
    n = tree.n
    if n == 1:
        return _Choice("tree_centroid", 0, 0, "none")
    weights = compute_weights(tree)
    edges = [fe for fe, _ in weights.values()]
    if not edges:
        return _tree_centroid(tree)
    ctx = tree.ctx
    # every endpoint u offers its smallest-id edge in range
    offers: list = [None] * n
    for fe, w in sorted(weights.values(), key=lambda t: t[0].key):
        if _in_range(n, w) and offers[fe.u] is None:
            offers[fe.u] = fe.v
    hit = find_extreme(ctx, "min", [None if o is None else (x, o) for x, o in enumerate(offers)])[0]
    if hit is not None:
        fe, w = weights[(hit, offers[hit])]
        return _Choice("balanced_real", fe.u, fe.v, "real", weight=w)
    heavy = [fe for fe, w in weights.values() if 3 * w > 2 * n]
    if heavy:
        return _phase4(tree, heavy, weights)
    return _phase5(tree, edges, weights)


def _witness(tree: RootedTree, pid: int, ch: _Choice) -> SeparatorWitness:
    glob = tree.glob
    if ch.kind == "none":
        S = mark_path(tree, ch.a, ch.b) if ch.a != ch.b else {ch.a}
    elif ch.a == ch.b:
        S = {ch.a}
    else:
        S = mark_path(tree, ch.a, ch.b)
    corners = None
    if ch.kind == "virtual":
        ca, cb = corner_of(tree, ch.a, ch.pa), corner_of(tree, ch.b, ch.pb)
        corners = ((glob[ca[0]], ca[1]), (glob[cb[0]], cb[1]))
    return SeparatorWitness(
        part=pid,
        phase=ch.phase,
        edge_kind=ch.kind,
        edge=None if ch.kind == "none" else (glob[ch.a], glob[ch.b]),
        corners=corners,
        endpoints=(glob[ch.a], glob[ch.b]),
        S=sorted(glob[x] for x in S),
        weight=ch.weight,
        root=glob[tree.root],
        r0_after=None if tree.r0_after is None else glob[tree.r0_after],
        parent=tree.to_global_parent(),
    )


def separate_part(tree: RootedTree, pid: int = 0) -> SeparatorWitness:
    ch = separate_tree(tree)
    local_S = {ch.a} if ch.a == ch.b else set(tree.path_seq(ch.a, ch.b))
    verdict = check_separator(tree.graph, range(tree.n), local_S, tree.parent)
    if not verdict:
        raise InternalWitnessMismatch(f"part {pid}, phase {ch.phase}: {verdict.message}")
    return _witness(tree, pid, ch)


def compute_separators(
    g: PlanarGraph,
    partition: Partition | None = None,
    env: RunEnv | None = None,
    *,
    members: Sequence[int] | None = None,
    trees: dict[int, RootedTree] | None = None,
) -> dict[int, SeparatorWitness]:
    """Separator and witness for every part, all parts running side by side."""
    partition = partition or Partition.single(g.n)
    env = env or RunEnv(n_budget=g.n)
    if trees is None:
        trees = build_part_trees(g, partition, env, members=members)
    out: dict[int, SeparatorWitness] = {}
    with env.meter.parallel() as branch:
        for pid, tree in sorted(trees.items()):
            tree.env = env.branch(branch())
            tree._ctx = None
            out[pid] = separate_part(tree, pid)
    for tree in trees.values():
        tree.env = env
        tree._ctx = None
    return out


# -- audit ----------------------------------------------------------------------------


def _oracle_weight(lg: PlanarGraph, lpar: list[int], r0: int | None, a: int, b: int) -> int:
    inside = oracle_regions(lg, lpar, a, b, r0_after=r0)[0]
    pil, _ = oracle_dfs_orders(lg, lpar, r0)
    path = tree_path(lpar, a, b)
    if _is_anc(lpar, a, b) or _is_anc(lpar, b, a):
        return len(inside)
    v = a if pil[a] > pil[b] else b
    depth = _depths(lpar)
    w = min(path, key=lambda x: depth[x])
    return len(inside) + depth[v] - depth[w] + 1


def _is_anc(parent: Sequence[int], a: int, b: int) -> bool:
    x = b
    while x >= 0:
        if x == a:
            return True
        x = parent[x]
    return False


def _depths(parent: Sequence[int]) -> list[int]:
    out = [-1] * len(parent)
    for v in range(len(parent)):
        chain = []
        x = v
        while x >= 0 and out[x] < 0:
            chain.append(x)
            x = parent[x]
        d = -1 if x < 0 else out[x]
        for y in reversed(chain):
            d += 1
            out[y] = d
    return out


def verify_witness(
    g: PlanarGraph, partition: Partition, S: Sequence[int], w: SeparatorWitness
) -> Verdict:
    """Audit one part's separator; the verdict names the first violation."""
    if w.phase not in PHASES:
        return Verdict(False, f"unknown phase {w.phase!r}")
    if w.part not in partition.parts:
        return Verdict(False, f"unknown part {w.part}")
    part = sorted(partition.parts[w.part])
    pset = set(part)
    S = set(S)
    if set(w.parent) != pset:
        return Verdict(False, "witness tree does not span the part")
    lg, glob = induced(g, part)
    loc = {v: i for i, v in enumerate(glob)}
    lpar = []
    for v in glob:
        p = w.parent[v]
        if p is not None and (p not in loc or not lg.has_edge(loc[v], loc[p])):
            return Verdict(False, f"witness tree uses a non-edge at {v}")
        lpar.append(-1 if p is None else loc[p])
    if sum(1 for p in lpar if p < 0) != 1 or lpar[loc[w.root]] >= 0:
        return Verdict(False, "witness tree is not rooted at its root")
    a, b = w.endpoints
    if a not in loc or b not in loc:
        return Verdict(False, "endpoints leave the part")
    expect = {glob[x] for x in tree_path(lpar, loc[a], loc[b])}
    if S != expect:
        return Verdict(False, "separator is not the tree path between the endpoints")
    verdict = check_separator(g, part, S, {v: w.parent[v] for v in part})
    if not verdict:
        return verdict
    r0 = None if w.r0_after is None else loc.get(w.r0_after)
    la, lb = loc[a], loc[b]
    if w.edge_kind == "real":
        if w.edge is None or tuple(w.edge) != (a, b) or not lg.has_edge(la, lb):
            return Verdict(False, "witness edge is not an edge of the part")
        if lpar[la] == lb or lpar[lb] == la:
            return Verdict(False, "witness edge is a tree edge")
        if w.phase == "balanced_real":
            n = len(part)
            om = _oracle_weight(lg, lpar, r0, la, lb)
            if w.weight != om:
                return Verdict(False, f"recorded weight {w.weight} differs from recount {om}")
            if not _in_range(n, om):
                return Verdict(False, f"weight {om} is outside [n/3, 2n/3]")
    elif w.edge_kind == "virtual":
        if w.corners is None:
            return Verdict(False, "virtual edge without corners")
        ins = []
        for x, (after, rank) in zip((a, b), w.corners):
            if after is not None and after not in loc:
                return Verdict(False, "corner names a node outside the part")
            ins.append(Insertion(loc[x], None if after is None else loc[after], rank))
        try:
            oracle_regions(lg, lpar, la, lb, virtual=(ins[0], ins[1]), r0_after=r0)
        except (NotPlanarEmbedding, NotACycle) as exc:
            return Verdict(False, f"virtual edge does not insert planarly: {exc}")
    elif w.edge_kind == "none":
        if w.phase != "tree_centroid":
            return Verdict(False, "only the tree phase has no defining edge")
    else:
        return Verdict(False, f"unknown edge kind {w.edge_kind!r}")
    return Verdict(True)
