"""Fundamental edges of a rooted tree and the faces they close.

Positions are the doubled rotation positions of :mod:`tree_toolkit`: real
neighbours sit at even numbers, a virtual edge end sits at an odd number
between two real neighbours.  Every border node of a fundamental face gets
an open *sector* of positions; its neighbours inside the sector lie inside
the face.  The inside is always the side away from the virtual root r0,
which occupies position 0 at the tree root just as the parent does
elsewhere.

Clockwise storage mirrors the drawing convention of the orientation
definition, so the left case (scored with left DFS positions) is the one
where the edge end at ``u`` comes *after* the tree child ``z``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import EmptySet, IsTreeEdge, NotALeaf, NotInside, PreconditionNotContained
from .primitives import ancestor_sum, broadcast_within_part, find_extreme, neighbor_exchange, partwise_aggregate, relation_to
from .tree_toolkit import RootedTree, mark_path

NON_ANCESTOR = "non_ancestor"
LEFT = "ancestor_left"
RIGHT = "ancestor_right"
LOOP = "loop"


@dataclass(frozen=True)
class FundamentalEdge:
    """A non-tree node pair with the positions of its two ends.

    ``u`` precedes ``v`` in the left DFS order.  ``z`` is the child of ``u``
    toward ``v`` when ``u`` is an ancestor of ``v``; ``w`` is their lowest
    common ancestor.
    """

    u: int
    v: int
    pu: int
    pv: int
    kind: str
    case: str
    z: int | None
    w: int

    @property
    def key(self) -> tuple[int, int]:
        return (self.u, self.v)

    @property
    def order(self) -> str:
        return "r" if self.case == RIGHT else "l"


def classify(tree: RootedTree, a: int, b: int, pa: int | None = None, pb: int | None = None) -> FundamentalEdge:
    """Normalize and classify ``a-b``; positions given means a virtual edge."""
    if pa is None or pb is None:
        if a == b or not tree.graph.has_edge(a, b):
            raise ValueError(f"{a}-{b} is not an edge; give positions for a virtual edge")
        if tree.parent[a] == b or tree.parent[b] == a:
            raise IsTreeEdge(f"{a}-{b} is a tree edge")
        pa, pb = tree.tpos[a][b], tree.tpos[b][a]
        kind = "real"
    else:
        kind = "virtual"
    if a == b:
        lo, hi = sorted((pa, pb))
        return FundamentalEdge(a, a, lo, hi, kind, LOOP, None, a)
    if tree.pil[a] > tree.pil[b]:
        a, b, pa, pb = b, a, pb, pa
    if tree.is_anc(a, b):
        z = tree.child_toward(a, b)
        case = LEFT if tree.tpos[a][z] < pa else RIGHT
        return FundamentalEdge(a, b, pa, pb, kind, case, z, a)
    return FundamentalEdge(a, b, pa, pb, kind, NON_ANCESTOR, None, tree.lca_seq(a, b))


def real_fundamental_edges(tree: RootedTree) -> list[FundamentalEdge]:
    out = []
    for a, b in tree.graph.edges():
        if tree.parent[a] != b and tree.parent[b] != a:
            out.append(classify(tree, a, b))
    out.sort(key=lambda f: f.key)
    return out


# -- sectors and counts ----------------------------------------------------------


def sectors(tree: RootedTree, fe: FundamentalEdge, path: Sequence[int] | None = None) -> dict[int, tuple[int, int]]:
    """Open inside sector of every border node, keyed by node."""
    u, v = fe.u, fe.v
    tp = tree.tpos
    big = tree.big
    if fe.case == LOOP:
        return {u: (fe.pu, fe.pv)}
    if path is None:
        path = tree.path_seq(u, v)
    out: dict[int, tuple[int, int]] = {}
    if fe.case == NON_ANCESTOR:
        w = fe.w
        i = path.index(w)
        up, down = path[:i], path[i + 1 :]
        out[w] = (tp[w][down[0]], tp[w][up[-1]])
        out[u] = (0, fe.pu)
        for k in range(1, len(up)):
            x = up[k]
            out[x] = (0, tp[x][up[k - 1]])
        out[v] = (fe.pv, big(v))
        for k in range(len(down) - 1):
            x = down[k]
            out[x] = (tp[x][down[k + 1]], big(x))
        return out
    z = fe.z
    left = fe.case == LEFT
    out[u] = (tp[u][z], fe.pu) if left else (fe.pu, tp[u][z])
    for k in range(1, len(path) - 1):
        x, nxt = path[k], path[k + 1]
        out[x] = (tp[x][nxt], big(x)) if left else (0, tp[x][nxt])
    out[v] = (fe.pv, big(v)) if left else (0, fe.pv)
    return out


def sector_children(tree: RootedTree, x: int, sector: tuple[int, int]) -> list[int]:
    lo, hi = sector
    return [c for c in tree.children[x] if lo < tree.tpos[x][c] < hi]


def p_count(tree: RootedTree, x: int, sector: tuple[int, int]) -> int:
    """Nodes of ``T_x - x`` hanging inside the sector (children subtrees)."""
    return sum(tree.size[c] for c in sector_children(tree, x, sector))


def _end_sectors(tree: RootedTree, fe: FundamentalEdge) -> tuple[tuple[int, int], tuple[int, int]]:
    """Sectors at ``u`` and ``v`` without walking the path."""
    u, v = fe.u, fe.v
    if fe.case == LOOP:
        return (fe.pu, fe.pv), (fe.pu, fe.pv)
    if fe.case == NON_ANCESTOR:
        return (0, fe.pu), (fe.pv, tree.big(v))
    z = tree.tpos[u][fe.z]
    if fe.case == LEFT:
        return (z, fe.pu), (fe.pv, tree.big(v))
    return (fe.pu, z), (0, fe.pv)


def counts(tree: RootedTree, fe: FundamentalEdge) -> tuple[int, int, int]:
    """``(weight, inside count, border size)`` from positions, depths and sizes."""
    u, v = fe.u, fe.v
    su, sv = _end_sectors(tree, fe)
    if fe.case == LOOP:
        x = p_count(tree, u, su)
        return x, x, 1
    pu, pv = p_count(tree, u, su), p_count(tree, v, sv)
    d = tree.depth
    if fe.case == NON_ANCESTOR:
        w = fe.w
        inside = pu + pv + tree.pil[v] - tree.pil[u] - tree.size[u] - (d[v] - d[w] - 1)
        weight = pu + pv + tree.pil[v] - (tree.pil[u] + tree.size[u] - 1) + 1
        return weight, inside, d[u] + d[v] - 2 * d[w] + 1
    pi = tree.pil if fe.case == LEFT else tree.pir
    z = fe.z
    inside = pu + pv + (pi[v] - pi[z]) - (d[v] - d[z])
    return inside, inside, d[v] - d[u] + 1


def weight(tree: RootedTree, fe: FundamentalEdge) -> int:
    return counts(tree, fe)[0]


def region_count(tree: RootedTree, a: int, pa: int, b: int, pb: int) -> tuple[int, int]:
    """Inside count and border size of the cycle path(a, b) + virtual edge."""
    _, inside, border = counts(tree, classify(tree, a, b, pa, pb))
    return inside, border


# -- membership --------------------------------------------------------------------


@dataclass
class FaceHandle:
    """A fundamental face with its border, weight and interval membership test."""

    edge: FundamentalEdge
    path: list[int]
    border: frozenset[int]
    sectors: dict[int, tuple[int, int]]
    weight: int
    inside_count: int
    main: tuple[str, int, int] | None
    kid_ranges: list[tuple[int, int]] = field(default_factory=list)

    def is_inside(self, tree: RootedTree, x: int) -> bool:
        if x in self.border:
            return False
        if self.main is not None:
            order, lo, hi = self.main
            pi = tree.pil if order == "l" else tree.pir
            if lo < pi[x] < hi:
                return True
        p = tree.pil[x]
        return any(lo <= p <= hi for lo, hi in self.kid_ranges)

    def is_closed(self, tree: RootedTree, x: int) -> bool:
        return x in self.border or self.is_inside(tree, x)

    def contains(self, tree: RootedTree, f: FundamentalEdge) -> bool:
        """Is the fundamental edge ``f`` drawn within this face (closed region)?"""
        if f.key == self.edge.key and f.pu == self.edge.pu and f.pv == self.edge.pv:
            return False
        a, b = f.u, f.v
        if a not in self.border:
            return self.is_inside(tree, a)
        if b not in self.border:
            return self.is_inside(tree, b)
        lo, hi = self.sectors[a]
        return lo < f.pu < hi


def _kid_range(tree: RootedTree, x: int, sector: tuple[int, int]) -> tuple[int, int] | None:
    kids = sector_children(tree, x, sector)
    if not kids:
        return None
    lo = min(tree.pil[c] for c in kids)
    hi = max(tree.pil[c] + tree.size[c] - 1 for c in kids)
    return lo, hi


def face(tree: RootedTree, fe: FundamentalEdge) -> FaceHandle:
    """Sequential face construction (twin of :func:`detect_face`)."""
    u, v = fe.u, fe.v
    path = [u] if fe.case == LOOP else tree.path_seq(u, v)
    sec = sectors(tree, fe, path)
    w, inside, _ = counts(tree, fe)
    if fe.case == LOOP:
        main = None
    elif fe.case == NON_ANCESTOR:
        main = ("l", tree.pil[u] + tree.size[u] - 1, tree.pil[v])
    else:
        pi = tree.pil if fe.case == LEFT else tree.pir
        main = (fe.order, pi[fe.z], pi[v])
    ranges = []
    for x in {u, v}:
        r = _kid_range(tree, x, sec[x])
        if r is not None:
            ranges.append(r)
    return FaceHandle(fe, list(path), frozenset(path), sec, w, inside, main, ranges)


def inside_mask(tree: RootedTree, fh: FaceHandle) -> np.ndarray:
    pil, pir = _orders(tree)
    mask = np.zeros(tree.n, dtype=bool)
    if fh.main is not None:
        order, lo, hi = fh.main
        pi = pil if order == "l" else pir
        mask |= (pi > lo) & (pi < hi)
    for lo, hi in fh.kid_ranges:
        mask |= (pil >= lo) & (pil <= hi)
    mask[list(fh.border)] = False
    return mask


def _orders(tree: RootedTree) -> tuple[np.ndarray, np.ndarray]:
    cached = getattr(tree, "_np_orders", None)
    if cached is None:
        cached = (np.asarray(tree.pil), np.asarray(tree.pir))
        tree._np_orders = cached
    return cached


# -- distributed subroutines ----------------------------------------------------------


def compute_weights(tree: RootedTree) -> dict[tuple[int, int], tuple[FundamentalEdge, int]]:
    """Endpoints of every real fundamental edge learn its weight.

    Neighbours swap DFS positions, depths and sizes, then each endpoint
    sends its own ``p`` for that particular edge; the formula is local.
    """
    ctx = tree.ctx
    n = tree.n
    for vals in (tree.pil, tree.pir, tree.depth, tree.size):
        neighbor_exchange(ctx, list(vals))
    edges = real_fundamental_edges(tree)
    per_edge: list[dict[int, int]] = [dict() for _ in range(n)]
    for fe in edges:
        su, sv = _end_sectors(tree, fe)
        per_edge[fe.u][fe.v] = p_count(tree, fe.u, su)
        per_edge[fe.v][fe.u] = p_count(tree, fe.v, sv)
    neighbor_exchange(ctx, per_edge)
    return {fe.key: (fe, weight(tree, fe)) for fe in edges}


def detect_face(tree: RootedTree, fe: FundamentalEdge) -> tuple[list[str], FaceHandle]:
    """Every node learns whether it is on the border, inside or outside.

    The border comes from :func:`mark_path`; ``u`` and ``v`` then broadcast
    the interval bounds (their inside child ranges and the main interval),
    which every node compares with its own positions.
    """
    fh = face(tree, fe)
    if fe.case != LOOP:
        marked = mark_path(tree, fe.u, fe.v)
        assert marked == fh.border
    for r in (fh.kid_ranges or [(0, 0)]):
        broadcast_within_part(tree.ctx, {0: (fe.u, r)})
    labels = []
    for x in range(tree.n):
        if x in fh.border:
            labels.append("border")
        elif fh.is_inside(tree, x):
            labels.append("inside")
        else:
            labels.append("outside")
    return labels, fh


class FaceTable:
    """Faces of all real fundamental edges of one tree, with bulk masks."""

    def __init__(self, tree: RootedTree, edges: Sequence[FundamentalEdge] | None = None) -> None:
        self.tree = tree
        self.edges = list(edges) if edges is not None else real_fundamental_edges(tree)
        self.index = {fe.key: i for i, fe in enumerate(self.edges)}
        self.faces = [face(tree, fe) for fe in self.edges]
        m, n = len(self.edges), tree.n
        self.inside = np.zeros((m, n), dtype=bool)
        self.border = np.zeros((m, n), dtype=bool)
        for i, fh in enumerate(self.faces):
            self.inside[i] = inside_mask(tree, fh)
            self.border[i, fh.path] = True
        self.closed = self.inside | self.border
        self.eu = np.array([fe.u for fe in self.edges], dtype=np.int64)
        self.ev = np.array([fe.v for fe in self.edges], dtype=np.int64)
        self.weights = np.array([fh.weight for fh in self.faces], dtype=np.int64)

    def contained_in(self, i: int) -> np.ndarray:
        """Mask of edges drawn within face ``i`` (itself excluded)."""
        if not len(self.edges):
            return np.zeros(0, dtype=bool)
        closed, border = self.closed[i], self.border[i]
        ok = closed[self.eu] & closed[self.ev]
        both = np.nonzero(ok & border[self.eu] & border[self.ev])[0]
        fh = self.faces[i]
        for j in both:
            f = self.edges[j]
            lo, hi = fh.sectors[f.u]
            ok[j] = lo < f.pu < hi
        ok[i] = False
        return ok

    def hidden_mask(self, i: int) -> np.ndarray:
        """Nodes inside face ``i`` that some contained real edge hides from ``u``."""
        tree = self.tree
        fh = self.faces[i]
        u = fh.edge.u
        kids = sector_children(tree, u, fh.sectors[u])
        sub = np.nonzero(self.contained_in(i))[0]
        hidden = np.zeros(tree.n, dtype=bool)
        for j in sub:
            f = self.edges[j]
            if u not in (f.u, f.v) or not all(self.closed[j, c] for c in kids):
                hidden |= self.inside[j]
        return hidden & self.inside[i]

    def hiders(self, i: int, z: int) -> list[FundamentalEdge]:
        tree = self.tree
        fh = self.faces[i]
        u = fh.edge.u
        kids = sector_children(tree, u, fh.sectors[u])
        out = []
        for j in np.nonzero(self.contained_in(i))[0]:
            if not self.inside[j, z]:
                continue
            f = self.edges[j]
            if u not in (f.u, f.v) or not all(self.closed[j, c] for c in kids):
                out.append(f)
        return out


def face_table(tree: RootedTree) -> FaceTable:
    table = getattr(tree, "_face_table", None)
    if table is None:
        table = FaceTable(tree)
        tree._face_table = table
    return table


def hidden_edges(tree: RootedTree, fe: FundamentalEdge, z: int) -> set[tuple[int, int]]:
    """Real fundamental edges inside ``F_e`` that hide the leaf ``z`` from ``u``.

    An edge ``f`` hides ``z`` when ``z`` is inside ``F_f`` and either ``f``
    avoids ``u`` or ``F_f`` leaves out a tree child of ``u`` that lies
    inside ``F_e``.  Every node learns ``z``'s positions by broadcast and
    the endpoints of each candidate decide locally; one aggregation tells
    the part whether anything hides ``z``.
    """
    if tree.children[z]:
        raise NotALeaf(f"node {z} has children")
    table = face_table(tree)
    if fe.key in table.index and fe.kind == "real":
        i = table.index[fe.key]
    else:
        table = FaceTable(tree, table.edges + [fe])
        i = len(table.edges) - 1
    if not table.inside[i, z]:
        raise NotInside(f"node {z} is not inside the face of {fe.u}-{fe.v}")
    ctx = tree.ctx
    broadcast_within_part(ctx, {0: (z, (tree.pil[z], tree.pir[z]))})
    found = table.hiders(i, z)
    flags = [None] * tree.n
    for f in found:
        flags[f.u] = 1
    partwise_aggregate(ctx, "max", flags)
    return {f.key for f in found}


def _announce(tree: RootedTree, keys: Sequence[tuple[int, int] | None]) -> int | None:
    """Min-key node of the part, followed by a broadcast of its choice."""
    ctx = tree.ctx
    best = find_extreme(ctx, "min", list(keys))[0]
    if best is not None:
        broadcast_within_part(ctx, {0: (best, keys[best])})
    return best


def _select(tree: RootedTree, edges: Sequence[FundamentalEdge], weights: dict, minimal: bool) -> FundamentalEdge:
    if not edges:
        raise EmptySet("no candidate edges")
    table = face_table(tree)
    pool = {fe.key: fe for fe in edges}

    def pick(cands: Iterable[FundamentalEdge]) -> FundamentalEdge:
        # one aggregation: the endpoint u of each candidate offers (±weight, v)
        keys: list = [None] * tree.n
        for fe in cands:
            k = (weights[fe.key] if minimal else 2 * tree.n - weights[fe.key], fe.v)
            if keys[fe.u] is None or k < keys[fe.u]:
                keys[fe.u] = k
        x = _announce(tree, keys)
        return pool[(x, keys[x][1])]

    cur = pick(edges)
    for _ in range(len(edges)):
        i = table.index[cur.key]
        if minimal:
            inner = [pool[table.edges[j].key] for j in np.nonzero(table.contained_in(i))[0] if table.edges[j].key in pool]
            detect_face(tree, cur)
            if not inner:
                return cur
            cur = pick(inner)
        else:
            outer = [
                fe for fe in edges if fe.key != cur.key and table.contained_in(table.index[fe.key])[i]
            ]
            detect_face(tree, cur)
            if not outer:
                return cur
            cur = pick(outer)
    raise AssertionError("containment is not acyclic")


def select_not_contained(tree: RootedTree, edges: Sequence[FundamentalEdge], weights: dict) -> FundamentalEdge:
    """A member whose face contains no other member (minimal under containment)."""
    return _select(tree, edges, weights, minimal=True)


def select_not_contains(tree: RootedTree, edges: Sequence[FundamentalEdge], weights: dict) -> FundamentalEdge:
    """A member contained in no other member's face (maximal under containment)."""
    return _select(tree, edges, weights, minimal=False)


# -- augmentation -------------------------------------------------------------------------


def hug_position(fe: FundamentalEdge) -> int:
    """Position at ``u`` of a virtual edge drawn right next to ``e`` on the inside."""
    return fe.pu + 1 if fe.case == RIGHT else fe.pu - 1


def far_position(tree: RootedTree, fe: FundamentalEdge, x: int) -> int:
    """Position at ``x`` that puts every child of ``x`` inside the new face."""
    return tree.big(x) - 1 if fe.case == RIGHT else 1


def augmentation_edge(tree: RootedTree, fe: FundamentalEdge, x: int) -> FundamentalEdge:
    return classify(tree, fe.u, x, hug_position(fe), far_position(tree, fe, x))


def full_augmentation_weights(tree: RootedTree, fh: FaceHandle) -> dict[int, int]:
    """``ω(F^ℓ_{ux})`` for every node ``x`` inside ``F_e``.

    ``u`` broadcasts its positions, every node learns which child of ``u``
    it descends from, and an ancestor sum hands it the sizes that ``p(u)``
    needs; the formula is then local.
    """
    tree_ctx = tree.ctx
    fe = fh.edge
    broadcast_within_part(tree_ctx, {0: (fe.u, (tree.pil[fe.u], tree.size[fe.u]))})
    relation_to(tree_ctx, {0: fe.u})
    ancestor_sum(tree_ctx, "sum", [0] * tree.n)
    out = {}
    mask = inside_mask(tree, fh)
    for x in np.nonzero(mask)[0]:
        x = int(x)
        out[x] = weight(tree, augmentation_edge(tree, fe, x))
    return out


def promote_leaf(tree: RootedTree, fe: FundamentalEdge, x: int) -> int:
    """Descendant leaf of ``x`` with the greatest left (or right) position."""
    pi = tree.pir if fe.case == RIGHT else tree.pil
    target = pi[x] + tree.size[x] - 1
    y = x
    while tree.children[y]:
        y = max(tree.children[y], key=lambda c: pi[c])
    assert pi[y] == target
    return y


# -- outside split ----------------------------------------------------------------------------


def outside_partitions(tree: RootedTree, fh: FaceHandle, table: FaceTable | None = None) -> tuple[int, int]:
    """``(|F_l|, |F_r|)``: nodes outside the closed face before and after ``v`` in left order.

    Requires that no other real fundamental face contains ``e``.  Each
    node tests itself locally and two part-wise sums collect the counts.
    """
    table = table or face_table(tree)
    fe = fh.edge
    i = table.index.get(fe.key)
    if i is not None:
        for j in range(len(table.edges)):
            if j != i and table.contained_in(j)[i]:
                raise PreconditionNotContained(f"{fe.u}-{fe.v} lies in the face of {table.edges[j].key}")
    mask = inside_mask(tree, fh)
    mask[list(fh.border)] = True
    pil = np.asarray(tree.pil)
    left = (~mask) & (pil < tree.pil[fe.v])
    right = (~mask) & (pil > tree.pil[fe.v])
    ctx = tree.ctx
    a = partwise_aggregate(ctx, "sum", [int(b) for b in left])[tree.root]
    b = partwise_aggregate(ctx, "sum", [int(b) for b in right])[tree.root]
    return a, b


def outside_closed_forms(tree: RootedTree, fe: FundamentalEdge) -> tuple[int, int]:
    """The closed forms ``π_l(u) - d(u) + p_u(v)`` and ``π_r(v) - d(v) + p_v(u)``.

    ``p_u(v)`` is read as the part of ``T_u - u`` outside the face (and
    symmetrically for ``v``).  Kept for comparison with the exact counts.
    """
    su, sv = _end_sectors(tree, fe)
    out_u = tree.size[fe.u] - 1 - p_count(tree, fe.u, su)
    out_v = tree.size[fe.v] - 1 - p_count(tree, fe.v, sv)
    if fe.case != NON_ANCESTOR:
        # the path child z is on the border, not outside
        out_u -= tree.size[fe.z]
    return (
        tree.pil[fe.u] - tree.depth[fe.u] + out_u,
        tree.pir[fe.v] - tree.depth[fe.v] + out_v,
    )


# -- corners ----------------------------------------------------------------------------------


def corner_of(tree: RootedTree, x: int, p: int) -> tuple[int, int]:
    """``(after, rank)`` of the odd position ``p`` at ``x``: the neighbour it follows clockwise.

    At the tree root the r0 slot splits the corner after ``r0_after``: rank
    1 lands after r0, rank -1 before it.
    """
    if p % 2 == 0:
        raise ValueError("virtual ends sit at odd positions")
    if x == tree.root and tree.r0_after is not None:
        if p == 1:
            return tree.r0_after, 1
        if p == 2 * len(tree.graph.rotations[x]) + 1:
            return tree.r0_after, -1
    inv = {q: y for y, q in tree.tpos[x].items()}
    last = max(inv)
    return inv[min(p - 1, last)], 1


def corner_position(tree: RootedTree, x: int, after: int) -> int:
    """Odd position of the corner at ``x`` clockwise after neighbour ``after``."""
    return tree.tpos[x][after] + 1
