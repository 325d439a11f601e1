"""Sequential ground truth that shares no logic with the algorithm modules.

Inside/outside questions are answered by flood fill on the dual graph of a
dart-based copy of the embedding.  The copy can carry extra edges that the
simple :class:`PlanarGraph` cannot express: the virtual root r0 hung in a
corner of the tree root, and a virtual closing edge that may run parallel to
a real edge or form a loop.
"""
from __future__ import annotations

import bisect
import math
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import NotACycle, NotPlanarEmbedding, NotSpanning
from .planar_core import PlanarGraph


@dataclass(frozen=True)
class Insertion:
    """A new edge end at ``node`` placed clockwise right after neighbour ``after``.

    ``rank`` orders several new ends placed in the same corner: smaller ranks
    sit closer to ``after``.  The virtual root always has rank 0.
    ``after=None`` is only allowed at a node without neighbours.
    """

    node: int
    after: int | None
    rank: int = 1


@dataclass(frozen=True)
class Verdict:
    ok: bool
    message: str = ""

    def __bool__(self) -> bool:
        return self.ok


class DartGraph:
    """Rotation system over dart ids; supports loops and parallel edges."""

    def __init__(self, n: int) -> None:
        self.n = n
        self.head: list[int] = []
        self.tail: list[int] = []
        self.rot: list[list[int]] = [[] for _ in range(n)]

    def add_edge(self, a: int, b: int) -> int:
        e = len(self.head) // 2
        self.tail += [a, b]
        self.head += [b, a]
        return e

    @staticmethod
    def twin(d: int) -> int:
        return d ^ 1

    def faces(self) -> list[int]:
        """Face label per dart."""
        pos: dict[int, int] = {}
        for v in range(self.n):
            for i, d in enumerate(self.rot[v]):
                pos[d] = i
        face = [-1] * len(self.head)
        f = 0
        for d0 in range(len(self.head)):
            if face[d0] >= 0:
                continue
            d = d0
            while face[d] < 0:
                face[d] = f
                t = d ^ 1
                h = self.head[d]
                r = self.rot[h]
                d = r[(pos[t] + 1) % len(r)]
            f += 1
        self.nfaces = f
        return face


def _build(
    g: PlanarGraph,
    root: int | None,
    r0_after: int | None,
    extra: Sequence[tuple[Insertion, Insertion]] = (),
    edge_filter=None,
):
    """Dart copy of ``g`` plus r0 (node ``g.n``) and extra edges.

    Returns ``(dg, real_edge_id, extra_ids)``.
    """
    n = g.n
    dg = DartGraph(n + 1)
    eid: dict[tuple[int, int], int] = {}
    for u in range(n):
        for v in g.rotations[u]:
            if u < v and (edge_filter is None or edge_filter(u, v)):
                eid[(u, v)] = dg.add_edge(u, v)
    # place ends: base darts, then inserted ends by corner and rank
    corner_items: dict[tuple[int, int | None], list[tuple[int, int]]] = {}
    extra_ids = []
    if root is not None:
        e0 = dg.add_edge(root, n)
        corner_items.setdefault((root, r0_after), []).append((0, 2 * e0))
        dg.rot[n].append(2 * e0 + 1)
    for ia, ib in extra:
        e = dg.add_edge(ia.node, ib.node)
        extra_ids.append(e)
        corner_items.setdefault((ia.node, ia.after), []).append((ia.rank, 2 * e))
        corner_items.setdefault((ib.node, ib.after), []).append((ib.rank, 2 * e + 1))
    for v in range(n):
        out: list[int] = []
        items = corner_items.get((v, None), [])
        out.extend(d for _, d in sorted(items))
        for u in g.rotations[v]:
            key = (min(u, v), max(u, v))
            if key in eid:
                e = eid[key]
                out.append(2 * e if v < u else 2 * e + 1)
            out.extend(d for _, d in sorted(corner_items.get((v, u), [])))
        dg.rot[v] = out
    return dg, eid, extra_ids


def _check_euler(dg: DartGraph, face: list[int]) -> None:
    # count vertices that carry at least one dart plus isolated ones
    comp = list(range(dg.n))

    def find(x: int) -> int:
        while comp[x] != x:
            comp[x] = comp[comp[x]]
            x = comp[x]
        return x

    for d in range(0, len(dg.head), 2):
        a, b = find(dg.tail[d]), find(dg.head[d])
        if a != b:
            comp[a] = b
    roots = {find(v) for v in range(dg.n)}
    isolated = sum(1 for v in range(dg.n) if not dg.rot[v])
    v_cnt, e_cnt = dg.n, len(dg.head) // 2
    f_cnt = dg.nfaces + isolated
    if v_cnt - e_cnt + f_cnt != 2 * len(roots):
        raise NotPlanarEmbedding(f"Euler check failed: V={v_cnt} E={e_cnt} F={f_cnt} C={len(roots)}")


def tree_path(parent: Sequence[int], a: int, b: int) -> list[int]:
    """Nodes on the tree path from ``a`` to ``b`` by climbing parent links."""
    anc_a = []
    x = a
    while x >= 0:
        anc_a.append(x)
        x = parent[x]
    index = {x: i for i, x in enumerate(anc_a)}
    tail = []
    y = b
    while y not in index:
        tail.append(y)
        y = parent[y]
        if y < 0:
            raise NotACycle("nodes are not in the same tree")
    return anc_a[: index[y] + 1] + tail[::-1]


def default_r0_after(g: PlanarGraph, root: int) -> int | None:
    """Corner that hosts r0 when nobody says otherwise.

    The outer corner named by the witness if ``root`` is the anchor, otherwise
    the corner just before the first stored neighbour.
    """
    rot = g.rotations[root]
    if not rot:
        return None
    if root == g.outer[1] and g.outer[0] != root:
        return g.outer[0]
    return rot[-1]


def oracle_regions(
    g: PlanarGraph,
    parent: Sequence[int],
    a: int,
    b: int,
    *,
    virtual: tuple[Insertion, Insertion] | None = None,
    r0_after: int | None = None,
    use_default_r0: bool = True,
) -> tuple[frozenset[int], frozenset[int], list[int]]:
    """``(inside, outside, border)`` of the cycle tree-path(a, b) + closing edge.

    The closing edge is the real edge ``a-b`` unless ``virtual`` describes
    the two inserted ends.  The side that holds the virtual root is outside.
    """
    root = next(v for v in range(g.n) if parent[v] < 0)
    if use_default_r0 and r0_after is None:
        r0_after = default_r0_after(g, root)
    border = tree_path(parent, a, b)
    extra = [virtual] if virtual is not None else []
    dg, eid, extra_ids = _build(g, root, r0_after, extra)
    if virtual is None:
        key = (min(a, b), max(a, b))
        if a == b or key not in eid:
            raise NotACycle(f"{a}-{b} is not an edge")
        if parent[a] == b or parent[b] == a:
            raise NotACycle(f"{a}-{b} is a tree edge")
        closing = eid[key]
    else:
        closing = extra_ids[0]
    face = dg.faces()
    _check_euler(dg, face)
    cut = {closing}
    for x, y in zip(border, border[1:]):
        cut.add(eid[(min(x, y), max(x, y))])
    # dual adjacency across every non-cut edge
    nf = dg.nfaces
    adj: list[list[int]] = [[] for _ in range(nf)]
    for e in range(len(dg.head) // 2):
        if e in cut:
            continue
        f1, f2 = face[2 * e], face[2 * e + 1]
        adj[f1].append(f2)
        adj[f2].append(f1)
    r0 = g.n
    start = face[dg.rot[r0][0]]
    seen = [False] * nf
    seen[start] = True
    q = deque([start])
    while q:
        f = q.popleft()
        for h in adj[f]:
            if not seen[h]:
                seen[h] = True
                q.append(h)
    on_border = set(border)
    inside, outside = set(), set()
    for v in range(g.n):
        if v in on_border:
            continue
        if not dg.rot[v]:
            outside.add(v)
            continue
        if seen[face[dg.rot[v][0]]]:
            outside.add(v)
        else:
            inside.add(v)
    return frozenset(inside), frozenset(outside), border


def oracle_inside(g: PlanarGraph, parent: Sequence[int], a: int, b: int, **kw) -> frozenset[int]:
    """Nodes strictly inside the fundamental cycle closed by ``a-b``."""
    return oracle_regions(g, parent, a, b, **kw)[0]


def dual_graph(g: PlanarGraph) -> tuple[int, list[tuple[int, int, tuple[int, int]]]]:
    """Face count and dual edges ``(f1, f2, primal edge)``."""
    dg, eid, _ = _build(g, None, None)
    face = dg.faces()
    edges = [(face[2 * e], face[2 * e + 1], key) for key, e in sorted(eid.items())]
    return dg.nfaces, edges


# -- DFS orders ------------------------------------------------------------


def _positions(g: PlanarGraph, parent: Sequence[int], v: int, r0_after: int | None) -> dict[int, int]:
    rot = g.rotations[v]
    k = len(rot)
    if parent[v] >= 0:
        base = rot.index(parent[v])
        return {rot[(base + i) % k]: i for i in range(k)}
    if not k:
        return {}
    start = (rot.index(r0_after) + 1) % k if r0_after is not None else 0
    return {rot[(start + i) % k]: i + 1 for i in range(k)}


def oracle_dfs_orders(
    g: PlanarGraph, parent: Sequence[int], r0_after: int | None = None, use_default_r0: bool = True
) -> tuple[list[int], list[int]]:
    """Left and right DFS preorders (1-based) by plain recursion.

    The left order enters the unexplored child of greatest rotation position
    first, the right order the smallest.
    """
    root = next(v for v in range(g.n) if parent[v] < 0)
    if use_default_r0 and r0_after is None:
        r0_after = default_r0_after(g, root)
    kids: list[list[int]] = [[] for _ in range(g.n)]
    for v in range(g.n):
        pos = _positions(g, parent, v, r0_after if v == root else None)
        kids[v] = sorted((c for c in g.rotations[v] if parent[c] == v), key=lambda c: pos[c])
    out = []
    for reverse in (True, False):
        order = [0] * g.n
        k = 0
        stack = [root]
        while stack:
            x = stack.pop()
            k += 1
            order[x] = k
            ch = kids[x] if reverse else kids[x][::-1]
            stack.extend(ch)  # last pushed is visited first
        out.append(order)
    return out[0], out[1]


# -- separators and DFS trees ------------------------------------------------


def check_separator(
    g: PlanarGraph,
    part: Iterable[int],
    S: Iterable[int],
    parent: Sequence[int] | dict[int, int] | None = None,
) -> Verdict:
    """Balance of ``G[part] - S`` and, with a tree, the path shape of ``S``."""
    part = set(part)
    S = set(S)
    if not S <= part:
        return Verdict(False, "separator leaves the part")
    n = len(part)
    limit = math.ceil(2 * n / 3)
    rest = part - S
    seen: set[int] = set()
    for s in sorted(rest):
        if s in seen:
            continue
        seen.add(s)
        size = 0
        q = deque([s])
        while q:
            x = q.popleft()
            size += 1
            for y in g.rotations[x]:
                if y in rest and y not in seen:
                    seen.add(y)
                    q.append(y)
        if size > limit:
            return Verdict(False, f"component of size {size} > {limit}")
    if parent is not None:
        if not S:
            return Verdict(False, "empty separator")
        pget = parent.get if isinstance(parent, dict) else (lambda x: parent[x])
        links = [(x, pget(x)) for x in S if pget(x) is not None and pget(x) in S]
        if len(links) != len(S) - 1:
            return Verdict(False, "separator is not a tree path (edge count)")
        deg: dict[int, int] = {x: 0 for x in S}
        for x, p in links:
            deg[x] += 1
            deg[p] += 1
        if any(d > 2 for d in deg.values()):
            return Verdict(False, "separator is not a tree path (branching)")
    return Verdict(True)


def check_dfs_tree(g: PlanarGraph, parent: Sequence[int], root: int) -> Verdict:
    """Every non-tree edge must join an ancestor-descendant pair."""
    n = g.n
    if len(parent) != n or parent[root] != -1:
        raise NotSpanning("parent array must have the root marked with -1")
    kids: list[list[int]] = [[] for _ in range(n)]
    for v in range(n):
        if v == root:
            continue
        p = parent[v]
        if p < 0 or not g.has_edge(v, p):
            raise NotSpanning(f"node {v} has no valid parent edge")
        kids[p].append(v)
    pre = [-1] * n
    post = [-1] * n
    clock = 0
    stack = [(root, 0)]
    while stack:
        x, i = stack.pop()
        if i == 0:
            pre[x] = clock
            clock += 1
        if i < len(kids[x]):
            stack.append((x, i + 1))
            stack.append((kids[x][i], 0))
        else:
            post[x] = clock
    if min(pre) < 0:
        raise NotSpanning("parent links do not reach every node from the root")
    for u, v in g.edges():
        if parent[u] == v or parent[v] == u:
            continue
        if not (pre[u] <= pre[v] < post[u] or pre[v] <= pre[u] < post[v]):
            return Verdict(False, f"cross edge {u}-{v}")
    return Verdict(True)


# -- insertion / compatibility -----------------------------------------------


def oracle_compatible(
    g: PlanarGraph,
    parent: Sequence[int],
    u: int,
    v: int,
    z: int,
    *,
    r0_after: int | None = None,
) -> bool:
    """Can the virtual edge ``u-z`` be inserted inside the face of real edge ``u-v``?

    An insertion is a pair of corners (one at ``u`` and one at ``z``) on a
    common face of ``g`` lying inside the face of ``u-v``.  It qualifies when
    the dart copy with the new edge still passes the Euler check and every
    tree child of ``u`` or ``z`` that lies inside the face of ``u-v`` ends up
    inside or on the boundary of the new fundamental cycle.
    """
    root = next(x for x in range(g.n) if parent[x] < 0)
    if r0_after is None:
        r0_after = default_r0_after(g, root)
    inside_e, _, _ = oracle_regions(g, parent, u, v, r0_after=r0_after)
    # faces of the base graph, and which of them lie inside the cycle
    dg, eid, _ = _build(g, root, r0_after)
    face = dg.faces()
    cut = {eid[(min(u, v), max(u, v))]}
    border = tree_path(parent, u, v)
    for x, y in zip(border, border[1:]):
        cut.add(eid[(min(x, y), max(x, y))])
    adj: list[list[int]] = [[] for _ in range(dg.nfaces)]
    for e in range(len(dg.head) // 2):
        if e not in cut:
            adj[face[2 * e]].append(face[2 * e + 1])
            adj[face[2 * e + 1]].append(face[2 * e])
    seen = [False] * dg.nfaces
    start = face[dg.rot[g.n][0]]
    seen[start] = True
    q = deque([start])
    while q:
        f = q.popleft()
        for h in adj[f]:
            if not seen[h]:
                seen[h] = True
                q.append(h)
    r0_dart = dg.rot[g.n][0] ^ 1

    def corners(x: int) -> list[tuple[int, int]]:
        # (face id, neighbour after which an end would be placed)
        out = []
        for i, d in enumerate(dg.rot[x]):
            if d == r0_dart:
                continue
            # the corner clockwise after d belongs to the face of the dart arriving along d
            f = face[d ^ 1]
            if not seen[f]:
                out.append((f, dg.head[d]))
        return out

    need = {c for c in g.rotations[u] if parent[c] == u and c in inside_e}
    need |= {c for c in g.rotations[z] if parent[c] == z and c in inside_e}
    cu, cz = corners(u), corners(z)
    for fu, au in cu:
        for fz, az in cz:
            if fu != fz:
                continue
            ins = (Insertion(u, au, 5), Insertion(z, az, 5))
            try:
                inner, _, bord = oracle_regions(g, parent, u, z, virtual=ins, r0_after=r0_after)
            except NotPlanarEmbedding:
                continue
            if need <= (inner | set(bord)):
                return True
    return False


# -- bulk answers through the dual spanning tree --------------------------------


class CoTreeOracle:
    """Fast inside queries for one rooted spanning tree.

    The duals of the non-tree edges form a spanning tree of the dual graph
    (the r0 edge counts as a tree edge).  Rooted at the face around r0, the
    faces inside the fundamental cycle of a non-tree edge are exactly the
    dual subtree below that edge.  A node off the cycle is inside iff one of
    its corners is.
    """

    def __init__(self, g: PlanarGraph, parent: Sequence[int], r0_after: int | None = None) -> None:
        n = g.n
        self.g = g
        self.parent = list(parent)
        root = next(v for v in range(n) if parent[v] < 0)
        self.root = root
        if r0_after is None:
            r0_after = default_r0_after(g, root)
        dg, eid, _ = _build(g, root, r0_after)
        self.dg, self.eid = dg, eid
        face = dg.faces()
        self.face = face
        nf = dg.nfaces
        r0_edge = len(dg.head) // 2 - 1
        tree = {r0_edge}
        for v in range(n):
            if parent[v] >= 0:
                tree.add(eid[(min(v, parent[v]), max(v, parent[v]))])
        adj: list[list[tuple[int, int]]] = [[] for _ in range(nf)]
        for e in range(len(dg.head) // 2):
            if e not in tree:
                adj[face[2 * e]].append((face[2 * e + 1], e))
                adj[face[2 * e + 1]].append((face[2 * e], e))
        # face walks: darts in order and the index of each dart in its walk
        self.walk: list[list[int]] = [[] for _ in range(nf)]
        self.widx = [0] * len(dg.head)
        pos: dict[int, int] = {}
        for v in range(dg.n):
            for i, d in enumerate(dg.rot[v]):
                pos[d] = i
        done = [False] * len(dg.head)
        for d0 in range(len(dg.head)):
            if done[d0]:
                continue
            d = d0
            f = face[d0]
            while not done[d]:
                done[d] = True
                self.widx[d] = len(self.walk[f])
                self.walk[f].append(d)
                h = dg.head[d]
                r = dg.rot[h]
                d = r[(pos[d ^ 1] + 1) % len(r)]
        self.pos = pos
        # dual tree rooted at the r0 face, with Euler-tour intervals
        outer = face[dg.rot[n][0]]
        self.fpar = [-1] * nf
        self.fpar_edge = [-1] * nf
        self.kids: list[list[int]] = [[] for _ in range(nf)]
        self.tin = [0] * nf
        self.tout = [0] * nf
        seen = [False] * nf
        seen[outer] = True
        clock = 0
        stack = [(outer, 0)]
        while stack:
            f, i = stack.pop()
            if i == 0:
                self.tin[f] = clock
                clock += 1
            if i < len(adj[f]):
                stack.append((f, i + 1))
                h, e = adj[f][i]
                if not seen[h]:
                    seen[h] = True
                    self.fpar[h] = f
                    self.fpar_edge[h] = e
                    self.kids[f].append(h)
                    stack.append((h, 0))
            else:
                self.tout[f] = clock
        if not all(seen):
            raise NotPlanarEmbedding("dual of the non-tree edges is not connected")
        for f in range(nf):
            self.kids[f].sort(key=lambda h: self.tin[h])
        self.kid_tin = [[self.tin[h] for h in self.kids[f]] for f in range(nf)]
        # a representative corner face per node
        self.rep = [face[dg.rot[v][0] ^ 1] if dg.rot[v] else -1 for v in range(n)]
        self.rep_tin = sorted(self.tin[f] for f in self.rep if f >= 0)
        # tree intervals of the oracle's own traversal
        kids_t: list[list[int]] = [[] for _ in range(n)]
        for v in range(n):
            if parent[v] >= 0:
                kids_t[parent[v]].append(v)
        self.pre = [0] * n
        self.post = [0] * n
        clock = 0
        stack = [(root, 0)]
        while stack:
            x, i = stack.pop()
            if i == 0:
                self.pre[x] = clock
                clock += 1
            if i < len(kids_t[x]):
                stack.append((x, i + 1))
                stack.append((kids_t[x][i], 0))
            else:
                self.post[x] = clock

    # tree helpers
    def is_anc(self, a: int, b: int) -> bool:
        return self.pre[a] <= self.pre[b] < self.post[a]

    def on_path(self, x: int, a: int, b: int) -> bool:
        """``x`` on the tree path between ``a`` and ``b``."""
        if not (self.is_anc(x, a) or self.is_anc(x, b)):
            return False
        # x is an ancestor of a or b; it lies on the path iff it is below their lca
        w = a
        while not self.is_anc(w, b):
            w = self.parent[w]
        return self.is_anc(w, x)

    def _subtree_of(self, a: int, b: int) -> int:
        e = self.eid.get((min(a, b), max(a, b)))
        if e is None or self.parent[a] == b or self.parent[b] == a:
            raise NotACycle(f"{a}-{b} is not a non-tree edge")
        f1, f2 = self.face[2 * e], self.face[2 * e + 1]
        return f1 if self.fpar_edge[f1] == e else f2

    def _in_subtree(self, f: int, top: int) -> bool:
        return self.tin[top] <= self.tin[f] < self.tout[top]

    def inside_count(self, a: int, b: int) -> int:
        top = self._subtree_of(a, b)
        lo, hi = self.tin[top], self.tout[top]
        total = bisect.bisect_left(self.rep_tin, hi) - bisect.bisect_left(self.rep_tin, lo)
        for x in tree_path(self.parent, a, b):
            if self.rep[x] >= 0 and lo <= self.tin[self.rep[x]] < hi:
                total -= 1
        return total

    def inside_set(self, a: int, b: int) -> frozenset[int]:
        top = self._subtree_of(a, b)
        border = set(tree_path(self.parent, a, b))
        return frozenset(
            x for x in range(self.g.n) if x not in border and self.rep[x] >= 0 and self._in_subtree(self.rep[x], top)
        )

    def corners(self, x: int) -> list[tuple[int, int]]:
        """``(face, walk index)`` of every corner at ``x``; the r0 slot is skipped."""
        out = []
        for d in self.dg.rot[x]:
            if self.dg.head[d] == self.g.n:
                continue
            a = d ^ 1
            out.append((self.face[a], self.widx[a]))
        return out

    def corner_faces_inside(self, u: int, v: int) -> set[int]:
        """Faces of the corners of ``u`` that lie inside the cycle closed by ``u-v``."""
        top = self._subtree_of(u, v)
        return {f for f, _ in self.corners(u) if self._in_subtree(f, top)}

    def compatible(self, u: int, v: int, z: int) -> bool:
        """Is there a chord ``u-z`` inside the face of ``u-v`` keeping the tree children of ``u`` and ``z`` inside?"""
        top = self._subtree_of(u, v)
        need = []
        for x in (u, z):
            for c in self.g.rotations[x]:
                if self.parent[c] != x or self.on_path(c, u, v):
                    continue
                if self.rep[c] >= 0 and self._in_subtree(self.rep[c], top):
                    need.append(c)
        cz: dict[int, list[int]] = {}
        for f, k in self.corners(z):
            cz.setdefault(f, []).append(k)
        for phi, ku in self.corners(u):
            if not self._in_subtree(phi, top) or phi not in cz:
                continue
            L = len(self.walk[phi])
            pe = self.fpar_edge[phi]
            pd = 2 * pe if self.face[2 * pe] == phi else 2 * pe + 1
            kp = self.widx[pd]
            for kz in cz[phi]:
                # arc one holds walk darts ku+1 .. kz, arc two the rest
                def arc(k: int) -> int:
                    return 1 if 0 < (k - ku) % L <= (kz - ku) % L else 2

                inner = 3 - arc(kp)

                def inside(c: int) -> bool:
                    if self.on_path(c, u, z):
                        return True
                    a = self.dg.rot[c][0] ^ 1
                    psi = self.face[a]
                    if psi == phi:
                        k = self.widx[a]
                        # corner k sits between darts k and k+1
                        return arc(k) == inner and arc((k + 1) % L) == inner
                    if not self._in_subtree(psi, phi):
                        return False
                    i = bisect.bisect_right(self.kid_tin[phi], self.tin[psi]) - 1
                    chi = self.kids[phi][i]
                    e = self.fpar_edge[chi]
                    cd = 2 * e if self.face[2 * e] == phi else 2 * e + 1
                    return arc(self.widx[cd]) == inner

                if all(inside(c) for c in need):
                    return True
        return False
