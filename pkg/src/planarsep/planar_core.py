"""Embedded planar graphs: rotation systems, face tracing, generators and JSON I/O.

Rotations are stored clockwise.  The face walk follows the rule
``next(u -> v) = (v -> w)`` where ``w`` is the clockwise successor of ``u``
in the rotation of ``v``; the face of dart ``u -> v`` therefore owns the
corner of ``v`` lying clockwise between ``u`` and ``w``.

The outer face is named by a witness dart ``(a, v)``.  The node ``v`` is the
*anchor*: the virtual root r0 of any tree rooted at ``v`` sits in the corner
of ``v`` just clockwise after ``a``.
"""
from __future__ import annotations

import io
import json
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    AsymmetricAdjacency,
    BadOuterWitness,
    DisconnectedPart,
    InfeasibleParams,
    NotPlanarEmbedding,
    SchemaViolation,
)

Dart = tuple[int, int]


class PlanarGraph:
    """An undirected simple graph with a clockwise rotation system."""

    __slots__ = ("n", "rotations", "outer", "coords", "_pos", "_m")

    def __init__(
        self,
        n: int,
        rotations: Sequence[Sequence[int]],
        outer: Dart,
        coords: Sequence[Sequence[float]] | None = None,
    ) -> None:
        self.n = n
        self.rotations: tuple[tuple[int, ...], ...] = tuple(tuple(r) for r in rotations)
        self.outer: Dart = (int(outer[0]), int(outer[1]))
        self.coords = None if coords is None else tuple((float(x), float(y)) for x, y in coords)
        self._pos = [{u: i for i, u in enumerate(r)} for r in self.rotations]
        self._m = sum(len(r) for r in self.rotations) // 2

    # -- queries ---------------------------------------------------------
    @property
    def nodes(self) -> range:
        return range(self.n)

    @property
    def m(self) -> int:
        return self._m

    def rotation(self, v: int) -> tuple[int, ...]:
        return self.rotations[v]

    def degree(self, v: int) -> int:
        return len(self.rotations[v])

    def index(self, v: int, u: int) -> int:
        """Position of neighbour ``u`` in the stored rotation of ``v``."""
        return self._pos[v][u]

    def has_edge(self, u: int, v: int) -> bool:
        return v in self._pos[u]

    def succ(self, v: int, u: int) -> int:
        """Clockwise successor of ``u`` around ``v``."""
        r = self.rotations[v]
        return r[(self._pos[v][u] + 1) % len(r)]

    def pred(self, v: int, u: int) -> int:
        r = self.rotations[v]
        return r[(self._pos[v][u] - 1) % len(r)]

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.n) for v in self.rotations[u] if u < v]

    def next_dart(self, d: Dart) -> Dart:
        u, v = d
        return (v, self.succ(v, u))

    @property
    def anchor(self) -> int:
        """Node that owns the outer corner named by the witness dart."""
        return self.outer[1]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PlanarGraph):
            return NotImplemented
        return (
            self.n == other.n
            and self.rotations == other.rotations
            and self.outer == other.outer
            and self.coords == other.coords
        )

    def __hash__(self) -> int:
        return hash((self.n, self.rotations, self.outer))

    def __repr__(self) -> str:
        return f"PlanarGraph(n={self.n}, m={self.m}, outer={self.outer})"


@dataclass(frozen=True)
class Face:
    darts: tuple[Dart, ...]
    is_outer: bool

    @property
    def nodes(self) -> list[int]:
        return [u for u, _ in self.darts]

    def __len__(self) -> int:
        return len(self.darts)


@dataclass
class Partition:
    part_of: list[int]
    parts: dict[int, list[int]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.parts:
            parts: dict[int, list[int]] = {}
            for v, p in enumerate(self.part_of):
                parts.setdefault(p, []).append(v)
            self.parts = parts

    @classmethod
    def single(cls, n: int) -> "Partition":
        return cls([0] * n)

    @classmethod
    def from_labels(cls, g: PlanarGraph, labels: Sequence[int]) -> "Partition":
        """Build a partition and check that every part induces a connected graph."""
        if len(labels) != g.n:
            raise SchemaViolation("partition labels must cover every node")
        part = cls(list(labels))
        for pid, members in part.parts.items():
            if len(components(g, members)) != 1:
                raise DisconnectedPart(f"part {pid} is not connected")
        return part


# -- validation ------------------------------------------------------------


def _trace(n: int, rotations: Sequence[Sequence[int]], pos: list[dict[int, int]]) -> list[list[Dart]]:
    seen: set[Dart] = set()
    walks: list[list[Dart]] = []
    for u in range(n):
        for v in rotations[u]:
            if (u, v) in seen:
                continue
            walk: list[Dart] = []
            d = (u, v)
            while d not in seen:
                seen.add(d)
                walk.append(d)
                a, b = d
                rb = rotations[b]
                d = (b, rb[(pos[b][a] + 1) % len(rb)])
            walks.append(walk)
    return walks


def build_graph(
    n: int,
    rotations: Sequence[Sequence[int]],
    outer: Sequence[int],
    coords: Sequence[Sequence[float]] | None = None,
) -> PlanarGraph:
    """Validate a rotation system and wrap it as a :class:`PlanarGraph`."""
    if n < 1 or len(rotations) != n:
        raise SchemaViolation("rotations must list exactly n nodes")
    pos: list[dict[int, int]] = []
    for v, rot in enumerate(rotations):
        d: dict[int, int] = {}
        for i, u in enumerate(rot):
            if not isinstance(u, (int, np.integer)) or not 0 <= u < n:
                raise SchemaViolation(f"node {v}: neighbour {u!r} out of range")
            if u == v:
                raise SchemaViolation(f"self-loop at node {v}")
            if u in d:
                raise SchemaViolation(f"parallel edge {v}-{u}")
            d[int(u)] = i
        pos.append(d)
    for v in range(n):
        for u in pos[v]:
            if v not in pos[u]:
                raise AsymmetricAdjacency(f"edge {v}-{u} missing from rotation of {u}")
    walks = _trace(n, rotations, pos)
    # Euler per component: V - E + F = 2 for each
    comp = _component_labels(n, rotations)
    ncomp = max(comp) + 1 if n else 0
    vcount = [0] * ncomp
    ecount = [0] * ncomp
    fcount = [0] * ncomp
    for v in range(n):
        vcount[comp[v]] += 1
        ecount[comp[v]] += len(rotations[v])
        if not rotations[v]:
            fcount[comp[v]] += 1
    for w in walks:
        fcount[comp[w[0][0]]] += 1
    for c in range(ncomp):
        if vcount[c] - ecount[c] // 2 + fcount[c] != 2:
            raise NotPlanarEmbedding(
                f"Euler check failed: V={vcount[c]} E={ecount[c] // 2} F={fcount[c]}"
            )
    a, b = int(outer[0]), int(outer[1])
    if not (0 <= a < n and 0 <= b < n):
        raise BadOuterWitness(f"outer witness {outer!r} out of range")
    if a == b:
        if rotations[a]:
            raise BadOuterWitness("degenerate witness only allowed at an isolated node")
    elif b not in pos[a]:
        raise BadOuterWitness(f"outer witness ({a},{b}) is not an edge")
    if coords is not None and len(coords) != n:
        raise SchemaViolation("coords must have one entry per node")
    return PlanarGraph(n, [[int(u) for u in r] for r in rotations], (a, b), coords)


def _component_labels(n: int, rotations: Sequence[Sequence[int]]) -> list[int]:
    lab = [-1] * n
    c = 0
    for s in range(n):
        if lab[s] >= 0:
            continue
        lab[s] = c
        q = deque([s])
        while q:
            x = q.popleft()
            for y in rotations[x]:
                if lab[y] < 0:
                    lab[y] = c
                    q.append(y)
        c += 1
    return lab


def trace_faces(g: PlanarGraph) -> list[Face]:
    """All face walks; isolated nodes contribute one empty face each."""
    walks = _trace(g.n, g.rotations, g._pos)
    outer = g.outer
    faces = [Face(tuple(w), outer in w) for w in walks]
    for v in range(g.n):
        if not g.rotations[v]:
            faces.append(Face((), outer == (v, v)))
    return faces


def components(g: PlanarGraph, nodes: Iterable[int]) -> list[list[int]]:
    """Connected components of the subgraph induced by ``nodes`` (sorted lists)."""
    member = set(nodes)
    seen: set[int] = set()
    out: list[list[int]] = []
    for s in sorted(member):
        if s in seen:
            continue
        seen.add(s)
        comp = [s]
        q = deque([s])
        while q:
            x = q.popleft()
            for y in g.rotations[x]:
                if y in member and y not in seen:
                    seen.add(y)
                    comp.append(y)
                    q.append(y)
        out.append(sorted(comp))
    return out


def induced(g: PlanarGraph, nodes: Sequence[int]) -> tuple[PlanarGraph, list[int]]:
    """Induced subgraph with local ids ``0..k-1`` (in the order of ``nodes``).

    The local outer witness keeps the corner of the global anchor when the
    anchor belongs to ``nodes``; otherwise it names the corner just before the
    first neighbour of the smallest global id.
    """
    glob = list(nodes)
    loc = {v: i for i, v in enumerate(glob)}
    rots = [[loc[u] for u in g.rotations[v] if u in loc] for v in glob]
    a, v = g.outer
    if v in loc and a != v:
        ra = g.rotations[v]
        i = g.index(v, a)
        k = len(ra)
        anchor_tail = None
        for s in range(k):
            x = ra[(i - s) % k]
            if x in loc:
                anchor_tail = x
                break
        head = loc[v]
        tail = loc[anchor_tail] if anchor_tail is not None else head
    else:
        head = loc[min(glob)] if v not in loc else loc[v]
        r = rots[head]
        tail = r[-1] if r else head
    coords = None if g.coords is None else [g.coords[x] for x in glob]
    return PlanarGraph(len(glob), rots, (tail, head), coords), glob


def bfs_distances(g: PlanarGraph, src: int) -> list[int]:
    dist = [-1] * g.n
    dist[src] = 0
    q = deque([src])
    while q:
        x = q.popleft()
        for y in g.rotations[x]:
            if dist[y] < 0:
                dist[y] = dist[x] + 1
                q.append(y)
    return dist


def diameter(g: PlanarGraph) -> int:
    """Exact diameter of a connected graph (all-pairs BFS in scipy)."""
    if g.n <= 1:
        return 0
    from scipy.sparse import csr_matrix
    from scipy.sparse.csgraph import shortest_path

    rows = [u for u in range(g.n) for _ in g.rotations[u]]
    cols = [v for u in range(g.n) for v in g.rotations[u]]
    mat = csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(g.n, g.n))
    best = 0
    # blocks keep memory bounded on larger graphs
    step = 512
    for s in range(0, g.n, step):
        idx = list(range(s, min(g.n, s + step)))
        d = shortest_path(mat, unweighted=True, indices=idx)
        if np.isinf(d).any():
            raise ValueError("graph is disconnected")
        best = max(best, int(d.max()))
    return best


# -- geometric helpers for generators --------------------------------------


def _rotations_from_coords(n: int, edges: Iterable[tuple[int, int]], coords) -> list[list[int]]:
    nbrs: list[list[int]] = [[] for _ in range(n)]
    for u, v in edges:
        nbrs[u].append(v)
        nbrs[v].append(u)
    rots = []
    for v in range(n):
        x0, y0 = coords[v]
        # clockwise = decreasing polar angle
        rots.append(sorted(nbrs[v], key=lambda u: (-math.atan2(coords[u][1] - y0, coords[u][0] - x0), u)))
    return rots


def _outer_tail(rots: list[list[int]], coords, v: int, direction: tuple[float, float]) -> int:
    """Neighbour ``a`` of ``v`` such that ``direction`` lies clockwise just after ``a``."""
    r = rots[v]
    if len(r) == 1:
        return r[0]
    phi = math.atan2(direction[1], direction[0])
    x0, y0 = coords[v]
    two_pi = 2 * math.pi
    for i, a in enumerate(r):
        b = r[(i + 1) % len(r)]
        ta = math.atan2(coords[a][1] - y0, coords[a][0] - x0)
        tb = math.atan2(coords[b][1] - y0, coords[b][0] - x0)
        gap = (ta - tb) % two_pi or two_pi
        if 0 < (ta - phi) % two_pi < gap:
            return a
    return r[-1]


def from_coords(
    n: int,
    edges: Iterable[tuple[int, int]],
    coords: Sequence[tuple[float, float]],
    anchor: int = 0,
) -> PlanarGraph:
    """Straight-line drawing to rotation system; ``anchor`` must be on the hull."""
    edges = list(edges)
    rots = _rotations_from_coords(n, edges, coords)
    if not rots[anchor]:
        return build_graph(n, rots, (anchor, anchor), coords)
    cx = sum(c[0] for c in coords) / n
    cy = sum(c[1] for c in coords) / n
    direction = (coords[anchor][0] - cx, coords[anchor][1] - cy)
    if direction == (0.0, 0.0):
        direction = (-1.0, 0.0)
    tail = _outer_tail(rots, coords, anchor, direction)
    return build_graph(n, rots, (tail, anchor), coords)


# -- generators ----------------------------------------------------------


def grid(k: int) -> PlanarGraph:
    if k < 1:
        raise InfeasibleParams("grid side must be positive")
    coords = [(float(c), float(-r)) for r in range(k) for c in range(k)]
    edges = []
    for r in range(k):
        for c in range(k):
            v = r * k + c
            if c + 1 < k:
                edges.append((v, v + 1))
            if r + 1 < k:
                edges.append((v, v + k))
    return from_coords(k * k, edges, coords)


def cycle(n: int) -> PlanarGraph:
    if n < 3:
        raise InfeasibleParams("a simple cycle needs at least 3 nodes")
    coords = [(math.cos(2 * math.pi * i / n), math.sin(2 * math.pi * i / n)) for i in range(n)]
    return from_coords(n, [(i, (i + 1) % n) for i in range(n)], coords)


def path(n: int) -> PlanarGraph:
    if n < 1:
        raise InfeasibleParams("path needs at least one node")
    coords = [(float(i), 0.0) for i in range(n)]
    return from_coords(n, [(i, i + 1) for i in range(n - 1)], coords)


def star(n: int) -> PlanarGraph:
    """Node 0 is the centre, ``1..n-1`` are leaves."""
    if n < 1:
        raise InfeasibleParams("star needs at least one node")
    coords = [(0.0, 0.0)] + [
        (math.cos(2 * math.pi * i / max(1, n - 1)), math.sin(2 * math.pi * i / max(1, n - 1)))
        for i in range(n - 1)
    ]
    rots = _rotations_from_coords(n, [(0, i) for i in range(1, n)], coords)
    outer = (rots[0][-1], 0) if n > 1 else (0, 0)
    return build_graph(n, rots, outer, coords)


def wheel(k: int) -> PlanarGraph:
    """Rim ``0..k-1`` and hub ``k``."""
    if k < 3:
        raise InfeasibleParams("wheel rim needs at least 3 nodes")
    coords = [(math.cos(2 * math.pi * i / k), math.sin(2 * math.pi * i / k)) for i in range(k)]
    coords.append((0.0, 0.0))
    edges = [(i, (i + 1) % k) for i in range(k)] + [(i, k) for i in range(k)]
    return from_coords(k + 1, edges, coords)


def k4() -> PlanarGraph:
    """Outer triangle 0,1,2 around the central node 3."""
    coords = [(0.0, 2.0), (1.8, -1.0), (-1.8, -1.0), (0.0, 0.0)]
    edges = [(0, 1), (1, 2), (2, 0), (0, 3), (1, 3), (2, 3)]
    return from_coords(4, edges, coords)


def random_tree(n: int, seed: int = 0) -> PlanarGraph:
    """Random recursive tree with a random rotation at each node."""
    if n < 1:
        raise InfeasibleParams("tree needs at least one node")
    rng = np.random.default_rng(seed)
    nbrs: list[list[int]] = [[] for _ in range(n)]
    for v in range(1, n):
        p = int(rng.integers(0, v))
        nbrs[v].append(p)
        nbrs[p].append(v)
    rots = []
    for v in range(n):
        r = list(nbrs[v])
        rng.shuffle(r)
        rots.append(r)
    outer = (rots[0][0], 0) if n > 1 else (0, 0)
    return build_graph(n, rots, outer)


def _triangulation_points(n: int, rng) -> list[tuple[float, float]]:
    corners = [(0.0, 1000.0), (866.0, -500.0), (-866.0, -500.0)]
    pts = list(corners)
    while len(pts) < n:
        a, b = rng.random(), rng.random()
        if a + b >= 1.0:
            a, b = 1.0 - a, 1.0 - b
        # keep clear of the hull so every extra point is strictly interior
        a = 0.01 + 0.98 * a
        b = 0.01 + 0.98 * b
        x = corners[0][0] + a * (corners[1][0] - corners[0][0]) + b * (corners[2][0] - corners[0][0])
        y = corners[0][1] + a * (corners[1][1] - corners[0][1]) + b * (corners[2][1] - corners[0][1])
        pts.append((round(x, 6), round(y, 6)))
    return pts


def _delaunay_edges(pts) -> set[tuple[int, int]]:
    from scipy.spatial import Delaunay

    tri = Delaunay(np.asarray(pts))
    edges: set[tuple[int, int]] = set()
    for s in tri.simplices:
        a, b, c = (int(x) for x in s)
        for u, v in ((a, b), (b, c), (a, c)):
            edges.add((min(u, v), max(u, v)))
    return edges


def random_triangulation(n: int, seed: int = 0) -> PlanarGraph:
    """Maximal planar graph on ``n`` nodes; node 0 is a corner of the outer triangle."""
    return _random_triangulation(n, seed)[0]


def _random_triangulation(n: int, seed: int):
    if n < 3:
        raise InfeasibleParams("a triangulation needs at least 3 nodes")
    for attempt in range(16):
        rng = np.random.default_rng([seed, attempt])
        pts = _triangulation_points(n, rng)
        edges = _delaunay_edges(pts) if n > 3 else {(0, 1), (1, 2), (0, 2)}
        if len(edges) == 3 * n - 6:
            return from_coords(n, sorted(edges), pts), sorted(edges), pts
    raise InfeasibleParams("could not draw a triangulation in general position")


def random_planar(n: int, m: int, seed: int = 0) -> PlanarGraph:
    """Connected planar graph with exactly ``m`` edges (a spanning tree plus extras)."""
    if n < 1 or m < n - 1 or (n >= 3 and m > 3 * n - 6) or (n < 3 and m > n - 1):
        raise InfeasibleParams(f"need n-1 <= m <= 3n-6, got n={n} m={m}")
    if n < 3:
        return path(n)
    _, edges, pts = _random_triangulation(n, seed)
    rng = np.random.default_rng([seed, 99])
    order = list(edges)
    rng.shuffle(order)
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    keep, rest = [], []
    for u, v in order:
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
            keep.append((u, v))
        else:
            rest.append((u, v))
    keep.extend(rest[: m - (n - 1)])
    return from_coords(n, sorted(keep), pts)


def generate(kind: str, *params: int, seed: int = 0) -> PlanarGraph:
    """Dispatch by generator name; a pure function of ``(kind, params, seed)``."""
    table = {
        "grid": lambda: grid(*params),
        "cycle": lambda: cycle(*params),
        "path": lambda: path(*params),
        "star": lambda: star(*params),
        "wheel": lambda: wheel(*params),
        "k4": lambda: k4(),
        "tree": lambda: random_tree(*params, seed=seed),
        "tri": lambda: random_triangulation(*params, seed=seed),
        "random_triangulation": lambda: random_triangulation(*params, seed=seed),
        "planar": lambda: random_planar(*params, seed=seed),
        "random_planar": lambda: random_planar(*params, seed=seed),
    }
    if kind not in table:
        raise InfeasibleParams(f"unknown generator {kind!r}")
    try:
        return table[kind]()
    except TypeError as exc:
        raise InfeasibleParams(str(exc)) from exc


def quadrant_partition(g: PlanarGraph) -> Partition:
    """Split by the median x and y coordinate, then into connected pieces.

    Graphs without coordinates are split by node id into four ranges.
    Every part of the result is connected.
    """
    if g.coords is not None:
        xs = sorted(c[0] for c in g.coords)
        ys = sorted(c[1] for c in g.coords)
        mx, my = xs[(g.n - 1) // 2], ys[(g.n - 1) // 2]
        quad = [int(c[0] > mx) + 2 * int(c[1] > my) for c in g.coords]
    else:
        quad = [min(3, 4 * v // max(1, g.n)) for v in range(g.n)]
    labels = [-1] * g.n
    k = 0
    for q in range(4):
        for comp in components(g, [v for v in range(g.n) if quad[v] == q]):
            for v in comp:
                labels[v] = k
            k += 1
    return Partition(labels)


# -- JSON ----------------------------------------------------------------


def to_dict(g: PlanarGraph) -> dict:
    d: dict = {"n": g.n, "rotations": [list(r) for r in g.rotations], "outer": list(g.outer)}
    if g.coords is not None:
        d["coords"] = [list(c) for c in g.coords]
    return d


def dumps(g: PlanarGraph) -> bytes:
    return (json.dumps(to_dict(g), separators=(",", ":")) + "\n").encode()


def save_json(g: PlanarGraph, path_or_file) -> None:
    data = dumps(g)
    if hasattr(path_or_file, "write"):
        # text handles get str, binary handles bytes
        text = isinstance(path_or_file, io.TextIOBase) or "b" not in getattr(path_or_file, "mode", "b")
        path_or_file.write(data.decode() if text else data)
    else:
        with open(path_or_file, "wb") as fh:
            fh.write(data)


def loads(data: bytes | str) -> PlanarGraph:
    try:
        d = json.loads(data)
    except json.JSONDecodeError as exc:
        raise SchemaViolation(f"invalid JSON: {exc}") from exc
    if not isinstance(d, dict) or set(d) - {"n", "rotations", "outer", "coords"}:
        raise SchemaViolation("expected object with keys n, rotations, outer, coords")
    n, rots, outer = d.get("n"), d.get("rotations"), d.get("outer")
    if not isinstance(n, int) or isinstance(n, bool):
        raise SchemaViolation("n must be an integer")
    if not isinstance(rots, list) or not all(isinstance(r, list) for r in rots):
        raise SchemaViolation("rotations must be a list of lists")
    if any(not isinstance(u, int) or isinstance(u, bool) for r in rots for u in r):
        raise SchemaViolation("rotation entries must be integers")
    if not (isinstance(outer, list) and len(outer) == 2 and all(isinstance(x, int) for x in outer)):
        raise SchemaViolation("outer must be a pair of integers")
    coords = d.get("coords")
    if coords is not None and not (
        isinstance(coords, list)
        and all(isinstance(c, list) and len(c) == 2 and all(isinstance(x, (int, float)) for x in c) for c in coords)
    ):
        raise SchemaViolation("coords must be a list of [x, y] pairs")
    return build_graph(n, rots, outer, coords)


def load_json(path_or_file) -> PlanarGraph:
    if hasattr(path_or_file, "read"):
        return loads(path_or_file.read())
    with open(path_or_file, "rb") as fh:
        return loads(fh.read())
