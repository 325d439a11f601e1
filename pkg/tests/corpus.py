"""Fixed-seed graph families shared by the test modules."""
from __future__ import annotations

import random
from functools import lru_cache
from typing import Iterator

from planarsep.planar_core import (
    PlanarGraph,
    build_graph,
    cycle,
    grid,
    path,
    random_planar,
    random_tree,
    random_triangulation,
    star,
)


def triangulation_sizes() -> list[int]:
    """100 sizes spread evenly over [20, 500]."""
    return [20 + (s * 480) // 99 for s in range(100)]


@lru_cache(maxsize=None)
def triangulations() -> tuple[PlanarGraph, ...]:
    return tuple(random_triangulation(n, seed=s) for s, n in enumerate(triangulation_sizes()))


@lru_cache(maxsize=None)
def grids() -> tuple[PlanarGraph, ...]:
    return tuple(grid(k) for k in range(4, 13))


def weight_corpus() -> list[PlanarGraph]:
    return list(triangulations()) + list(grids())


@lru_cache(maxsize=None)
def tree_families() -> tuple[PlanarGraph, ...]:
    out = []
    for n in (1, 2, 3, 4, 7, 12, 30, 64):
        out += [path(n), star(n), random_tree(n, seed=n)]
    return tuple(out)


@lru_cache(maxsize=None)
def sparse_planar() -> tuple[PlanarGraph, ...]:
    return tuple(random_planar(20 + 5 * s, 30 + 8 * s, seed=s) for s in range(20))


def full_corpus() -> list[PlanarGraph]:
    return weight_corpus() + list(tree_families()) + [cycle(3), cycle(10)]


def small_corpus() -> list[PlanarGraph]:
    """A quick cross-section for the slower literal-mode checks."""
    return list(triangulations()[:12]) + list(grids()[:4]) + list(sparse_planar()[:4])


# -- rooted embedded trees ---------------------------------------------------


def _dyck(k: int) -> Iterator[str]:
    """Balanced bracket words with ``k`` pairs."""

    def rec(prefix: str, opened: int, closed: int) -> Iterator[str]:
        if closed == k:
            yield prefix
            return
        if opened < k:
            yield from rec(prefix + "(", opened + 1, closed)
        if closed < opened:
            yield from rec(prefix + ")", opened, closed + 1)

    yield from rec("", 0, 0)


def embedded_tree(parent: list[int], order: list[list[int]], root: int) -> tuple[PlanarGraph, int | None]:
    """Tree graph whose rotation at each node is parent first, then ``order``.

    Returns the graph and the neighbour after which r0 sits at the root.
    """
    n = len(parent)
    rot = [([parent[v]] if parent[v] >= 0 else []) + order[v] for v in range(n)]
    if n == 1:
        return build_graph(1, [[]], (0, 0)), None
    last = order[root][-1]
    return build_graph(n, rot, (last, root)), last


def plane_trees(n: int, seed: int = 0) -> Iterator[tuple[PlanarGraph, list[int], int | None]]:
    """Every rooted plane tree on ``n`` nodes, with shuffled node ids.

    Yields ``(graph, parent, r0_after)``.
    """
    rng = random.Random(seed * 7919 + n)
    for word in _dyck(n - 1):
        ids = list(range(n))
        rng.shuffle(ids)
        parent = [-1] * n
        order: list[list[int]] = [[] for _ in range(n)]
        stack = [ids[0]]
        nxt = 1
        for ch in word:
            if ch == "(":
                c = ids[nxt]
                nxt += 1
                parent[c] = stack[-1]
                order[stack[-1]].append(c)
                stack.append(c)
            else:
                stack.pop()
        g, r0 = embedded_tree(parent, order, ids[0])
        yield g, parent, r0


def seq_depths(parent: list[int]) -> list[int]:
    out = [-1] * len(parent)
    for v in range(len(parent)):
        d, x = 0, v
        while parent[x] >= 0:
            x = parent[x]
            d += 1
        out[v] = d
    return out


def seq_ancestors(parent: list[int], v: int) -> list[int]:
    """``v`` and its ancestors, bottom up."""
    out = [v]
    while parent[out[-1]] >= 0:
        out.append(parent[out[-1]])
    return out


def seq_lca(parent: list[int], a: int, b: int) -> int:
    up = set(seq_ancestors(parent, a))
    return next(x for x in seq_ancestors(parent, b) if x in up)


def seq_orient(adj: list[list[int]], root: int) -> list[int]:
    """Parent array of a tree given by adjacency, rooted at ``root``."""
    parent = [-1] * len(adj)
    seen = {root}
    stack = [root]
    while stack:
        x = stack.pop()
        for y in adj[x]:
            if y not in seen:
                seen.add(y)
                parent[y] = x
                stack.append(y)
    return parent
