"""Cycle separators of a random triangulation, one per quadrant part."""
from __future__ import annotations

import sys

from planarsep import compute_separators, quadrant_partition, random_triangulation, verify_witness


def largest_piece(g, members, S) -> int:
    rest = set(members) - set(S)
    best = 0
    while rest:
        stack = [rest.pop()]
        size = 0
        while stack:
            x = stack.pop()
            size += 1
            for y in g.rotations[x]:
                if y in rest:
                    rest.remove(y)
                    stack.append(y)
        best = max(best, size)
    return best


def main(n: int = 300, seed: int = 1) -> None:
    g = random_triangulation(n, seed=seed)
    part = quadrant_partition(g)
    for pid, w in sorted(compute_separators(g, part).items()):
        members = part.parts[pid]
        ok = bool(verify_witness(g, part, w.S, w))
        print(
            f"part {pid}: {len(members)} nodes, phase {w.phase}, |S|={len(w.S)}, "
            f"largest piece {largest_piece(g, members, w.S)}, audited {'ok' if ok else 'FAILED'}"
        )


if __name__ == "__main__":
    main(*(int(a) for a in sys.argv[1:3]))
