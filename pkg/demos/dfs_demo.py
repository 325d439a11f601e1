"""DFS tree of a grid by repeated separation, with its cost report."""
from __future__ import annotations

import sys

from planarsep import SimConfig, build_dfs, check_dfs_tree, grid, phase_bound


def main(k: int = 12, mode: str = "charged") -> None:
    g = grid(k)
    res = build_dfs(g, 0, cfg=SimConfig(mode=mode))
    rep = res.report
    print(f"grid {k}x{k}: n={g.n}, phases {res.phases} (bound {phase_bound(g.n)})")
    for j in res.ledger:
        print(f"  phase {j.phase}: largest residual component {j.largest}, {len(j.marked)} separator nodes joined")
    print(f"DFS tree valid: {bool(check_dfs_tree(g, res.parent, 0))}")
    print(f"rounds charged {rep.rounds_charged}, literal {rep.rounds_literal}, primitive calls {sum(rep.primitives.values())}")


if __name__ == "__main__":
    main(int(sys.argv[1]) if len(sys.argv) > 1 else 12, sys.argv[2] if len(sys.argv) > 2 else "charged")
