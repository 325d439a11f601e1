"""One test per acceptance criterion; each prints a single PASS/FAIL line."""
from __future__ import annotations

import math
import time

import numpy as np

from planarsep.cli import bench_rows
from planarsep.congest_engine import SimConfig
from planarsep.dfs_builder import build_dfs, phase_bound
from planarsep.errors import BitBudgetExceeded
from planarsep.face_geometry import compute_weights, face_table, hidden_edges
from planarsep.oracle_verify import CoTreeOracle, check_dfs_tree, oracle_compatible, oracle_dfs_orders
from planarsep.planar_core import Partition, quadrant_partition
from planarsep.separator import compute_separators, verify_witness
from planarsep.tree_toolkit import tree_of_graph

from conftest import ACCEPTANCE
from corpus import full_corpus, small_corpus, tree_families, weight_corpus
from subroutine_checks import run_equivalence


def verdict(k: int, ok: bool, detail: str) -> None:
    line = f"criterion {k}: {'PASS' if ok else 'FAIL'} ({detail})"
    ACCEPTANCE[k] = line
    print(line)


_dfs_runs: dict[int, tuple] = {}


def dfs_runs():
    # criteria 3 and 4 share one pass over the full corpus
    if not _dfs_runs:
        for i, g in enumerate(full_corpus()):
            root = i % g.n
            _dfs_runs[i] = (g, root, build_dfs(g, root))
    return _dfs_runs


def test_weights_match_the_dual_oracle():
    t0 = time.perf_counter()
    total = bad = 0
    first = None
    for g in weight_corpus():
        t = tree_of_graph(g)
        o = CoTreeOracle(t.graph, t.parent, t.r0_after)
        pil, _ = oracle_dfs_orders(t.graph, t.parent, t.r0_after)
        for (a, b), (fe, w) in compute_weights(t).items():
            total += 1
            expect = o.inside_count(a, b)
            if not (o.is_anc(a, b) or o.is_anc(b, a)):
                v = a if pil[a] > pil[b] else b
                expect += t.depth[v] - t.depth[fe.w] + 1
            if expect != w:
                bad += 1
                first = first or (g.n, a, b, w, expect)
    secs = time.perf_counter() - t0
    ok = bad == 0 and secs < 60
    verdict(1, ok, f"{total} fundamental edges, {bad} mismatches, {secs:.1f}s" + (f", first {first}" if first else ""))
    assert ok


def test_separators_pass_the_audit():
    graphs = weight_corpus() + list(tree_families())
    parts = bad = 0
    first = None
    for g in graphs:
        for part in (Partition.single(g.n), quadrant_partition(g)):
            for pid, w in compute_separators(g, part).items():
                parts += 1
                v = verify_witness(g, part, w.S, w)
                if not v:
                    bad += 1
                    first = first or f"n={g.n} part {pid}: {v.message}"
    verdict(2, bad == 0, f"{parts} parts, {bad} failures" + (f", first {first}" if first else ""))
    assert bad == 0


def test_dfs_trees_are_valid():
    bad = []
    for g, root, res in dfs_runs().values():
        ok = res.root == root and res.parent[root] == -1 and bool(check_dfs_tree(g, res.parent, root))
        if not ok:
            bad.append((g.n, root))
    verdict(3, not bad, f"{len(dfs_runs())} instances, {len(bad)} failures" + (f", first {bad[0]}" if bad else ""))
    assert not bad


def test_phase_bound():
    over = [(g.n, res.phases, phase_bound(g.n)) for g, _, res in dfs_runs().values() if res.phases > phase_bound(g.n)]
    slack = min(phase_bound(g.n) - res.phases for g, _, res in dfs_runs().values())
    verdict(4, not over, f"{len(dfs_runs())} instances, minimum slack {slack}" + (f", first excess {over[0]}" if over else ""))
    assert not over


def test_scaling_on_grids():
    rows = bench_rows("grid", [8, 16, 32, 64], "charged")
    inv_ratio, round_ratio = [], []
    for n, d, charged, _, inv, _ in rows:
        lg = math.log2(n)
        inv_ratio.append(inv / lg**3)
        round_ratio.append(charged / (d * lg**2))
    growth = [b / a for r in (inv_ratio, round_ratio) for a, b in zip(r, r[1:])]
    ok = max(growth) <= 2
    detail = (
        f"C_inv={max(inv_ratio):.2f} C_rounds={max(round_ratio):.2f}, "
        f"inv/log^3 n={[round(x, 2) for x in inv_ratio]}, "
        f"rounds/(D log^2 n)={[round(x, 1) for x in round_ratio]}, worst step x{max(growth):.2f}"
    )
    verdict(5, ok, detail)
    assert ok


def test_subroutines_match_sequential_oracles():
    checked, failing, msgs = run_equivalence(500)
    verdict(6, failing == 0, f"{checked} fixtures, {failing} failing" + (f", {msgs}" if msgs else ""))
    assert failing == 0


def first_hidden_law_mismatch():
    """Scans inside leaves in corpus order and stops at the first disagreement."""
    checked = 0
    for gi, g in enumerate(weight_corpus()):
        t = tree_of_graph(g)
        o = CoTreeOracle(t.graph, t.parent, t.r0_after)
        tab = face_table(t)
        for i, fe in enumerate(tab.edges):
            for z in np.nonzero(tab.inside[i])[0].tolist():
                if t.children[z] or t.parent[z] == fe.u:
                    continue
                checked += 1
                if (not tab.hiders(i, z)) != o.compatible(fe.u, fe.v, z):
                    return checked, (gi, t, fe, z)
    return checked, None


def test_hidden_law():
    checked, found = first_hidden_law_mismatch()
    if found is None:
        verdict(7, True, f"{checked} inside leaves agree")
        return
    gi, t, fe, z = found
    hid = sorted(hidden_edges(t, fe, z))
    insertable = oracle_compatible(t.graph, t.parent, fe.u, fe.v, z, r0_after=t.r0_after)
    detail = (
        f"mismatch after {checked} leaves: corpus graph {gi} (n={t.n}), e=({fe.u},{fe.v}), leaf {z}, "
        f"hidden_edges={hid[:4]}{'...' if len(hid) > 4 else ''} ({len(hid)}), planar insertion {'succeeds' if insertable else 'fails'}"
    )
    verdict(7, False, detail)
    assert (not hid) == insertable, detail


def test_determinism():
    graphs = small_corpus()[:20]
    bad = []
    for i, g in enumerate(graphs):
        outs = set()
        for scheduler in ("ascending", "ascending", "descending"):
            res = build_dfs(g, i % g.n, cfg=SimConfig(mode="literal", scheduler=scheduler))
            outs.add((res.to_json(), res.report.to_json()))
        if len(outs) != 1:
            bad.append(g.n)
    verdict(8, not bad, f"{len(graphs)} instances x 3 runs (two schedulers), {len(bad)} differing")
    assert not bad


def test_literal_mode_stays_within_the_bit_budget():
    aborts, worst = [], 0.0
    graphs = full_corpus()
    for g in graphs:
        cfg = SimConfig(mode="literal")
        try:
            res = build_dfs(g, 0, cfg=cfg)
        except BitBudgetExceeded as exc:
            aborts.append(f"n={g.n}: {exc}")
            continue
        if res.report.max_bits > cfg.budget(g.n):
            aborts.append(f"n={g.n}: {res.report.max_bits} bits")
        worst = max(worst, res.report.max_bits / cfg.budget(g.n))
    verdict(9, not aborts, f"{len(graphs)} instances, {len(aborts)} aborts, peak message {worst:.0%} of B" + (f", first {aborts[0]}" if aborts else ""))
    assert not aborts
