"""Command line entry point: ``planarsep {gen,separator,verify,dfs,bench}``.

An input is either a graph JSON file or a generator spec such as
``grid:8`` or ``tri:200@3`` (kind, colon separated parameters, optional
``@seed``).  Exit codes: 0 ok, 1 usage or input error, 2 verification
failure, 3 internal error.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import os
import sys
from typing import Sequence

from .congest_engine import SimConfig
from .dfs_builder import build_dfs, phase_bound
from .errors import (
    AsymmetricAdjacency,
    BadOuterWitness,
    Disconnected,
    DisconnectedPart,
    InfeasibleParams,
    NotPlanarEmbedding,
    PlanarSepError,
    SchemaViolation,
)
from .oracle_verify import check_dfs_tree
from .planar_core import Partition, PlanarGraph, diameter, dumps, generate, load_json, quadrant_partition
from .separator import compute_separators, verify_witness, witnesses_from_json, witnesses_to_json
from .tree_toolkit import RunEnv

EXIT_OK, EXIT_USAGE, EXIT_VERIFY, EXIT_INTERNAL = 0, 1, 2, 3
CSV_HEADER = ["n", "diameter", "rounds_charged", "rounds_literal", "invocations", "phases"]


class UsageError(Exception):
    pass


# bad input files or parameters; anything else escaping a command is a bug
INPUT_ERRORS = (
    UsageError,
    OSError,
    InfeasibleParams,
    SchemaViolation,
    AsymmetricAdjacency,
    BadOuterWitness,
    NotPlanarEmbedding,
    Disconnected,
    DisconnectedPart,
)


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # argparse exits with 2 by default
        raise UsageError(message)


def parse_spec(spec: str, seed: int = 0) -> PlanarGraph:
    body, _, s = spec.partition("@")
    kind, *params = body.split(":")
    try:
        nums = [int(p) for p in params]
        seed = int(s) if s else seed
    except ValueError as exc:
        raise InfeasibleParams(f"bad generator spec {spec!r}") from exc
    return generate(kind, *nums, seed=seed)


def load_input(src: str, seed: int = 0) -> PlanarGraph:
    if os.path.exists(src):
        return load_json(src)
    if ":" in src or src == "k4":
        return parse_spec(src, seed)
    raise UsageError(f"no such file or generator spec: {src}")


def load_partition(g: PlanarGraph, spec: str | None) -> Partition:
    if spec in (None, "single"):
        return Partition.single(g.n)
    if spec == "quadrant":
        return quadrant_partition(g)
    try:
        with open(spec) as fh:
            labels = json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read partition {spec}: {exc}") from exc
    if isinstance(labels, dict):
        labels = labels.get("part_of")
    if not isinstance(labels, list):
        raise SchemaViolation("partition file must hold a list of labels")
    return Partition.from_labels(g, labels)


def _ints(values: Sequence[str]) -> list[int]:
    try:
        return [int(x) for x in values]
    except ValueError as exc:
        raise UsageError(f"expected integers, got {list(values)}") from exc


def _config(mode: str, bits: int | None, seed: int, n: int) -> SimConfig:
    cfg = SimConfig(mode=mode, bits=bits, seed=seed)
    try:
        cfg.budget(n)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    return cfg


def _env(g: PlanarGraph, args) -> RunEnv:
    cfg = _config(args.mode, args.bits, args.seed, g.n)
    return RunEnv(cfg=cfg, diameter=diameter(g), n_budget=g.n)


def _write(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
        return
    with open(path, "w") as fh:
        fh.write(text if text.endswith("\n") else text + "\n")


def cmd_gen(args) -> int:
    params = _ints(args.params)
    g = generate(args.kind, *params, seed=args.seed)
    data = dumps(g)
    if args.out:
        with open(args.out, "wb") as fh:
            fh.write(data)
    else:
        sys.stdout.buffer.write(data)
    print(
        f"n={g.n} m={g.m} D={diameter(g)} sha256={hashlib.sha256(data).hexdigest()[:16]}",
        file=sys.stderr if not args.out else sys.stdout,
    )
    return EXIT_OK


def cmd_separator(args) -> int:
    g = load_input(args.input, args.seed)
    part = load_partition(g, args.parts)
    env = _env(g, args)
    ws = compute_separators(g, part, env)
    bad = []
    for pid, w in sorted(ws.items()):
        v = verify_witness(g, part, w.S, w)
        if not v:
            bad.append(f"part {pid}: {v.message}")
    _write(args.out, witnesses_to_json(ws))
    summary = {
        "parts": len(ws),
        "phases": {str(p): ws[p].phase for p in sorted(ws)},
        "verified": not bad,
        "report": env.meter.report().to_dict(),
    }
    print(json.dumps(summary, sort_keys=True), file=sys.stderr if args.out is None else sys.stdout)
    for line in bad:
        print(line, file=sys.stderr)
    return EXIT_VERIFY if bad else EXIT_OK


def cmd_verify(args) -> int:
    g = load_input(args.input, args.seed)
    part = load_partition(g, args.parts)
    try:
        with open(args.witness) as fh:
            ws = witnesses_from_json(fh.read())
    except (OSError, ValueError, KeyError, TypeError) as exc:
        print(f"unreadable witness file: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    if set(ws) != set(part.parts):
        print("witness parts do not match the partition", file=sys.stderr)
        return EXIT_VERIFY
    ok = True
    for pid, w in sorted(ws.items()):
        try:
            v = verify_witness(g, part, w.S, w)
        except (PlanarSepError, ValueError, KeyError, IndexError, TypeError) as exc:
            v = None
            print(f"part {pid}: malformed witness ({exc})")
        else:
            print(f"part {pid}: {'ok' if v else v.message}")
        ok = ok and bool(v)
    return EXIT_OK if ok else EXIT_VERIFY


def cmd_dfs(args) -> int:
    g = load_input(args.input, args.seed)
    if not 0 <= args.root < g.n:
        raise UsageError(f"root {args.root} is not a node")
    env = _env(g, args)
    res = build_dfs(g, args.root, env)
    verdict = check_dfs_tree(g, res.parent, args.root)
    _write(args.out, res.to_json())
    rep = res.report.to_dict()
    info = {
        "phases": res.phases,
        "phase_bound": phase_bound(g.n),
        "invocations": sum(rep["primitives"].values()),
        "rounds_charged": rep["rounds_charged"],
        "rounds_literal": rep["rounds_literal"],
        "primitives": rep["primitives"],
        "verified": bool(verdict),
    }
    print(json.dumps(info, sort_keys=True), file=sys.stderr if args.out is None else sys.stdout)
    if not verdict:
        print(verdict.message, file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


def bench_rows(family: str, sizes: Sequence[int], mode: str, bits: int | None = None, seed: int = 0) -> list[list[int]]:
    rows = []
    for k in sizes:
        g = generate(family, k, seed=seed) if family not in ("grid", "cycle", "path", "star", "wheel") else generate(family, k)
        cfg = _config(mode, bits, seed, g.n)
        env = RunEnv(cfg=cfg, diameter=diameter(g), n_budget=g.n)
        res = build_dfs(g, 0, env)
        if not check_dfs_tree(g, res.parent, 0):
            raise AssertionError(f"{family} {k}: output is not a DFS tree")
        rep = res.report
        rows.append([g.n, env.diameter, rep.rounds_charged, rep.rounds_literal, sum(rep.primitives.values()), res.phases])
    return rows


def cmd_bench(args) -> int:
    rows = bench_rows(args.family, _ints(args.sizes), args.mode, args.bits, args.seed)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    w.writerows(rows)
    _write(args.out, buf.getvalue())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--mode", choices=("literal", "charged"), default="charged")
    common.add_argument("--bits", type=int, default=None, help="message budget B in bits")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", default=None, help="output path (default stdout)")
    p = _Parser(prog="planarsep", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)
    g = sub.add_parser("gen", parents=[common], help="write a generated graph as JSON")
    g.add_argument("kind")
    g.add_argument("params", nargs="*")
    g.set_defaults(func=cmd_gen)
    s = sub.add_parser("separator", parents=[common], help="cycle separators of every part")
    s.add_argument("input")
    s.add_argument("--parts", default=None, help="single, quadrant or a JSON label file")
    s.set_defaults(func=cmd_separator)
    v = sub.add_parser("verify", parents=[common], help="audit a witness file")
    v.add_argument("input")
    v.add_argument("witness")
    v.add_argument("--parts", default=None)
    v.set_defaults(func=cmd_verify)
    d = sub.add_parser("dfs", parents=[common], help="DFS tree by repeated separation")
    d.add_argument("input")
    d.add_argument("--root", type=int, default=0)
    d.set_defaults(func=cmd_dfs)
    b = sub.add_parser("bench", parents=[common], help="CSV of round costs over a family")
    b.add_argument("family")
    b.add_argument("sizes", nargs="+")
    b.set_defaults(func=cmd_bench)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except INPUT_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # surfaced, never swallowed silently
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
