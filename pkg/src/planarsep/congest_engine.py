"""Synchronous CONGEST executor with exact round, message and bit accounting.

A :class:`NodeProgram` is a pair of pure functions.  ``init`` builds the
state of a node from its :class:`LocalView`; ``step`` maps ``(state, inbox)``
to ``(state, outbox, halted)``.  Messages are tuples of non-negative ints and
cost ``sum(max(1, x.bit_length()))`` bits.  A halted node sleeps until a
message reaches it.

Round 1 steps every node.  The literal round count of a run is the last
round in which any message was sent (at least 1), so a program that halts
immediately costs one round and a flood over a path of ``n`` nodes costs
``n - 1``.
"""
from __future__ import annotations

import json
import math
import random
from collections import Counter
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Iterator, Mapping, Protocol

from .errors import BitBudgetExceeded, ProtocolError, RoundLimitExceeded
from .planar_core import PlanarGraph

Message = tuple[int, ...]


def log2_ceil(n: int) -> int:
    """``ceil(log2(n + 1))`` with a floor of 1."""
    return max(1, math.ceil(math.log2(n + 1)))


def message_bits(msg: Message) -> int:
    total = 0
    for x in msg:
        if not isinstance(x, int) or x < 0:
            raise ProtocolError(f"message fields must be non-negative ints, got {x!r}")
        total += max(1, x.bit_length())
    return total


@dataclass(frozen=True)
class SimConfig:
    mode: str = "charged"
    bits: int | None = None
    charge_alpha: int = 1
    seed: int = 0
    scheduler: str = "ascending"

    def __post_init__(self) -> None:
        if self.mode not in ("literal", "charged"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.scheduler not in ("ascending", "descending", "shuffled"):
            raise ValueError(f"unknown scheduler {self.scheduler!r}")

    def budget(self, n: int) -> int:
        b = self.bits if self.bits is not None else 4 * log2_ceil(n)
        if b < log2_ceil(n):
            raise ValueError(f"bit budget {b} cannot hold a node id for n={n}")
        return b


@dataclass(frozen=True)
class LocalView:
    node: int
    neighbors: tuple[int, ...]
    n: int
    data: Any = None


class NodeProgram(Protocol):
    def init(self, view: LocalView) -> Any: ...

    def step(self, state: Any, inbox: Mapping[int, Message]) -> tuple[Any, dict[int, Message], bool]: ...

    def output(self, state: Any) -> Any: ...


@dataclass
class ExecutionReport:
    rounds_literal: int = 0
    rounds_charged: int = 0
    messages: int = 0
    max_bits: int = 0
    primitives: dict[str, int] = field(default_factory=dict)
    outputs: dict[int, Any] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "rounds_literal": self.rounds_literal,
            "rounds_charged": self.rounds_charged,
            "messages": self.messages,
            "max_bits": self.max_bits,
            "primitives": dict(sorted(self.primitives.items())),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"))


def _order(nodes: list[int], scheduler: str, seed: int, rnd: int) -> list[int]:
    if scheduler == "ascending":
        return nodes
    if scheduler == "descending":
        return nodes[::-1]
    out = list(nodes)
    random.Random(seed * 1_000_003 + rnd).shuffle(out)
    return out


def run(
    g: PlanarGraph,
    prog: NodeProgram,
    cfg: SimConfig | None = None,
    max_rounds: int = 1_000_000,
    *,
    data: Mapping[int, Any] | None = None,
    nodes: Iterable[int] | None = None,
    budget_n: int | None = None,
) -> ExecutionReport:
    """Execute ``prog`` on ``g`` in lockstep rounds.

    ``nodes`` restricts execution to a subset (others stay silent); ``data``
    supplies per-node inputs placed in :attr:`LocalView.data`.  ``budget_n``
    sets the ``n`` used for the bit budget (defaults to ``g.n``).
    """
    cfg = cfg or SimConfig(mode="literal")
    budget = cfg.budget(budget_n if budget_n is not None else g.n)
    members = sorted(set(nodes)) if nodes is not None else list(range(g.n))
    member_set = set(members)
    states: dict[int, Any] = {}
    for v in members:
        view = LocalView(v, g.rotations[v], g.n, None if data is None else data.get(v))
        states[v] = prog.init(view)
    awake: set[int] = set()
    inbox: dict[int, dict[int, Message]] = {}
    report = ExecutionReport()
    last_send = 0
    rnd = 0
    while True:
        rnd += 1
        if rnd == 1:
            active = members
        else:
            if not awake and not inbox:
                break
            active = sorted(awake.union(inbox))
        if rnd > max_rounds:
            raise RoundLimitExceeded(f"program still active after {max_rounds} rounds")
        pending: dict[int, dict[int, Message]] = {}
        sent = 0
        for v in _order(active, cfg.scheduler, cfg.seed, rnd):
            st, out, h = prog.step(states[v], inbox.get(v, {}))
            states[v] = st
            if h:
                awake.discard(v)
            else:
                awake.add(v)
            for dst, msg in out.items():
                if dst not in member_set or not g.has_edge(v, dst):
                    raise ProtocolError(f"node {v} sent to non-neighbour {dst}")
                msg = tuple(msg)
                b = message_bits(msg)
                if b > budget:
                    raise BitBudgetExceeded(f"node {v} sent {b} bits > budget {budget}: {msg}")
                report.max_bits = max(report.max_bits, b)
                pending.setdefault(dst, {})[v] = msg
                sent += 1
        if sent:
            last_send = rnd
            report.messages += sent
        # inboxes are keyed in sender order so delivery is schedule independent
        inbox = {dst: dict(sorted(box.items())) for dst, box in pending.items()}
    report.rounds_literal = max(1, last_send)
    report.rounds_charged = report.rounds_literal
    output = getattr(prog, "output", None)
    report.outputs = {v: (output(states[v]) if output else states[v]) for v in members}
    return report


# -- global cost accounting ----------------------------------------------------


@dataclass
class CostMeter:
    """Accumulates costs across primitive calls.

    Work done for disjoint parts is composed with :meth:`parallel`: rounds
    become the maximum over branches, message counts add up, and each
    primitive name keeps the largest per-branch invocation count (branches
    issue their calls in lockstep).
    """

    rounds_literal: int = 0
    rounds_charged: int = 0
    messages: int = 0
    max_bits: int = 0
    primitives: Counter = field(default_factory=Counter)

    def add_run(self, name: str, rep: ExecutionReport) -> None:
        self.rounds_literal += rep.rounds_literal
        self.rounds_charged += rep.rounds_literal
        self.messages += rep.messages
        self.max_bits = max(self.max_bits, rep.max_bits)
        self.primitives[name] += 1

    def add_charge(self, name: str, rounds: int) -> None:
        self.rounds_charged += rounds
        self.primitives[name] += 1

    @property
    def invocations(self) -> int:
        return sum(self.primitives.values())

    @contextmanager
    def parallel(self) -> Iterator[Callable[[], "CostMeter"]]:
        branches: list[CostMeter] = []

        def branch() -> CostMeter:
            b = CostMeter()
            branches.append(b)
            return b

        yield branch
        if not branches:
            return
        self.rounds_literal += max(b.rounds_literal for b in branches)
        self.rounds_charged += max(b.rounds_charged for b in branches)
        self.messages += sum(b.messages for b in branches)
        self.max_bits = max([self.max_bits] + [b.max_bits for b in branches])
        names = set().union(*(b.primitives for b in branches))
        for name in names:
            self.primitives[name] += max(b.primitives.get(name, 0) for b in branches)

    def report(self) -> ExecutionReport:
        return ExecutionReport(
            rounds_literal=self.rounds_literal,
            rounds_charged=self.rounds_charged,
            messages=self.messages,
            max_bits=self.max_bits,
            primitives=dict(self.primitives),
        )


def charge_primitive(meter: CostMeter, name: str, diameter: int, n: int, alpha: int = 1) -> int:
    """Bill one charged primitive call: ``alpha * D * ceil(log2(n + 1))`` rounds."""
    rounds = alpha * max(1, diameter) * log2_ceil(n)
    meter.add_charge(name, rounds)
    return rounds
