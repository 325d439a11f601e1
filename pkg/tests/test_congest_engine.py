from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from planarsep.congest_engine import (
    CostMeter,
    SimConfig,
    charge_primitive,
    log2_ceil,
    message_bits,
    run,
)
from planarsep.errors import BitBudgetExceeded, ProtocolError, RoundLimitExceeded
from planarsep.planar_core import bfs_distances, grid, path, random_triangulation


class BfsFlood:
    """Every node learns its hop distance from node 0."""

    def init(self, view):
        nbrs = view.neighbors if view.data is None else view.data
        return {"nbrs": nbrs, "dist": 0 if view.node == 0 else None, "sent": False}

    def step(self, state, inbox):
        if state["dist"] is None and inbox:
            state["dist"] = min(m[0] for m in inbox.values()) + 1
        out = {}
        if state["dist"] is not None and not state["sent"]:
            out = {u: (state["dist"],) for u in state["nbrs"]}
            state["sent"] = True
        return state, out, state["sent"]

    def output(self, state):
        return state["dist"]


class Shout:
    """Sends one oversized message, then stops."""

    def __init__(self, value):
        self.value = value

    def init(self, view):
        return view

    def step(self, state, inbox):
        out = {state.neighbors[0]: (self.value,)} if state.node == 0 and not inbox else {}
        return state, out, True


class Chatter:
    def init(self, view):
        return view

    def step(self, state, inbox):
        return state, {}, False


class Stranger:
    def init(self, view):
        return view

    def step(self, state, inbox):
        return state, ({state.n - 1: (1,)} if state.node == 0 else {}), True


@pytest.mark.parametrize("scheduler", ["ascending", "descending", "shuffled"])
def test_flood_computes_bfs_distances(scheduler):
    g = random_triangulation(60, seed=1)
    rep = run(g, BfsFlood(), SimConfig(mode="literal", scheduler=scheduler, seed=3))
    assert [rep.outputs[v] for v in g.nodes] == bfs_distances(g, 0)
    assert rep.rounds_literal == max(bfs_distances(g, 0)) + 1


def test_reports_do_not_depend_on_the_scheduler():
    g = grid(7)
    reps = [run(g, BfsFlood(), SimConfig(mode="literal", scheduler=s, seed=9)) for s in ("ascending", "descending", "shuffled")]
    assert len({r.to_json() for r in reps}) == 1
    assert len({tuple(sorted(r.outputs.items())) for r in reps}) == 1


def test_bit_budget_aborts():
    g = path(4)
    budget = SimConfig().budget(4)
    run(g, Shout((1 << budget) - 1), SimConfig(mode="literal"))
    with pytest.raises(BitBudgetExceeded):
        run(g, Shout(1 << budget), SimConfig(mode="literal"))


def test_budget_must_hold_an_id():
    with pytest.raises(ValueError):
        SimConfig(bits=2).budget(1000)
    assert SimConfig().budget(255) == 4 * 8


def test_negative_fields_are_protocol_errors():
    with pytest.raises(ProtocolError):
        message_bits((1, -1))
    with pytest.raises(ProtocolError):
        run(path(5), Stranger(), SimConfig(mode="literal"))


def test_round_limit():
    with pytest.raises(RoundLimitExceeded):
        run(path(3), Chatter(), SimConfig(mode="literal"), max_rounds=10)


def test_restricted_node_set():
    g = path(6)
    # node 2 tries to reach node 3, which takes no part
    with pytest.raises(ProtocolError):
        run(g, BfsFlood(), SimConfig(mode="literal"), nodes=[0, 1, 2])
    inner = {0: (1,), 1: (0, 2), 2: (1,)}
    rep = run(g, BfsFlood(), SimConfig(mode="literal"), nodes=[0, 1, 2], data=inner)
    assert rep.outputs == {0: 0, 1: 1, 2: 2}


@given(st.lists(st.integers(0, 1 << 40), min_size=1, max_size=6))
def test_message_bits_counts_each_field(fields):
    assert message_bits(tuple(fields)) == sum(max(1, x.bit_length()) for x in fields)


@settings(max_examples=50)
@given(st.integers(0, 10**6))
def test_log2_ceil(n):
    assert 2 ** log2_ceil(n) >= n + 1
    assert log2_ceil(n) == 1 or 2 ** (log2_ceil(n) - 1) < n + 1


def test_charge_and_parallel_composition():
    meter = CostMeter()
    assert charge_primitive(meter, "x", diameter=10, n=100) == 10 * 7
    with meter.parallel() as branch:
        a, b = branch(), branch()
        charge_primitive(a, "x", 10, 100)
        charge_primitive(a, "x", 10, 100)
        charge_primitive(b, "y", 4, 100)
    rep = meter.report()
    assert rep.rounds_charged == 70 + 140
    assert rep.primitives == {"x": 3, "y": 1}
    assert meter.invocations == 4
