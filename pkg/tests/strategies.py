"""Hypothesis strategies for small random game models."""

from __future__ import annotations

from fractions import Fraction

from hypothesis import assume
from hypothesis import strategies as st

from speedroute.errors import ModelValidationError
from speedroute.model.types import (
    Always,
    AnyOf,
    Done,
    Edge,
    EdgeWeight,
    EventNode,
    GameModel,
    Not,
    ResourceCmp,
    ResourceDef,
    WeightRule,
)

TIMES = [Fraction(0), Fraction(1, 2), Fraction(1), Fraction(2), Fraction(3), Fraction(5)]


@st.composite
def conditions(draw, ids):
    kind = draw(st.sampled_from(["always", "done", "res", "not", "any"]))
    if kind == "always":
        return Always(True)
    if kind == "done":
        return Done(draw(st.sampled_from(ids)))
    if kind == "res":
        return ResourceCmp("r", draw(st.sampled_from([">=", "<", "=="])), draw(st.integers(0, 2)))
    if kind == "not":
        return Not(Done(draw(st.sampled_from(ids))))
    return AnyOf((Done(draw(st.sampled_from(ids))), Done(draw(st.sampled_from(ids)))))


@st.composite
def models(draw, max_nodes=4, with_rules=True, with_resources=True, difficulties=True):
    n = draw(st.integers(3, max_nodes))
    ids = [f"n{i}" for i in range(n)]
    repeatable = draw(st.lists(st.booleans(), min_size=n, max_size=n))
    grants = draw(st.lists(st.sampled_from([0, 0, 1, 2]), min_size=n, max_size=n)) if with_resources else [0] * n
    nodes = tuple(
        EventNode(x, repeatable=repeatable[i] and i not in (0, n - 1), grants=(("r", grants[i]),) if grants[i] else ())
        for i, x in enumerate(ids)
    )
    edges = []
    for a in ids:
        for b in ids:
            if a == b or not draw(st.booleans()):
                continue
            needs = (("r", 1),) if with_resources and draw(st.integers(0, 5)) == 0 else ()
            pre = (draw(st.sampled_from(ids)),) if draw(st.integers(0, 6)) == 0 else ()
            pre = tuple(p for p in pre if p != b)
            diff = draw(st.integers(0, 10)) if difficulties else 0
            tags = ("glitch",) if draw(st.integers(0, 3)) == 0 else ()
            edges.append(Edge(f"{a}-{b}", a, b, EdgeWeight(draw(st.sampled_from(TIMES)), diff), needs, pre, tags))
    assume(edges)
    rules = []
    if with_rules:
        edge_ids = [e.id for e in edges]
        for k in range(draw(st.integers(0, 3))):
            component = draw(st.sampled_from(["time", "time", "difficulty"]))
            effect = draw(st.sampled_from(["set", "add", "multiply"]))
            if effect == "multiply":
                value = draw(st.sampled_from([Fraction(0), Fraction(1, 2), Fraction(2)]))
            else:
                value = Fraction(draw(st.integers(-3, 4)))
            selected = None if draw(st.booleans()) else frozenset(draw(st.lists(st.sampled_from(edge_ids), min_size=1)))
            rules.append(
                WeightRule(
                    id=f"rule{k}",
                    component=component,
                    effect=effect,
                    value=value,
                    condition=draw(conditions(ids)),
                    priority=draw(st.integers(0, 2)),
                    edge_ids=selected,
                )
            )
    required = frozenset(x for x in ids[1:] if draw(st.booleans()))
    try:
        return GameModel(
            nodes=nodes,
            edges=tuple(edges),
            rules=tuple(rules),
            resources=(ResourceDef("r", draw(st.integers(0, 1)), 3),) if with_resources else (),
            start=ids[0],
            ends=frozenset([ids[-1]]),
            required=required,
        )
    except ModelValidationError:
        assume(False)
