"""Core data types of the event digraph.

Everything here is immutable once built; :class:`GameModel` validates its own
invariants on construction so every transform returns a checked model.
"""

from __future__ import annotations

import math
import operator
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from ..errors import ModelValidationError

COMPONENTS = ("time", "difficulty", "hidden_gain")
EFFECTS = ("set", "add", "multiply")
MAX_DIFFICULTY = 10


@dataclass(frozen=True)
class EdgeWeight:
    time: Fraction = Fraction(0)
    difficulty: int = 0
    hidden_gain: Fraction = Fraction(0)

    def replace(self, component: str, value) -> "EdgeWeight":
        parts = {"time": self.time, "difficulty": self.difficulty, "hidden_gain": self.hidden_gain}
        parts[component] = value
        return EdgeWeight(**parts)


@dataclass(frozen=True)
class EventNode:
    id: str
    repeatable: bool = False
    grants: tuple[tuple[str, int], ...] = ()
    cluster_tag: Optional[str] = None
    tags: tuple[str, ...] = ()


@dataclass(frozen=True)
class Edge:
    id: str
    src: str
    dst: str
    base: EdgeWeight = EdgeWeight()
    requires: tuple[tuple[str, int], ...] = ()
    preconditions: tuple[str, ...] = ()
    tags: tuple[str, ...] = ()


@dataclass(frozen=True)
class ResourceDef:
    id: str
    initial: int = 0
    cap: Optional[int] = None  # None = unbounded

    def clamp(self, value: int) -> int:
        value = max(0, value)
        return value if self.cap is None else min(self.cap, value)


@dataclass(frozen=True)
class GameState:
    """Snapshot of a walk in progress.

    ``done`` holds triggered one-time events, ``seen`` the repeatable events
    visited at least once. ``visits_left`` is only populated by the state-space
    search, aligned with :attr:`GameModel.repeatable_ids`.
    """

    at: str
    done: frozenset = frozenset()
    seen: frozenset = frozenset()
    resources: tuple[int, ...] = ()
    clock: Optional[Fraction] = None
    visits_left: tuple[int, ...] = ()

    def has_visited(self, node_id: str) -> bool:
        return node_id in self.done or node_id in self.seen


# -- rule conditions ---------------------------------------------------------


class Condition:
    def holds(self, state: GameState, model: "GameModel") -> bool:
        raise NotImplementedError

    def nodes(self) -> set[str]:
        return set()

    def resources(self) -> set[str]:
        return set()

    def uses_clock(self) -> bool:
        return False


@dataclass(frozen=True)
class Always(Condition):
    value: bool = True

    def holds(self, state, model):
        return self.value


@dataclass(frozen=True)
class Done(Condition):
    node: str

    def holds(self, state, model):
        return state.has_visited(self.node)

    def nodes(self):
        return {self.node}


_CMP = {
    "<": operator.lt,
    "<=": operator.le,
    ">": operator.gt,
    ">=": operator.ge,
    "==": operator.eq,
    "!=": operator.ne,
}


@dataclass(frozen=True)
class ResourceCmp(Condition):
    resource: str
    op: str
    value: int

    def holds(self, state, model):
        return _CMP[self.op](state.resources[model.resource_index[self.resource]], self.value)

    def resources(self):
        return {self.resource}


@dataclass(frozen=True)
class ClockIn(Condition):
    """Half-open window ``[lo, hi)`` on the in-game clock."""

    lo: Fraction
    hi: Fraction

    def holds(self, state, model):
        if state.clock is None:
            return False
        return self.lo <= state.clock < self.hi

    def uses_clock(self):
        return True


@dataclass(frozen=True)
class AllOf(Condition):
    items: tuple[Condition, ...]

    def holds(self, state, model):
        return all(c.holds(state, model) for c in self.items)

    def nodes(self):
        return set().union(*(c.nodes() for c in self.items))

    def resources(self):
        return set().union(*(c.resources() for c in self.items))

    def uses_clock(self):
        return any(c.uses_clock() for c in self.items)


@dataclass(frozen=True)
class AnyOf(AllOf):
    def holds(self, state, model):
        return any(c.holds(state, model) for c in self.items)


@dataclass(frozen=True)
class Not(Condition):
    item: Condition

    def holds(self, state, model):
        return not self.item.holds(state, model)

    def nodes(self):
        return self.item.nodes()

    def resources(self):
        return self.item.resources()

    def uses_clock(self):
        return self.item.uses_clock()


# -- rules -------------------------------------------------------------------


@dataclass(frozen=True)
class WeightRule:
    id: str
    component: str
    effect: str
    value: Fraction
    condition: Condition = Always()
    priority: int = 0
    edge_ids: Optional[frozenset] = None  # None together with no tags = every edge
    edge_tags: frozenset = frozenset()

    @property
    def sort_key(self):
        return (self.priority, self.id)

    def selects(self, edge: Edge) -> bool:
        if self.edge_ids is None and not self.edge_tags:
            return True
        if self.edge_ids is not None and edge.id in self.edge_ids:
            return True
        return any(t in self.edge_tags for t in edge.tags)

    def apply(self, current):
        if self.effect == "set":
            out = self.value
        elif self.effect == "add":
            out = current + self.value
        else:
            out = current * self.value
        if self.component == "difficulty":
            # round half up, then keep on the 0..10 scale
            return min(MAX_DIFFICULTY, max(0, math.floor(Fraction(out) + Fraction(1, 2))))
        return max(Fraction(0), Fraction(out))


# -- the model ---------------------------------------------------------------


@dataclass(frozen=True)
class GameModel:
    nodes: tuple[EventNode, ...]
    edges: tuple[Edge, ...]
    start: str
    ends: frozenset
    required: frozenset = frozenset()
    rules: tuple[WeightRule, ...] = ()
    resources: tuple[ResourceDef, ...] = ()
    clock_period: Optional[Fraction] = None
    reduced: bool = False  # set when nodes were dropped by reduce_model; optimum may be lost

    node_by_id: dict = field(init=False, repr=False, compare=False)
    edge_by_id: dict = field(init=False, repr=False, compare=False)
    out_edges: dict = field(init=False, repr=False, compare=False)
    resource_index: dict = field(init=False, repr=False, compare=False)
    rules_by_edge: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        set_ = object.__setattr__
        set_(self, "ends", frozenset(self.ends))
        set_(self, "required", frozenset(self.required))
        node_by_id = {}
        for i, n in enumerate(self.nodes):
            if n.id in node_by_id:
                raise ModelValidationError(f"nodes[{i}].id", f"duplicate node id {n.id!r}")
            node_by_id[n.id] = n
        edge_by_id = {}
        for i, e in enumerate(self.edges):
            if e.id in edge_by_id:
                raise ModelValidationError(f"edges[{i}].id", f"duplicate edge id {e.id!r}")
            edge_by_id[e.id] = e
        resource_index = {}
        for i, r in enumerate(self.resources):
            if r.id in resource_index:
                raise ModelValidationError(f"resources[{i}].id", f"duplicate resource id {r.id!r}")
            resource_index[r.id] = i
        set_(self, "node_by_id", node_by_id)
        set_(self, "edge_by_id", edge_by_id)
        set_(self, "resource_index", resource_index)
        self._validate()

        out = {n: [] for n in node_by_id}
        for e in sorted(self.edges, key=lambda e: e.id):
            out[e.src].append(e)
        set_(self, "out_edges", {k: tuple(v) for k, v in out.items()})
        ordered = sorted(self.rules, key=lambda r: r.sort_key)
        set_(self, "rules_by_edge", {e.id: tuple(r for r in ordered if r.selects(e)) for e in self.edges})

    def _validate(self):
        nodes, res = self.node_by_id, self.resource_index

        def need_node(path, nid):
            if nid not in nodes:
                raise ModelValidationError(path, f"unknown node {nid!r}")

        def need_res(path, rid):
            if rid not in res:
                raise ModelValidationError(path, f"unknown resource {rid!r}")

        need_node("start", self.start)
        if not self.ends:
            raise ModelValidationError("ends", "at least one end event is required")
        for nid in sorted(self.ends):
            need_node("ends", nid)
        for nid in sorted(self.required):
            need_node("required", nid)
        for i, n in enumerate(self.nodes):
            for rid, amount in n.grants:
                need_res(f"nodes[{i}].grants", rid)
                if amount < 0:
                    raise ModelValidationError(f"nodes[{i}].grants.{rid}", "grant must be >= 0")
        for i, e in enumerate(self.edges):
            need_node(f"edges[{i}].from", e.src)
            need_node(f"edges[{i}].to", e.dst)
            w = e.base
            if w.time < 0:
                raise ModelValidationError(f"edges[{i}].time", "time >= 0 violated")
            if not 0 <= w.difficulty <= MAX_DIFFICULTY:
                raise ModelValidationError(f"edges[{i}].difficulty", "difficulty must be in 0..10")
            if w.hidden_gain < 0:
                raise ModelValidationError(f"edges[{i}].hidden_gain", "hidden_gain >= 0 violated")
            for rid, amount in e.requires:
                need_res(f"edges[{i}].requires", rid)
                if amount < 0:
                    raise ModelValidationError(f"edges[{i}].requires.{rid}", "amount must be >= 0")
            for nid in e.preconditions:
                need_node(f"edges[{i}].preconditions", nid)
        for i, r in enumerate(self.resources):
            if r.initial < 0 or (r.cap is not None and not 0 <= r.initial <= r.cap):
                raise ModelValidationError(f"resources[{i}]", "need 0 <= initial <= cap")
        if self.clock_period is not None and self.clock_period <= 0:
            raise ModelValidationError("clock.period", "period must be positive")
        seen_rules = set()
        for i, r in enumerate(self.rules):
            path = f"rules[{i}]"
            if r.id in seen_rules:
                raise ModelValidationError(f"{path}.id", f"duplicate rule id {r.id!r}")
            seen_rules.add(r.id)
            if r.component not in COMPONENTS:
                raise ModelValidationError(f"{path}.component", f"unknown component {r.component!r}")
            if r.effect not in EFFECTS:
                raise ModelValidationError(f"{path}.effect", f"unknown effect {r.effect!r}")
            if r.component == "difficulty" and r.effect != "multiply" and Fraction(r.value).denominator != 1:
                raise ModelValidationError(f"{path}.value", "difficulty set/add values must be integers")
            for eid in sorted(r.edge_ids or ()):
                if eid not in self.edge_by_id:
                    raise ModelValidationError(f"{path}.edges", f"unknown edge {eid!r}")
            for nid in sorted(r.condition.nodes()):
                need_node(f"{path}.when", nid)
            for rid in sorted(r.condition.resources()):
                need_res(f"{path}.when", rid)
            if r.condition.uses_clock() and self.clock_period is None:
                raise ModelValidationError(f"{path}.when", "clock condition but model has no clock")

    # convenience views

    @property
    def node_ids(self) -> list[str]:
        return [n.id for n in self.nodes]

    @property
    def repeatable_ids(self) -> tuple[str, ...]:
        return tuple(sorted(n.id for n in self.nodes if n.repeatable))

    def initial_resources(self) -> tuple[int, ...]:
        return tuple(r.initial for r in self.resources)

    def has_clock_rules(self) -> bool:
        return any(r.condition.uses_clock() for r in self.rules)

    def replace(self, **changes) -> "GameModel":
        fields = dict(
            nodes=self.nodes,
            edges=self.edges,
            start=self.start,
            ends=self.ends,
            required=self.required,
            rules=self.rules,
            resources=self.resources,
            clock_period=self.clock_period,
            reduced=self.reduced,
        )
        fields.update(changes)
        return GameModel(**fields)


@dataclass(frozen=True)
class Route:
    """A feasible walk with its resolved per-step weights and totals."""

    steps: tuple[str, ...]
    weights: tuple[EdgeWeight, ...]
    nodes: tuple[str, ...]
    total_time: Fraction
    max_difficulty: int
    total_hidden_gain: Fraction
    covered: frozenset

    @property
    def objectives(self) -> tuple[Fraction, int]:
        return (self.total_time, self.max_difficulty)
