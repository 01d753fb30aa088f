"""Stage-ordering model: clearing a stage earns powers that save time in later stages.

Each stage holds events; an event's save depends on which stage was cleared
before it, and when several earlier stages help, only the best one counts.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations
from pathlib import Path
from typing import Optional, Sequence, Union

from ._num import fmt_rational, to_rational
from .errors import ModelParseError, ModelValidationError
from .model.types import AnyOf, Done, Edge, EdgeWeight, EventNode, GameModel, WeightRule
from .solvers.ga import evolve_permutations
from .solvers.params import SolverParams

STAGES_SCHEMA = "speedroute-stages/1"
MAX_EXACT = 10
START_ID = "__start__"


@dataclass(frozen=True)
class StageEvent:
    id: str
    saves: tuple[tuple[str, int], ...] = ()
    base_cost: Optional[Fraction] = None

    def best_save(self, cleared) -> int:
        return max((v for p, v in self.saves if p in cleared), default=0)


@dataclass(frozen=True)
class Stage:
    id: str
    base_time: Fraction
    events: tuple[StageEvent, ...] = ()


@dataclass(frozen=True)
class StageModel:
    stages: tuple[Stage, ...]

    def __post_init__(self):
        ids = [s.id for s in self.stages]
        if not ids:
            raise ModelValidationError("stages", "need at least one stage")
        for i, s in enumerate(self.stages):
            path = f"stages[{i}]"
            if ids.count(s.id) > 1:
                raise ModelValidationError(f"{path}.id", f"duplicate stage id {s.id!r}")
            if s.id == START_ID:
                raise ModelValidationError(f"{path}.id", f"{START_ID!r} is reserved")
            if s.base_time < 0:
                raise ModelValidationError(f"{path}.base_time", "base_time >= 0 violated")
            event_ids = [e.id for e in s.events]
            worst = 0
            for j, ev in enumerate(s.events):
                epath = f"{path}.events[{j}]"
                if event_ids.count(ev.id) > 1:
                    raise ModelValidationError(f"{epath}.id", f"duplicate event id {ev.id!r}")
                for p, v in ev.saves:
                    if p not in ids or p == s.id:
                        raise ModelValidationError(f"{epath}.saves", f"{p!r} is not another stage")
                    if isinstance(v, bool) or not isinstance(v, int) or v < 0:
                        raise ModelValidationError(f"{epath}.saves.{p}", "save must be an integer >= 0")
                    if ev.base_cost is not None and v > ev.base_cost:
                        raise ModelValidationError(f"{epath}.saves.{p}", "save exceeds the event's base cost")
                worst += max((v for _, v in ev.saves), default=0)
            if worst > s.base_time:
                raise ModelValidationError(f"{path}", "best-case saves exceed the stage's base_time")

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(s.id for s in self.stages)

    def stage(self, sid: str) -> Stage:
        return next(s for s in self.stages if s.id == sid)


@dataclass(frozen=True)
class Score:
    total_time: Fraction
    total_save: int


def _check_order(sm: StageModel, order: Sequence[str]):
    if sorted(order) != sorted(sm.ids):
        raise ValueError(f"ordering must clear every stage exactly once: {list(order)}")


def stage_save(stage: Stage, cleared) -> int:
    return sum(ev.best_save(cleared) for ev in stage.events)


def score_ordering(sm: StageModel, order: Sequence[str]) -> Score:
    _check_order(sm, order)
    cleared: set = set()
    save = 0
    for sid in order:
        save += stage_save(sm.stage(sid), cleared)
        cleared.add(sid)
    base = sum((s.base_time for s in sm.stages), Fraction(0))
    return Score(base - save, save)


@dataclass(frozen=True)
class OrderingResult:
    order: tuple[str, ...]
    score: Score
    log: tuple = ()


def best_ordering(sm: StageModel, mode: str = "exact", params: SolverParams = SolverParams()) -> OrderingResult:
    """Ordering with maximum total save.

    ``exact`` runs a dynamic program over cleared-stage subsets (the save of a
    stage only depends on which stages precede it, not their order);
    ``enumerate`` scores every permutation; ``ga`` evolves orderings.
    """
    n = len(sm.stages)
    if mode == "ga":
        result = evolve_permutations(sm.ids, lambda ps: [-score_ordering(sm, p).total_save for p in ps], params)
        return OrderingResult(result.best, score_ordering(sm, result.best), result.log)
    if mode not in ("exact", "enumerate"):
        raise ValueError(f"unknown mode {mode!r}")
    if n > MAX_EXACT:
        raise ValueError(f"{n} stages; exact search allows at most {MAX_EXACT}")
    if mode == "enumerate":
        best = None
        for p in permutations(sorted(sm.ids)):
            save = score_ordering(sm, p).total_save
            if best is None or save > best[0]:
                best = (save, p)
        return OrderingResult(best[1], score_ordering(sm, best[1]))

    ids = sm.ids
    stages = sm.stages
    full = (1 << n) - 1
    # best[mask] = (save, order) over orderings of exactly the stages in mask
    best = {0: (0, ())}
    for mask in range(1, full + 1):
        cand = None
        for i in range(n):
            if not mask >> i & 1:
                continue
            prev_mask = mask & ~(1 << i)
            prev_save, prev_order = best[prev_mask]
            cleared = {ids[k] for k in range(n) if prev_mask >> k & 1}
            entry = (prev_save + stage_save(stages[i], cleared), prev_order + (ids[i],))
            if cand is None or entry[0] > cand[0] or (entry[0] == cand[0] and entry[1] < cand[1]):
                cand = entry
        best[mask] = cand
    order = best[full][1]
    return OrderingResult(order, score_ordering(sm, order))


# -- conversion to an event graph -------------------------------------------


def edge_id(src: str, dst: str) -> str:
    return f"{src}->{dst}"


def ordering_steps(order: Sequence[str]) -> list[str]:
    """Edge ids of the walk clearing stages in ``order`` on :func:`to_event_graph`'s model."""
    walk = [START_ID, *order]
    return [edge_id(a, b) for a, b in zip(walk, walk[1:])]


def to_event_graph(sm: StageModel) -> GameModel:
    """Event digraph whose route times reproduce :func:`score_ordering` exactly.

    Every edge into a stage costs that stage's base time. For each event the
    distinct save values ``v1 < v2 < ...`` become stacked rules: "some stage
    with save >= vk is done" subtracts ``vk - v(k-1)``, so together they
    subtract exactly the best available save.
    """
    ids = sm.ids
    nodes = [EventNode(START_ID)] + [EventNode(s.id) for s in sm.stages]
    edges = []
    for s in sm.stages:
        for src in (START_ID, *ids):
            if src != s.id:
                edges.append(Edge(edge_id(src, s.id), src, s.id, EdgeWeight(s.base_time)))
    rules = []
    for s in sm.stages:
        into = frozenset(edge_id(src, s.id) for src in (START_ID, *ids) if src != s.id)
        for ev in s.events:
            levels = sorted({v for _, v in ev.saves if v > 0})
            prev = 0
            for k, level in enumerate(levels):
                helpers = tuple(Done(p) for p, v in sorted(ev.saves) if v >= level)
                rules.append(
                    WeightRule(
                        id=f"save:{s.id}:{ev.id}:{k}",
                        component="time",
                        effect="add",
                        value=Fraction(prev - level),
                        condition=AnyOf(helpers),
                        edge_ids=into,
                    )
                )
                prev = level
    return GameModel(
        nodes=tuple(nodes),
        edges=tuple(edges),
        rules=tuple(rules),
        start=START_ID,
        ends=frozenset(ids),
        required=frozenset(ids),
    )


# -- documents ----------------------------------------------------------------


def stage_model_from_document(doc: dict) -> StageModel:
    if not isinstance(doc, dict) or doc.get("schema") != STAGES_SCHEMA:
        raise ModelValidationError("schema", f"expected {STAGES_SCHEMA!r}")
    stages = []
    for i, s in enumerate(doc.get("stages") or []):
        path = f"stages[{i}]"
        if not isinstance(s, dict) or not isinstance(s.get("id"), str):
            raise ModelValidationError(f"{path}.id", "expected a stage object with a string id")
        try:
            base = to_rational(s.get("base_time", 0))
        except (TypeError, ValueError, ZeroDivisionError):
            raise ModelValidationError(f"{path}.base_time", "expected a rational number") from None
        events = []
        for j, ev in enumerate(s.get("events") or []):
            saves = ev.get("saves") or {}
            if not isinstance(saves, dict):
                raise ModelValidationError(f"{path}.events[{j}].saves", "expected an object")
            cost = ev.get("base_cost")
            events.append(
                StageEvent(
                    id=str(ev.get("id", f"e{j}")),
                    saves=tuple(saves.items()),
                    base_cost=None if cost is None else to_rational(cost),
                )
            )
        stages.append(Stage(s["id"], base, tuple(events)))
    return StageModel(tuple(stages))


def load_stage_model(source: Union[str, Path, dict]) -> StageModel:
    if isinstance(source, dict):
        return stage_model_from_document(source)
    text = source if isinstance(source, str) and source.lstrip().startswith("{") else Path(source).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelParseError(f"malformed stage document: {exc}") from None
    return stage_model_from_document(doc)


def _num(v: Fraction):
    return v.numerator if v.denominator == 1 else fmt_rational(v)


def stage_model_to_document(sm: StageModel) -> dict:
    stages = []
    for s in sm.stages:
        events = []
        for ev in s.events:
            d = {"id": ev.id, "saves": dict(ev.saves)}
            if ev.base_cost is not None:
                d["base_cost"] = _num(ev.base_cost)
            events.append(d)
        stages.append({"id": s.id, "base_time": _num(s.base_time), "events": events})
    return {"schema": STAGES_SCHEMA, "stages": stages}
