"""Route simulation: the reference scorer every solver is checked against."""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Iterable, Optional

from ..errors import RouteError
from .dynamics import initial_state, missing_preconditions, resolve_weight, resource_shortfalls, take_edge
from .types import GameModel, Route


@dataclass(frozen=True)
class Violation:
    kind: str  # unknown-edge | chain | precondition | resource | end | required
    message: str
    step: Optional[int] = None


def _simulate(m: GameModel, steps: Iterable[str]):
    violations: list[Violation] = []
    state = initial_state(m)
    weights, nodes = [], [m.start]
    covered = {m.start}
    for i, eid in enumerate(steps):
        edge = m.edge_by_id.get(eid)
        if edge is None:
            violations.append(Violation("unknown-edge", f"step {i}: unknown edge {eid!r}", i))
            continue
        if edge.src != state.at:
            violations.append(
                Violation("chain", f"step {i}: edge {eid!r} leaves {edge.src!r} but walk is at {state.at!r}", i)
            )
            state = replace(state, at=edge.src)
        for node in missing_preconditions(state, edge):
            violations.append(
                Violation("precondition", f"step {i}: edge {eid!r} needs {node!r} done first", i)
            )
        for rid, have, need in resource_shortfalls(m, state, edge):
            violations.append(
                Violation("resource", f"step {i}: edge {eid!r} needs {need} {rid}, have {have}", i)
            )
        w = resolve_weight(m, eid, state)
        state = take_edge(m, state, edge, w)
        weights.append(w)
        nodes.append(edge.dst)
        covered.add(edge.dst)
    if state.at not in m.ends:
        violations.append(Violation("end", f"walk must end in an end event, stopped at {state.at!r}"))
    for node in sorted(m.required - covered):
        violations.append(Violation("required", f"required event {node!r} never visited"))
    return violations, weights, nodes, covered


def evaluate_route(m: GameModel, steps: Iterable[str]) -> Route:
    """Simulate ``steps`` from the start event and return the scored route.

    Raises :class:`RouteError` carrying every violation when the walk is not
    feasible.
    """
    steps = tuple(steps)
    violations, weights, nodes, covered = _simulate(m, steps)
    if violations:
        raise RouteError(violations)
    return make_route(steps, weights, nodes, covered)


def validate_route(m: GameModel, steps: Iterable[str]) -> list[Violation]:
    return _simulate(m, tuple(steps))[0]


def make_route(steps, weights, nodes, covered) -> Route:
    return Route(
        steps=tuple(steps),
        weights=tuple(weights),
        nodes=tuple(nodes),
        total_time=sum((w.time for w in weights), Fraction(0)),
        max_difficulty=max((w.difficulty for w in weights), default=0),
        total_hidden_gain=sum((w.hidden_gain for w in weights), Fraction(0)),
        covered=frozenset(covered),
    )
