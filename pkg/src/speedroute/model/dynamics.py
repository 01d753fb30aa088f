"""Weight resolution and the single-step transition every evaluator shares.

Evaluation order per edge is fixed: check preconditions and resource needs,
resolve the weight against the pre-traversal state, consume resources,
advance the clock, then fire the destination's grants on arrival.
"""

from __future__ import annotations

from fractions import Fraction

from .types import Edge, EdgeWeight, GameModel, GameState


def resolve_weight(m: GameModel, edge_id: str, state: GameState) -> EdgeWeight:
    """Apply every matching rule whose condition holds, in (priority, id) order."""
    w = m.edge_by_id[edge_id].base
    for rule in m.rules_by_edge[edge_id]:
        if rule.condition.holds(state, m):
            current = getattr(w, rule.component)
            w = w.replace(rule.component, rule.apply(current))
    return w


def arrive(m: GameModel, state: GameState, node_id: str) -> GameState:
    node = m.node_by_id[node_id]
    done, seen, res = state.done, state.seen, state.resources
    if node.repeatable:
        fire = True
        if node_id not in seen:
            seen = seen | {node_id}
    else:
        fire = node_id not in done
        if fire:
            done = done | {node_id}
    if fire and node.grants:
        res = list(res)
        for rid, amount in node.grants:
            i = m.resource_index[rid]
            res[i] = m.resources[i].clamp(res[i] + amount)
        res = tuple(res)
    return GameState(node_id, done, seen, res, state.clock, state.visits_left)


def initial_state(m: GameModel) -> GameState:
    clock = Fraction(0) if m.clock_period is not None else None
    blank = GameState(m.start, frozenset(), frozenset(), m.initial_resources(), clock)
    return arrive(m, blank, m.start)


def missing_preconditions(state: GameState, edge: Edge) -> list[str]:
    return [n for n in edge.preconditions if not state.has_visited(n)]


def resource_shortfalls(m: GameModel, state: GameState, edge: Edge) -> list[tuple[str, int, int]]:
    """(resource, have, need) for every requirement the state cannot cover."""
    out = []
    for rid, need in edge.requires:
        have = state.resources[m.resource_index[rid]]
        if have < need:
            out.append((rid, have, need))
    return out


def take_edge(m: GameModel, state: GameState, edge: Edge, weight: EdgeWeight) -> GameState:
    """Consume, advance the clock and arrive. Assumes the checks were done."""
    res = state.resources
    if edge.requires:
        res = list(res)
        for rid, need in edge.requires:
            i = m.resource_index[rid]
            res[i] = max(0, res[i] - need)
        res = tuple(res)
    clock = state.clock
    if clock is not None:
        clock = (clock + weight.time) % m.clock_period
    moved = GameState(state.at, state.done, state.seen, res, clock, state.visits_left)
    return arrive(m, moved, edge.dst)
