"""Game-state graph expansion and exact label-setting search.

States are generated lazily from the event digraph. Once the state carries
location, triggered events, resources, clock bucket and remaining repeat
visits, every transition has a fixed cost and a plain Dijkstra ordering
becomes valid. ``repeat_cap`` and the resource caps keep the graph finite.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from fractions import Fraction
from itertools import count
from typing import Callable, Iterable, Optional

from .errors import InfeasibleError, StateBudgetExceeded
from .model.dynamics import initial_state, missing_preconditions, resolve_weight, resource_shortfalls, take_edge
from .model.routes import make_route
from .model.types import EdgeWeight, GameModel, GameState, Route


@dataclass(frozen=True)
class SearchConfig:
    repeat_cap: int = 3
    clock_buckets: int = 1
    state_budget: int = 1_000_000
    difficulty_cap: Optional[int] = None

    def __post_init__(self):
        if self.repeat_cap < 0:
            raise ValueError("repeat_cap must be >= 0")
        if self.clock_buckets < 1:
            raise ValueError("clock_buckets must be >= 1")
        if self.state_budget < 1:
            raise ValueError("state_budget must be >= 1")
        if self.difficulty_cap is not None and not 0 <= self.difficulty_cap <= 10:
            raise ValueError("difficulty_cap must be in 0..10")


@dataclass
class SearchStats:
    expanded: int = 0
    frontier_peak: int = 0

    def as_dict(self):
        return {"states_expanded": self.expanded, "frontier_peak": self.frontier_peak}


@dataclass(frozen=True)
class SearchResult:
    route: Route
    stats: SearchStats


class Label:
    """A settled or tentative path to a state; parents chain back to the start."""

    __slots__ = ("time", "state", "parent", "edge_id", "weight", "depth")

    def __init__(self, time, state, parent=None, edge_id=None, weight=None):
        self.time = time
        self.state = state
        self.parent = parent
        self.edge_id = edge_id
        self.weight = weight
        self.depth = 0 if parent is None else parent.depth + 1


class StateSpace:
    """Lazy successor generator over the game-state graph of one model."""

    _MEMO_LIMIT = 500_000

    def __init__(self, m: GameModel, cfg: SearchConfig = SearchConfig()):
        self.model = m
        self.cfg = cfg
        referenced = set(m.required)
        for n in m.nodes:
            if n.grants:
                referenced.add(n.id)
        for e in m.edges:
            referenced.update(e.preconditions)
        for r in m.rules:
            referenced.update(r.condition.nodes())
        # only events that can change a future outcome enter state identity
        self.relevant = frozenset(referenced)
        self.tracked = tuple(n for n in m.repeatable_ids if n in self.relevant)
        self._track_index = {n: i for i, n in enumerate(self.tracked)}
        self._memo: dict = {}

    # -- states -------------------------------------------------------------

    def _normalise(self, s: GameState, visits: tuple) -> GameState:
        done = s.done if s.done <= self.relevant else s.done & self.relevant
        seen = s.seen if s.seen <= self.relevant else s.seen & self.relevant
        return GameState(s.at, done, seen, s.resources, s.clock, visits)

    def initial(self) -> GameState:
        s = initial_state(self.model)
        visits = [self.cfg.repeat_cap + 1] * len(self.tracked)
        if s.at in self._track_index:
            visits[self._track_index[s.at]] -= 1
        return self._normalise(s, tuple(visits))

    def bucket(self, s: GameState):
        if s.clock is None:
            return None
        period = self.model.clock_period
        return int(s.clock * self.cfg.clock_buckets // period)

    def key(self, s: GameState):
        return (s.at, s.done, s.seen, s.resources, self.bucket(s), s.visits_left)

    def successors(self, s: GameState) -> list[tuple[str, EdgeWeight, GameState]]:
        """All feasible single-edge moves from ``s`` (ignoring the difficulty cap)."""
        hit = self._memo.get(s)
        if hit is not None:
            return hit
        m = self.model
        out = []
        for edge in m.out_edges[s.at]:
            ti = self._track_index.get(edge.dst)
            if ti is not None and s.visits_left[ti] == 0:
                continue
            if edge.preconditions and missing_preconditions(s, edge):
                continue
            if edge.requires and resource_shortfalls(m, s, edge):
                continue
            w = resolve_weight(m, edge.id, s)
            nxt = take_edge(m, s, edge, w)
            visits = s.visits_left
            if ti is not None:
                visits = visits[:ti] + (visits[ti] - 1,) + visits[ti + 1 :]
            out.append((edge.id, w, self._normalise(nxt, visits)))
        if len(self._memo) < self._MEMO_LIMIT:
            self._memo[s] = out
        return out

    def covered(self, s: GameState) -> frozenset:
        return s.done | s.seen

    def is_complete(self, s: GameState) -> bool:
        return s.at in self.model.ends and self.model.required <= (s.done | s.seen)

    # -- search -------------------------------------------------------------

    def search(
        self,
        sources: Iterable[Label],
        is_goal: Callable[[GameState], bool],
        may_enter: Optional[Callable[[GameState, str], bool]] = None,
        first_only: bool = True,
        difficulty_cap: Optional[int] = None,
        stats: Optional[SearchStats] = None,
        bound=None,
    ) -> list[Label]:
        """Multi-source Dijkstra on time.

        Goal labels are recorded and not expanded further. With
        ``first_only`` the search stops at the first goal popped; otherwise it
        returns the cheapest label of every distinct goal state. Equal times pop
        larger done-sets first, then smaller node ids. Labels costing ``bound``
        or more are never queued.
        """
        cap = self.cfg.difficulty_cap
        if difficulty_cap is not None:
            cap = difficulty_cap if cap is None else min(cap, difficulty_cap)
        stats = stats if stats is not None else SearchStats()
        tick = count()
        heap = []
        best: dict = {}
        for lab in sources:
            if bound is not None and lab.time >= bound:
                continue
            k = self.key(lab.state)
            if k in best and best[k] <= lab.time:
                continue
            best[k] = lab.time
            s = lab.state
            heapq.heappush(heap, (lab.time, -len(s.done) - len(s.seen), s.at, next(tick), lab))
        settled = set()
        goals = []
        budget = self.cfg.state_budget
        while heap:
            stats.frontier_peak = max(stats.frontier_peak, len(heap))
            time, _, _, _, lab = heapq.heappop(heap)
            k = self.key(lab.state)
            if k in settled:
                continue
            settled.add(k)
            stats.expanded += 1
            if stats.expanded > budget:
                raise InfeasibleError(
                    f"state budget of {budget} exhausted before reaching a goal",
                    kind="budget",
                    expanded=stats.expanded - 1,
                )
            if is_goal(lab.state):
                goals.append(lab)
                if first_only:
                    return goals
                continue
            for edge_id, w, nxt in self.successors(lab.state):
                if cap is not None and w.difficulty > cap:
                    continue
                if may_enter is not None and not may_enter(lab.state, nxt.at):
                    continue
                nk = self.key(nxt)
                if nk in settled:
                    continue
                t = time + w.time
                if bound is not None and t >= bound:
                    continue
                if nk in best and best[nk] <= t:
                    continue
                best[nk] = t
                heapq.heappush(
                    heap,
                    (t, -len(nxt.done) - len(nxt.seen), nxt.at, next(tick), Label(t, nxt, lab, edge_id, w)),
                )
        return goals

    def route(self, lab: Label) -> Route:
        steps, weights, nodes = [], [], []
        cur = lab
        while cur.parent is not None:
            steps.append(cur.edge_id)
            weights.append(cur.weight)
            nodes.append(cur.state.at)
            cur = cur.parent
        nodes.append(cur.state.at)
        steps.reverse()
        weights.reverse()
        nodes.reverse()
        return make_route(steps, weights, nodes, set(nodes))


def expand_and_search(m: GameModel, cfg: SearchConfig = SearchConfig()) -> SearchResult:
    """Minimum-time route over the capped state graph.

    Raises :class:`InfeasibleError` with ``kind="disconnected"`` when every
    reachable state was explored without a goal, ``kind="budget"`` when the
    state budget ran out first.
    """
    space = StateSpace(m, cfg)
    stats = SearchStats()
    goals = space.search([Label(Fraction(0), space.initial())], space.is_complete, stats=stats)
    if not goals:
        raise InfeasibleError(
            "no route reaches an end event covering all required events within the caps",
            kind="disconnected",
            expanded=stats.expanded,
        )
    return SearchResult(space.route(goals[0]), stats)


def count_states(m: GameModel, cfg: SearchConfig = SearchConfig()) -> int:
    """Number of distinct states reachable from the start under ``cfg``."""
    space = StateSpace(m, cfg)
    cap = cfg.difficulty_cap
    start = space.initial()
    seen = {space.key(start)}
    frontier = [start]
    while frontier:
        nxt_frontier = []
        for s in frontier:
            for _, w, nxt in space.successors(s):
                if cap is not None and w.difficulty > cap:
                    continue
                k = space.key(nxt)
                if k in seen:
                    continue
                if len(seen) >= cfg.state_budget:
                    raise StateBudgetExceeded(
                        f"state budget of {cfg.state_budget} hit while counting", partial=len(seen)
                    )
                seen.add(k)
                nxt_frontier.append(nxt)
        frontier = nxt_frontier
    return len(seen)
