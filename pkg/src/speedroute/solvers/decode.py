"""Turning a permutation of required events into a concrete walk.

Three stitching modes:

``greedy``
    One label is carried between required events. Each segment is the
    fastest state-aware walk to the next event that touches no other required
    event on the way, so the genome alone fixes the visiting order.

``relaxed``
    One label, but segments may cross any event and a target already covered
    on the way is skipped. Used for large instances: on sparse maps some
    required events sit on every path to others, so strict orders are rarely
    realisable.

``exhaustive``
    Every distinct arrival state at the next event is carried forward with
    its cheapest time, and segments may cross events already covered. The
    minimum over all permutations then equals the state-graph optimum,
    because every walk's first-visit order is some permutation.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .._num import INF
from ..errors import InfeasibleError
from ..model.types import GameModel, Route
from ..statespace import Label, SearchConfig, StateSpace
from .operators import permutation_items, precedence

EXHAUSTIVE_LIMIT = 6
STITCH_MODES = ("greedy", "relaxed", "exhaustive")


def resolve_stitch(mode: str, n_items: int) -> str:
    if mode == "auto":
        return "exhaustive" if n_items <= EXHAUSTIVE_LIMIT else "relaxed"
    if mode not in STITCH_MODES:
        raise ValueError(f"unknown stitch mode {mode!r}")
    return mode


class Decoder:
    def __init__(self, m: GameModel, cfg: SearchConfig = SearchConfig(), stitch: str = "auto"):
        self.model = m
        self.cfg = cfg
        self.items = permutation_items(m)
        self.prec = precedence(m, self.items)
        self.stitch = resolve_stitch(stitch, len(self.items))
        self.space = StateSpace(m, cfg)
        self._cache: dict = {}

    def _check(self, perm):
        if sorted(perm) != list(self.items):
            raise ValueError(f"not a permutation of the required events {list(self.items)}: {list(perm)}")

    def decode(self, perm: Sequence[str], difficulty_cap: Optional[int] = None) -> Route:
        """Route for ``perm``; raises :class:`InfeasibleError` naming the failing pair."""
        perm = tuple(perm)
        key = (perm, difficulty_cap)
        if key not in self._cache:
            self._check(perm)
            try:
                self._cache[key] = self._decode(perm, difficulty_cap)
            except InfeasibleError as exc:
                self._cache[key] = exc
        hit = self._cache[key]
        if isinstance(hit, InfeasibleError):
            raise hit
        return hit

    def decode_below(self, perm: Sequence[str], bound, difficulty_cap: Optional[int] = None) -> Optional[Route]:
        """Decoded route if it is faster than ``bound``, else None (branch and bound for oracles)."""
        perm = tuple(perm)
        hit = self._cache.get((perm, difficulty_cap))
        if hit is None:
            self._check(perm)
            try:
                hit = self._decode(perm, difficulty_cap, bound)
            except InfeasibleError:
                return None
        if isinstance(hit, InfeasibleError) or hit.total_time >= bound:
            return None
        return hit

    def time(self, perm: Sequence[str], difficulty_cap: Optional[int] = None):
        """Total time of the decoded route, or ``inf`` when infeasible."""
        try:
            return self.decode(perm, difficulty_cap).total_time
        except InfeasibleError:
            return INF

    def times(self, perms: Iterable[Sequence[str]], workers: int = 1, difficulty_cap=None) -> list:
        perms = [tuple(p) for p in perms]
        if workers > 1:
            todo = list(dict.fromkeys(p for p in perms if (p, difficulty_cap) not in self._cache))
            if len(todo) > 1:
                self._fill_parallel(todo, workers, difficulty_cap)
        return [self.time(p, difficulty_cap) for p in perms]

    def _fill_parallel(self, perms, workers, cap):
        with ProcessPoolExecutor(
            max_workers=workers,
            initializer=_worker_init,
            initargs=(self.model, self.cfg, self.stitch),
        ) as pool:
            # map preserves submission order, so the cache fills identically for any worker count
            for perm, result in zip(perms, pool.map(_worker_decode, perms, [cap] * len(perms))):
                self._cache[(perm, cap)] = result

    # -- stitching ----------------------------------------------------------

    def _decode(self, perm, cap, bound=None) -> Route:
        space, m = self.space, self.model
        required = m.required
        labels = [Label(Fraction(0), space.initial())]
        prev = m.start
        exhaustive = self.stitch == "exhaustive"
        strict = self.stitch == "greedy"
        relaxed = self.stitch == "relaxed"
        for target in perm:
            if relaxed and target in space.covered(labels[0].state):
                continue

            def at_target(s, target=target):
                return s.at == target

            if relaxed:
                may_enter = None
            elif exhaustive:
                def may_enter(s, dst, target=target):
                    return dst == target or dst not in required or dst in s.done or dst in s.seen
            else:
                def may_enter(s, dst, target=target):
                    return dst == target or dst not in required

            labels = space.search(
                labels, at_target, may_enter, first_only=not exhaustive, difficulty_cap=cap, bound=bound
            )
            if not labels:
                raise InfeasibleError(
                    f"segment {prev!r} -> {target!r} infeasible", kind="segment", pair=(prev, target)
                )
            prev = target
        if not strict:
            final_enter = None
        else:
            ends = m.ends

            def final_enter(s, dst):
                return dst not in required or dst in ends

        goals = space.search(
            labels, space.is_complete, final_enter, first_only=True, difficulty_cap=cap, bound=bound
        )
        if not goals:
            raise InfeasibleError(f"no end reachable after {prev!r}", kind="segment", pair=(prev, None))
        return space.route(goals[0])


_WORKER: Optional[Decoder] = None


def _worker_init(model, cfg, stitch):
    global _WORKER
    _WORKER = Decoder(model, cfg, stitch)


def _worker_decode(perm, cap):
    try:
        return _WORKER._decode(perm, cap)
    except InfeasibleError as exc:
        return exc
