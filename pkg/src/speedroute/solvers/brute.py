"""Permutation brute force: the independent oracle for the metaheuristics."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations
from typing import Optional

from .._num import INF
from ..errors import InfeasibleError
from ..model.types import GameModel, Route
from ..statespace import SearchConfig
from .decode import EXHAUSTIVE_LIMIT, Decoder
from .operators import respects

GREEDY_LIMIT = 9


@dataclass(frozen=True)
class BruteForceResult:
    route: Route
    order: tuple[str, ...]
    evaluated: int


def feasible_orders(decoder: Decoder):
    """All precedence-respecting permutations, in lexicographic order."""
    for p in permutations(decoder.items):
        if respects(p, decoder.prec):
            yield p


def brute_force(
    m: GameModel,
    cfg: SearchConfig = SearchConfig(),
    mode: str = "greedy",
    decoder: Optional[Decoder] = None,
) -> BruteForceResult:
    """Decode every dependency-feasible order and keep the fastest.

    ``mode="greedy"`` uses greedy stitching (up to 9 required events);
    ``mode="full"`` uses exhaustive stitching (up to 6), which makes the
    result the true optimum of the capped state graph.
    """
    if mode not in ("greedy", "full"):
        raise ValueError(f"unknown brute-force mode {mode!r}")
    stitch = "greedy" if mode == "greedy" else "exhaustive"
    if decoder is None:
        decoder = Decoder(m, cfg, stitch)
    elif decoder.stitch != stitch:
        raise ValueError(f"decoder stitches {decoder.stitch!r}, mode {mode!r} needs {stitch!r}")
    limit = GREEDY_LIMIT if mode == "greedy" else EXHAUSTIVE_LIMIT
    if len(decoder.items) > limit:
        raise ValueError(f"{len(decoder.items)} required events; {mode} brute force allows at most {limit}")

    best = None
    evaluated = 0
    # in full mode any real walk bounds the optimum; a cheap one-label decode gives a tight start
    bound = None
    first = next(feasible_orders(decoder), None)
    if mode == "full" and first is not None:
        quick = Decoder(m, decoder.cfg, "relaxed").time(first)
        bound = None if quick == INF else quick + 1
    for order in feasible_orders(decoder):
        evaluated += 1
        limit_time = best[0].total_time if best is not None else bound
        try:
            route = decoder.decode(order) if limit_time is None else decoder.decode_below(order, limit_time)
        except InfeasibleError:
            continue
        if route is not None and (best is None or route.total_time < best[0].total_time):
            best = (route, order)
    if best is None:
        raise InfeasibleError(f"all {evaluated} dependency-feasible orders are infeasible", kind="disconnected")
    return BruteForceResult(best[0], best[1], evaluated)
