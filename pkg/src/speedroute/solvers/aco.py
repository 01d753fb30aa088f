"""Ant colony search over orders of the required events."""

from __future__ import annotations

import heapq
import random
from fractions import Fraction
from typing import Optional

from .._num import INF
from ..errors import InfeasibleError
from ..model.dynamics import initial_state, resolve_weight
from ..model.types import GameModel
from ..statespace import SearchConfig
from .decode import Decoder
from .ga import SolveResult, _log_row
from .params import SolverParams


def snapshot_distances(m: GameModel, sources) -> dict:
    """Shortest times between events with every edge frozen at its start-state weight."""
    s0 = initial_state(m)
    w = {e.id: float(resolve_weight(m, e.id, s0).time) for e in m.edges}
    out = {}
    for src in sources:
        dist = {src: 0.0}
        heap = [(0.0, src)]
        while heap:
            d, u = heapq.heappop(heap)
            if d > dist[u]:
                continue
            for e in m.out_edges[u]:
                nd = d + w[e.id]
                if nd < dist.get(e.dst, INF):
                    dist[e.dst] = nd
                    heapq.heappush(heap, (nd, e.dst))
        out[src] = dist
    return out


def solve_aco(
    m: GameModel,
    params: SolverParams = SolverParams(),
    cfg: SearchConfig = SearchConfig(),
    decoder: Optional[Decoder] = None,
) -> SolveResult:
    """Ants build orders step by step with P(j) ∝ tau^alpha * eta^beta.

    eta is the inverse snapshot distance, tau evaporates by ``evaporation``
    each iteration and the iteration-best ant deposits in proportion to
    1 / total_time. Candidates whose predecessors are not yet placed are masked.
    When every candidate weight is zero the ant falls back to the eta-greedy choice.
    """
    decoder = decoder or Decoder(m, cfg, params.stitch)
    ap = params.aco
    items, prec = decoder.items, decoder.prec
    rng = random.Random(params.seed)
    origins = (m.start,) + items
    dist = snapshot_distances(m, origins)
    eta = {}
    for a in origins:
        for b in items:
            d = dist[a].get(b, INF)
            eta[a, b] = 1e-12 if d == INF else 1.0 / max(d, 1e-9)
    tau = {k: 1.0 for k in eta}
    scale = None  # deposit normaliser: time of the first feasible tour

    def construct():
        cur, placed, order = m.start, set(), []
        remaining = list(items)
        while remaining:
            cands = [x for x in remaining if prec[x] <= placed]
            if not cands:
                raise InfeasibleError("precedence cycle among required events", kind="disconnected")
            weights = [(tau[cur, x] ** ap.alpha) * (eta[cur, x] ** ap.beta) for x in cands]
            total = sum(weights)
            if total <= 0.0:
                pick = max(range(len(cands)), key=lambda i: (eta[cur, cands[i]], -i))
            else:
                r = rng.random() * total
                acc, pick = 0.0, len(cands) - 1
                for i, wgt in enumerate(weights):
                    acc += wgt
                    if r < acc:
                        pick = i
                        break
            cur = cands[pick]
            order.append(cur)
            placed.add(cur)
            remaining.remove(cur)
        return tuple(order)

    best = (INF, None)
    log = []
    for it in range(max(1, ap.iterations)):
        tours = [construct() for _ in range(ap.ants)]
        fits = decoder.times(tours, params.workers)
        log.append(_log_row(it, fits))
        it_best = min(zip(fits, tours))
        best = min(best, it_best, key=lambda x: (x[0], x[1] or ()))
        for k in tau:
            tau[k] *= 1.0 - ap.evaporation
        if it_best[0] != INF:
            if scale is None:
                scale = float(it_best[0]) or 1.0
            amount = ap.deposit * scale / max(float(it_best[0]), 1e-9)
            prev = m.start
            for x in it_best[1]:
                tau[prev, x] += amount
                prev = x
    if best[0] == INF:
        raise InfeasibleError(
            f"no feasible tour in {len(log)} iterations of {ap.ants} ants", kind="disconnected"
        )
    return SolveResult(decoder.decode(best[1]), best[1], tuple(log))
