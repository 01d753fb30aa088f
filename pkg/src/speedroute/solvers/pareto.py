"""Time/difficulty trade-offs: NSGA-II over orders, plus the enumeration oracle."""

from __future__ import annotations

import csv
import io
import random
from dataclasses import dataclass
from typing import Optional, Sequence

from .._num import INF, fmt_rational
from ..errors import InfeasibleError
from ..model.types import GameModel, Route
from ..statespace import SearchConfig
from .brute import feasible_orders
from .decode import Decoder
from .ga import LogRow, _log_row
from .operators import mutate, ox1, repair
from .params import SolverParams

BAD = (INF, INF)


def dominates(a, b) -> bool:
    return a[0] <= b[0] and a[1] <= b[1] and a != b


def nondominated(points) -> list:
    """Distinct points not dominated by any other, sorted by time."""
    pts = sorted(set(points))
    out = []
    for p in pts:
        if out and out[-1][1] <= p[1]:
            continue
        out.append(p)
    return out


def difficulty_levels(m: GameModel, cfg: SearchConfig) -> list[int]:
    """Caps worth re-searching at: every difficulty a resolved edge can take."""
    diff_rules = [r for r in m.rules if r.component == "difficulty"]
    if any(r.effect != "set" for r in diff_rules):
        levels = set(range(11))
    else:
        levels = {e.base.difficulty for e in m.edges} | {int(r.value) for r in diff_rules}
    if cfg.difficulty_cap is not None:
        levels = {min(x, cfg.difficulty_cap) for x in levels}
    return sorted(levels) or [0]


@dataclass(frozen=True)
class ParetoFront:
    routes: tuple[Route, ...]
    orders: tuple[tuple[str, ...], ...]

    @property
    def objectives(self) -> list[tuple]:
        return [r.objectives for r in self.routes]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["time", "difficulty", "route_id"])
        for i, r in enumerate(self.routes):
            w.writerow([fmt_rational(r.total_time), r.max_difficulty, f"route-{i}"])
        return buf.getvalue()


class Archive:
    """Non-dominated routes keyed by objective vector; first arrival wins ties."""

    def __init__(self, cap: Optional[int] = None):
        self.cap = cap
        self.members: dict = {}

    def offer(self, route: Route, order) -> bool:
        obj = route.objectives
        if obj in self.members:
            return False
        if any(dominates(o, obj) for o in self.members):
            return False
        for o in [o for o in self.members if dominates(obj, o)]:
            del self.members[o]
        self.members[obj] = (route, tuple(order))
        if self.cap is not None:
            while len(self.members) > self.cap:
                self._drop_most_crowded()
        return True

    def _drop_most_crowded(self):
        objs = sorted(self.members)
        dist = _crowding(objs)
        victim = min(range(len(objs)), key=lambda i: (dist[i], -i))
        del self.members[objs[victim]]

    def front(self) -> ParetoFront:
        keys = sorted(self.members)
        return ParetoFront(
            tuple(self.members[k][0] for k in keys),
            tuple(self.members[k][1] for k in keys),
        )


def _crowding(objs: Sequence[tuple]) -> list[float]:
    n = len(objs)
    dist = [0.0] * n
    if n <= 2:
        return [INF] * n
    for k in range(2):
        order = sorted(range(n), key=lambda i: (objs[i][k], i))
        lo, hi = objs[order[0]][k], objs[order[-1]][k]
        dist[order[0]] = dist[order[-1]] = INF
        span = float(hi) - float(lo) if hi != INF and lo != INF else 0.0
        if span <= 0:
            continue
        for j in range(1, n - 1):
            a, b = objs[order[j - 1]][k], objs[order[j + 1]][k]
            if a == INF or b == INF:
                dist[order[j]] = INF
            else:
                dist[order[j]] += (float(b) - float(a)) / span
    return dist


def sort_fronts(objs: Sequence[tuple]) -> list[list[int]]:
    """Non-dominated sorting specialised to two objectives."""
    fronts: list[list[int]] = []
    for i in sorted(range(len(objs)), key=lambda i: (objs[i], i)):
        p = objs[i]
        for front in fronts:
            last = objs[front[-1]]
            # members come in ascending first objective, so the last one has the smallest second
            if not dominates(last, p):
                front.append(i)
                break
        else:
            fronts.append([i])
    return fronts


class _Evaluator:
    def __init__(self, decoder: Decoder, levels, archive: Archive):
        self.decoder = decoder
        self.levels = levels
        self.archive = archive
        self._done = set()

    def __call__(self, perm, level_idx):
        """Objectives of ``(perm, level)``; offers every level's route to the archive once."""
        if perm not in self._done:
            self._done.add(perm)
            for lv in self.levels:
                try:
                    self.archive.offer(self.decoder.decode(perm, lv), perm)
                except InfeasibleError:
                    pass
        try:
            return self.decoder.decode(perm, self.levels[level_idx]).objectives
        except InfeasibleError:
            return BAD


@dataclass(frozen=True)
class ParetoResult:
    front: ParetoFront
    log: tuple[LogRow, ...]


def solve_pareto(
    m: GameModel,
    params: SolverParams = SolverParams(),
    cfg: SearchConfig = SearchConfig(),
    decoder: Optional[Decoder] = None,
) -> ParetoResult:
    """NSGA-II over (order, difficulty cap) genomes, minimising (time, max difficulty)."""
    decoder = decoder or Decoder(m, cfg, params.stitch)
    levels = difficulty_levels(m, decoder.cfg)
    archive = Archive(params.mo.archive_cap)
    evaluate = _Evaluator(decoder, levels, archive)
    rng = random.Random(params.seed)
    items, prec, size = list(decoder.items), decoder.prec, params.population

    def fresh():
        p = items[:]
        rng.shuffle(p)
        return (repair(p, prec), rng.randrange(len(levels)))

    pop = [fresh() for _ in range(size)]
    objs = [evaluate(*g) for g in pop]
    for _ in range(params.init_retries):
        bad = [i for i, o in enumerate(objs) if o == BAD]
        if not bad:
            break
        for i in bad:
            pop[i] = fresh()
            objs[i] = evaluate(*pop[i])
    if not archive.members:
        raise InfeasibleError(
            f"no feasible individual after {params.init_retries} initialization retries",
            kind="disconnected",
            retries=params.init_retries,
        )

    log = [_log_row(0, [o[0] for o in objs])]
    for gen in range(1, params.generations + 1):
        rank, crowd = _rank_and_crowd(objs)

        def pick():
            i, j = rng.randrange(size), rng.randrange(size)
            return min(i, j, key=lambda k: (rank[k], -crowd[k], k))

        kids = []
        while len(kids) < size:
            a, b = pop[pick()], pop[pick()]
            if rng.random() < params.crossover_rate:
                perms = (ox1(a[0], b[0], rng), ox1(b[0], a[0], rng))
            else:
                perms = (a[0], b[0])
            for perm, lv in zip(perms, (a[1], b[1])):
                if len(kids) == size:
                    break
                perm = repair(mutate(perm, rng, params.mutation_rate), prec)
                if rng.random() < params.mutation_rate:
                    lv = rng.randrange(len(levels))
                kids.append((perm, lv))
        kid_objs = [evaluate(*g) for g in kids]

        union, union_objs = pop + kids, objs + kid_objs
        chosen = []
        for front in sort_fronts(union_objs):
            if len(chosen) + len(front) <= size:
                chosen.extend(front)
                continue
            dist = _crowding([union_objs[i] for i in front])
            ranked = sorted(range(len(front)), key=lambda j: (-dist[j], front[j]))
            chosen.extend(front[j] for j in ranked[: size - len(chosen)])
            break
        pop = [union[i] for i in chosen]
        objs = [union_objs[i] for i in chosen]
        log.append(_log_row(gen, [o[0] for o in objs]))

    return ParetoResult(archive.front(), tuple(log))


def _rank_and_crowd(objs):
    rank = [0] * len(objs)
    crowd = [0.0] * len(objs)
    for r, front in enumerate(sort_fronts(objs)):
        dist = _crowding([objs[i] for i in front])
        for i, d in zip(front, dist):
            rank[i] = r
            crowd[i] = d
    return rank, crowd


def brute_force_pareto(
    m: GameModel,
    cfg: SearchConfig = SearchConfig(),
    stitch: str = "auto",
    decoder: Optional[Decoder] = None,
) -> ParetoFront:
    """Enumerate every dependency-feasible order at every difficulty cap."""
    decoder = decoder or Decoder(m, cfg, stitch)
    archive = Archive()
    for order in feasible_orders(decoder):
        for lv in difficulty_levels(m, decoder.cfg):
            try:
                archive.offer(decoder.decode(order, lv), order)
            except InfeasibleError:
                pass
    if not archive.members:
        raise InfeasibleError("no feasible route at any difficulty cap", kind="disconnected")
    return archive.front()
