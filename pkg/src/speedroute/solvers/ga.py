"""Permutation genetic algorithm (OX1, swap/insertion mutation, tournament, elitism)."""

from __future__ import annotations

import csv
import io
import random
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence

from .._num import INF, fmt_rational
from ..errors import InfeasibleError
from ..model.types import GameModel, Route
from ..statespace import SearchConfig
from .decode import Decoder
from .operators import mutate, ox1, repair, tournament
from .params import SolverParams


@dataclass(frozen=True)
class LogRow:
    generation: int
    best: object  # Fraction or inf
    mean: object
    feasible_fraction: float


def log_to_csv(rows: Sequence[LogRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["generation", "best", "mean", "feasible_fraction"])
    for r in rows:
        w.writerow([r.generation, _fmt(r.best), _fmt(r.mean, 6), f"{r.feasible_fraction:.4f}"])
    return buf.getvalue()


def _fmt(v, digits=None):
    if v == INF:
        return "inf"
    if digits is not None:
        return f"{float(v):.{digits}f}"
    return fmt_rational(v)


def _log_row(gen, fits) -> LogRow:
    counts = Counter(fits)
    n_ok = len(fits) - counts.pop(INF, 0)
    mean = sum((f * c for f, c in counts.items()), Fraction(0)) / n_ok if n_ok else INF
    return LogRow(gen, min(counts, default=INF), mean, n_ok / len(fits))


@dataclass(frozen=True)
class EvolveResult:
    best: tuple
    fitness: object
    log: tuple[LogRow, ...]


def evolve_permutations(
    items: Sequence,
    evaluate: Callable[[list[tuple]], list],
    params: SolverParams,
    fix: Callable[[tuple], tuple] = tuple,
) -> EvolveResult:
    """Minimise ``evaluate`` over permutations of ``items``.

    ``evaluate`` scores a batch (order preserved, ``inf`` for infeasible) so
    callers can fan out; ``fix`` is the repair applied to every new genome.
    All randomness comes from one stream seeded with ``params.seed`` and is
    consumed in the main process only, so results do not depend on how
    evaluation is spread over workers.
    """
    rng = random.Random(params.seed)
    items = list(items)
    size = params.population

    def fresh():
        p = items[:]
        rng.shuffle(p)
        return fix(tuple(p))

    pop = [fresh() for _ in range(size)]
    fits = evaluate(pop)
    for _ in range(params.init_retries):
        bad = [i for i, f in enumerate(fits) if f == INF]
        if not bad:
            break
        for i in bad:
            pop[i] = fresh()
        for i, f in zip(bad, evaluate([pop[i] for i in bad])):
            fits[i] = f
    if all(f == INF for f in fits):
        raise InfeasibleError(
            f"no feasible individual after {params.init_retries} initialization retries",
            kind="disconnected",
            retries=params.init_retries,
        )

    log = [_log_row(0, fits)]
    best = min(zip(fits, pop))
    for gen in range(1, params.generations + 1):
        # integer ranks keep selection off the slow Fraction comparisons
        levels = {f: r for r, f in enumerate(sorted(set(fits)))}
        ranks = [levels[f] for f in fits]
        order = sorted(range(size), key=lambda i: (ranks[i], pop[i]))
        children = [pop[i] for i in order[: params.elitism]]
        child_fits = [fits[i] for i in order[: params.elitism]]
        fresh_children = []
        while len(children) + len(fresh_children) < size:
            a = pop[tournament(ranks, rng, params.tournament)]
            b = pop[tournament(ranks, rng, params.tournament)]
            if rng.random() < params.crossover_rate:
                c1, c2 = ox1(a, b, rng), ox1(b, a, rng)
            else:
                c1, c2 = a, b
            for c in (c1, c2):
                if len(children) + len(fresh_children) < size:
                    fresh_children.append(fix(mutate(c, rng, params.mutation_rate)))
        pop = children + fresh_children
        fits = child_fits + evaluate(fresh_children)
        row = _log_row(gen, fits)
        log.append(row)
        if row.best < best[0]:
            best = min(zip(fits, pop))

    return EvolveResult(best[1], best[0], tuple(log))


@dataclass(frozen=True)
class SolveResult:
    route: Route
    order: tuple[str, ...]
    log: tuple[LogRow, ...]


def solve_ga(
    m: GameModel,
    params: SolverParams = SolverParams(),
    cfg: SearchConfig = SearchConfig(),
    decoder: Optional[Decoder] = None,
) -> SolveResult:
    """Evolve orders of the required events; fitness is the decoded route time."""
    decoder = decoder or Decoder(m, cfg, params.stitch)
    prec = decoder.prec
    result = evolve_permutations(
        decoder.items,
        lambda perms: decoder.times(perms, params.workers),
        params,
        fix=lambda p: repair(p, prec),
    )
    return SolveResult(decoder.decode(result.best), result.best, result.log)
