from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class ACOParams:
    ants: int = 20
    evaporation: float = 0.1
    alpha: float = 1.0
    beta: float = 2.0
    iterations: int = 100
    deposit: float = 1.0

    def __post_init__(self):
        if self.ants < 1 or self.iterations < 0:
            raise ValueError("need ants >= 1 and iterations >= 0")
        if not 0 < self.evaporation <= 1:
            raise ValueError("evaporation must be in (0, 1]")
        if self.deposit < 0:
            raise ValueError("deposit must be >= 0")


@dataclass(frozen=True)
class MOParams:
    archive_cap: int = 64

    def __post_init__(self):
        if self.archive_cap < 1:
            raise ValueError("archive_cap must be >= 1")


@dataclass(frozen=True)
class SolverParams:
    seed: int = 0
    population: int = 128
    generations: int = 500
    crossover_rate: float = 0.9
    mutation_rate: float = 0.2
    elitism: int = 2
    tournament: int = 3
    init_retries: int = 20
    workers: int = 1
    stitch: str = "auto"  # greedy | relaxed | exhaustive | auto
    aco: ACOParams = field(default_factory=ACOParams)
    mo: MOParams = field(default_factory=MOParams)

    def __post_init__(self):
        if self.population < 2:
            raise ValueError("population must be >= 2")
        if self.generations < 0:
            raise ValueError("generations must be >= 0")
        for name in ("crossover_rate", "mutation_rate"):
            if not 0 <= getattr(self, name) <= 1:
                raise ValueError(f"{name} must be in [0, 1]")
        if not 0 <= self.elitism <= self.population:
            raise ValueError("elitism must be in [0, population]")
        if self.tournament < 1 or self.init_retries < 0 or self.workers < 1:
            raise ValueError("tournament >= 1, init_retries >= 0, workers >= 1")
        if self.stitch not in ("greedy", "relaxed", "exhaustive", "auto"):
            raise ValueError(f"unknown stitch mode {self.stitch!r}")
