"""Permutation genome plumbing: precedence, repair and variation operators."""

from __future__ import annotations

import random
from typing import Sequence

from ..errors import InfeasibleError
from ..model.types import GameModel


def permutation_items(m: GameModel) -> tuple[str, ...]:
    """Required events a permutation has to order. The start is covered for free."""
    return tuple(sorted(m.required - {m.start}))


def precedence(m: GameModel, items: Sequence[str] | None = None) -> dict[str, frozenset]:
    """For each item, the items that must be done before it is first reached.

    X precedes Y when every edge into Y is gated (directly or through the
    gates of its gates) on X. This is the least fixpoint, so it never
    excludes an order some feasible walk could realise.
    """
    items = permutation_items(m) if items is None else tuple(items)
    incoming: dict[str, list] = {n.id: [] for n in m.nodes}
    for e in m.edges:
        incoming[e.dst].append(e)
    must = {n: frozenset() for n in incoming}
    changed = True
    while changed:
        changed = False
        for node, edges in incoming.items():
            if node == m.start or not edges:
                continue
            acc = None
            for e in edges:
                gate = set()
                for p in e.preconditions:
                    gate.add(p)
                    gate |= must[p]
                acc = gate if acc is None else acc & gate
            new = frozenset(acc)
            if new != must[node]:
                must[node] = new
                changed = True
    wanted = set(items)
    return {x: frozenset(must[x] & wanted - {x}) for x in items}


def respects(order: Sequence[str], prec: dict) -> bool:
    placed = set()
    for x in order:
        if not prec.get(x, frozenset()) <= placed:
            return False
        placed.add(x)
    return True


def repair(order: Sequence[str], prec: dict) -> tuple[str, ...]:
    """Stable topological reordering: keep the genome's order wherever precedence allows."""
    pending = list(order)
    placed: set = set()
    out = []
    while pending:
        for i, x in enumerate(pending):
            if prec.get(x, frozenset()) <= placed:
                out.append(x)
                placed.add(x)
                del pending[i]
                break
        else:
            raise InfeasibleError(f"precedence cycle among {sorted(pending)}", kind="disconnected")
    return tuple(out)


def ox1(a: Sequence, b: Sequence, rng: random.Random) -> tuple:
    """Order crossover: keep a slice of ``a``, fill the rest in ``b``'s cyclic order."""
    n = len(a)
    if n < 2:
        return tuple(a)
    i, j = sorted(rng.sample(range(n + 1), 2))
    child = [None] * n
    child[i:j] = a[i:j]
    kept = set(a[i:j])
    fill = [b[(j + k) % n] for k in range(n) if b[(j + k) % n] not in kept]
    for k, x in enumerate(fill):
        child[(j + k) % n] = x
    return tuple(child)


def swap_mutation(p: Sequence, rng: random.Random) -> tuple:
    p = list(p)
    if len(p) >= 2:
        i, j = rng.sample(range(len(p)), 2)
        p[i], p[j] = p[j], p[i]
    return tuple(p)


def insertion_mutation(p: Sequence, rng: random.Random) -> tuple:
    p = list(p)
    if len(p) >= 2:
        i, j = rng.sample(range(len(p)), 2)
        p.insert(j, p.pop(i))
    return tuple(p)


def mutate(p: Sequence, rng: random.Random, rate: float) -> tuple:
    if rng.random() >= rate:
        return tuple(p)
    op = swap_mutation if rng.random() < 0.5 else insertion_mutation
    return op(p, rng)


def tournament(fitnesses: Sequence, rng: random.Random, k: int = 3) -> int:
    """Index of the fittest of ``k`` uniformly drawn contestants (lower is better)."""
    picks = [rng.randrange(len(fitnesses)) for _ in range(k)]
    return min(picks, key=lambda i: (fitnesses[i], i))
