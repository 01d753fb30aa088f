"""Seeded synthetic instances for tests and benchmarks.

Families:

* ``checkpoint-tsp`` - complete digraph, every node required, asymmetric
  integer times in [1, 100] (racing-game checkpoints).
* ``stage-save`` - a :class:`~speedroute.timesave.StageModel` with sparse
  save tables.
* ``resource-gated`` - sparse near-planar map with pickups granting
  resources, glitch shortcuts that consume them, locked events and discount
  rules multiplying times by 0.3..0.9.
"""

from __future__ import annotations

import math
import random
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

from .model.io import model_to_document
from .model.types import Done, Edge, EdgeWeight, EventNode, GameModel, ResourceCmp, ResourceDef, WeightRule
from .timesave import Stage, StageEvent, StageModel, stage_model_to_document

FAMILIES = ("checkpoint-tsp", "stage-save", "resource-gated")
MAX_RETRIES = 100


class GenerationError(ValueError):
    pass


@dataclass(frozen=True)
class GenSpec:
    family: str
    nodes: int
    required: Optional[int] = None
    resources: int = 1
    rules: int = 2
    seed: int = 0
    difficulties: bool = False

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise GenerationError(f"unknown family {self.family!r}; choose from {', '.join(FAMILIES)}")
        if self.nodes < 2:
            raise GenerationError("need at least 2 nodes")
        if self.family == "checkpoint-tsp" and self.required not in (None, self.nodes):
            raise GenerationError("checkpoint-tsp requires every node")
        if self.family == "resource-gated":
            if self.nodes < 3:
                raise GenerationError("resource-gated needs at least 3 nodes (start, goal, one event)")
            if self.required is None or not 1 <= self.required <= self.nodes - 2:
                raise GenerationError("resource-gated needs 1 <= required <= nodes - 2")
            if not 1 <= self.resources <= 3:
                raise GenerationError("resource-gated uses 1 to 3 resources")
        if self.rules < 0:
            raise GenerationError("rules must be >= 0")


def generate(spec: GenSpec) -> Union[GameModel, StageModel]:
    build = {"checkpoint-tsp": _checkpoint, "stage-save": _stages, "resource-gated": _resource_gated}[spec.family]
    for attempt in range(MAX_RETRIES):
        rng = random.Random(f"{spec.family}:{spec.seed}:{attempt}")
        out = build(spec, rng)
        if out is not None:
            return out
    raise GenerationError(f"no feasible draw after {MAX_RETRIES} retries")


def generate_document(spec: GenSpec) -> dict:
    out = generate(spec)
    if isinstance(out, StageModel):
        return stage_model_to_document(out)
    return model_to_document(out)


def _checkpoint(spec: GenSpec, rng: random.Random) -> GameModel:
    ids = [f"cp{i}" for i in range(spec.nodes)]
    edges = []
    for a in ids:
        for b in ids:
            if a != b:
                diff = rng.randint(0, 10) if spec.difficulties else 0
                edges.append(Edge(f"{a}-{b}", a, b, EdgeWeight(Fraction(rng.randint(1, 100)), diff)))
    return GameModel(
        nodes=tuple(EventNode(i) for i in ids),
        edges=tuple(edges),
        start=ids[0],
        ends=frozenset([ids[-1]]),
        required=frozenset(ids),
    )


def _stages(spec: GenSpec, rng: random.Random) -> StageModel:
    ids = [f"S{i + 1}" for i in range(spec.nodes)]
    stages = []
    for sid in ids:
        base = rng.randint(20, 100)
        n_events = rng.randint(1, 3)
        share = base // n_events
        others = [x for x in ids if x != sid]
        events = []
        for j in range(n_events):
            saves = {}
            if rng.random() < 0.7:
                for p in sorted(rng.sample(others, min(len(others), rng.randint(1, 2)))):
                    saves[p] = rng.randint(1, max(1, share))
            events.append(StageEvent(f"e{j}", tuple(saves.items())))
        stages.append(Stage(sid, Fraction(base), tuple(events)))
    return StageModel(tuple(stages))


def _resource_gated(spec: GenSpec, rng: random.Random) -> Optional[GameModel]:
    n = spec.nodes
    ids = [f"n{i}" for i in range(n)]
    pts = [(rng.random(), rng.random()) for _ in range(n)]
    start, goal = ids[0], ids[1]
    inner = ids[2:]
    required = sorted(rng.sample(inner, spec.required), key=ids.index)
    optional = [x for x in inner if x not in required]
    res_ids = [f"res{k}" for k in range(spec.resources)]

    holders = (optional + required)[: max(spec.resources, len(optional))]
    grants = {}
    for k, h in enumerate(holders):
        grants[h] = ((res_ids[k % len(res_ids)], rng.randint(1, 2)),)
    nodes = tuple(
        EventNode(x, repeatable=(x in grants and x in optional and rng.random() < 0.3), grants=grants.get(x, ()))
        for x in ids
    )

    def dist(a, b):
        (x1, y1), (x2, y2) = pts[ids.index(a)], pts[ids.index(b)]
        return math.hypot(x1 - x2, y1 - y2)

    # undirected skeleton: Euclidean MST plus each node's nearest neighbours
    pairs = set()
    in_tree = {ids[0]}
    while len(in_tree) < n:
        a, b = min(((a, b) for a in in_tree for b in ids if b not in in_tree), key=lambda ab: dist(*ab))
        pairs.add(tuple(sorted((a, b))))
        in_tree.add(b)
    for a in ids:
        for b in sorted((x for x in ids if x != a), key=lambda x: dist(a, x))[:2]:
            pairs.add(tuple(sorted((a, b))))

    locks = {}
    for i in range(len(required) // 3):
        locked = required[-1 - i]
        keys = [r for r in required if required.index(r) < required.index(locked) and r not in locks]
        if keys:
            locks[locked] = rng.choice(keys)

    def time_of(a, b, factor=1.0):
        return Fraction(min(100, max(1, round(dist(a, b) * 100 * factor * rng.uniform(0.8, 1.25)))))

    edges = []
    for a, b in sorted(pairs):
        for s, d in ((a, b), (b, a)):
            diff = rng.randint(0, 3) if spec.difficulties else 0
            pre = (locks[d],) if d in locks else ()
            edges.append(Edge(f"{s}-{d}", s, d, EdgeWeight(time_of(s, d), diff), preconditions=pre, tags=("road",)))
    far = [(a, b) for a in ids for b in ids if a != b and tuple(sorted((a, b))) not in pairs and b != start]
    rng.shuffle(far)
    for a, b in sorted(far[: max(1, n // 3)]):
        diff = rng.randint(5, 9) if spec.difficulties else 0
        pre = (locks[b],) if b in locks else ()
        edges.append(
            Edge(
                f"{a}-{b}-clip",
                a,
                b,
                EdgeWeight(time_of(a, b, 0.4), diff),
                requires=((rng.choice(res_ids), 1),),
                preconditions=pre,
                tags=("glitch",),
            )
        )

    road_ids = [e.id for e in edges if "road" in e.tags]
    rules = []
    grant_nodes = sorted(grants, key=ids.index)
    for k in range(spec.rules):
        if k % 2 == 0:
            cond = Done(grant_nodes[k // 2 % len(grant_nodes)])
        else:
            cond = ResourceCmp(res_ids[k // 2 % len(res_ids)], ">=", 1)
        picked = frozenset(rng.sample(road_ids, max(1, len(road_ids) * 3 // 10)))
        rules.append(
            WeightRule(
                id=f"discount{k}",
                priority=k,
                condition=cond,
                edge_ids=picked,
                component="time",
                effect="multiply",
                value=Fraction(rng.randint(3, 9), 10),
            )
        )

    model = GameModel(
        nodes=nodes,
        edges=tuple(edges),
        rules=tuple(rules),
        resources=tuple(ResourceDef(r, 0, 9) for r in res_ids),
        start=start,
        ends=frozenset([goal]),
        required=frozenset(required),
    )
    return model if _constructively_feasible(model, required, locks) else None


def _constructively_feasible(m: GameModel, required, locks) -> bool:
    """Witness walk on free (non-consuming) edges: keys first, then the goal.

    Repeatable pickups are avoided so the witness holds even with no repeat visits allowed.
    """
    avoid = set(m.repeatable_ids)
    done = {m.start}
    at = m.start
    todo = sorted(required, key=lambda r: (r in locks, required.index(r)))
    for target in todo + [next(iter(m.ends))]:
        prev = {at: None}
        queue = deque([at])
        while queue and target not in prev:
            u = queue.popleft()
            for e in m.out_edges[u]:
                if e.requires or e.dst in prev or e.dst in avoid or not set(e.preconditions) <= done:
                    continue
                prev[e.dst] = u
                queue.append(e.dst)
        if target not in prev:
            return False
        node = target
        while node is not None:
            done.add(node)
            node = prev[node]
        at = target
    return True
