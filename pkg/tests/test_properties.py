"""Property-based checks of the model, search and solver contracts."""

from dataclasses import replace
from fractions import Fraction
from itertools import permutations

from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from oracles import best_walk, count_reachable, pareto_walks, walk_time
from speedroute.errors import InfeasibleError
from speedroute.gen import GenSpec, generate_document
from speedroute.model import apply_ruleset, dumps, evaluate_route, initial_state, load_model, model_hash, model_to_document, resolve_weight
from speedroute.model.dynamics import take_edge
from speedroute.solvers import SolverParams, brute_force, brute_force_pareto, repair, respects, solve_ga, solve_pareto
from speedroute.solvers.pareto import dominates
from speedroute.statespace import SearchConfig, StateSpace, count_states, expand_and_search
from speedroute.timesave import Stage, StageEvent, StageModel, ordering_steps, score_ordering, to_event_graph
from strategies import models

CAP0 = SearchConfig(repeat_cap=0)
fast = settings(max_examples=150, deadline=None, suppress_health_check=[HealthCheck.too_slow, HealthCheck.filter_too_much])


def _search(m, cfg=CAP0):
    try:
        return expand_and_search(m, cfg).route
    except InfeasibleError:
        return None


@fast
@given(models())
def test_search_matches_walk_enumeration(m):
    route = _search(m)
    oracle, _ = best_walk(m, 5)
    if route is None:
        assert oracle is None
        return
    # every walk the oracle sees is a walk the search sees
    assert oracle is None or route.total_time <= oracle
    if len(route.steps) <= 5:
        assert route.total_time == oracle


@fast
@given(models())
def test_search_routes_are_sound(m):
    route = _search(m)
    if route is None:
        return
    again = evaluate_route(m, route.steps)
    assert again.total_time == route.total_time == walk_time(m, route.steps)
    assert again.max_difficulty == route.max_difficulty
    assert m.required <= again.covered and route.nodes[-1] in m.ends


@fast
@given(models(), st.integers(0, 1))
def test_full_brute_force_equals_search(m, cap):
    cfg = SearchConfig(repeat_cap=cap)
    route = _search(m, cfg)
    try:
        brute = brute_force(m, cfg, mode="full").route
    except InfeasibleError:
        brute = None
    assert (route is None) == (brute is None)
    if route is not None:
        assert brute.total_time == route.total_time


@fast
@given(models())
def test_greedy_brute_force_never_beats_optimum(m):
    route = _search(m)
    try:
        greedy = brute_force(m, CAP0, mode="greedy").route
    except InfeasibleError:
        return
    assert route is not None and greedy.total_time >= route.total_time


@fast
@given(models())
def test_state_counts_match_oracle_and_grow_with_cap(m):
    counts = [count_states(m, SearchConfig(repeat_cap=k)) for k in range(4)]
    assert counts[0] == count_reachable(m, 0)
    assert counts[2] == count_reachable(m, 2)
    assert counts == sorted(counts)


@fast
@given(models(), st.randoms(use_true_random=False))
def test_rule_order_in_document_is_irrelevant(m, rnd):
    rules = list(m.rules)
    rnd.shuffle(rules)
    shuffled = m.replace(rules=tuple(rules))
    space = StateSpace(m, CAP0)
    frontier = [space.initial()]
    for _ in range(3):
        nxt = []
        for s in frontier:
            for e in m.out_edges[s.at]:
                assert resolve_weight(m, e.id, s) == resolve_weight(shuffled, e.id, s)
            nxt.extend(t for _, _, t in space.successors(s))
        frontier = nxt[:20]
    a, b = _search(m), _search(shuffled)
    assert (a is None) == (b is None)
    if a is not None:
        assert a.objectives == b.objectives


def _random_walk(m, rnd, length):
    s = initial_state(m)
    states, steps = [s], []
    for _ in range(length):
        ok = [
            e
            for e in m.out_edges[s.at]
            if all(s.has_visited(p) for p in e.preconditions)
            and all(s.resources[m.resource_index[r]] >= k for r, k in e.requires)
        ]
        if not ok:
            break
        e = rnd.choice(ok)
        s = take_edge(m, s, e, resolve_weight(m, e.id, s))
        states.append(s)
        steps.append(e)
    return states, steps


@fast
@given(models(), st.randoms(use_true_random=False))
def test_resources_stay_within_bounds(m, rnd):
    states, _ = _random_walk(m, rnd, 12)
    for s in states:
        for value, res in zip(s.resources, m.resources):
            assert 0 <= value <= res.cap


@fast
@given(models(), st.randoms(use_true_random=False))
def test_one_time_events_grant_once(m, rnd):
    m = m.replace(resources=tuple(replace(r, cap=1000) for r in m.resources))
    states, steps = _random_walk(m, rnd, 12)
    expected = m.resources[0].initial
    fired = set()
    for node_id in [m.start] + [e.dst for e in steps]:
        node = m.node_by_id[node_id]
        if node.repeatable or node_id not in fired:
            expected += sum(k for _, k in node.grants)
        fired.add(node_id)
    consumed = sum(k for e in steps for _, k in e.requires)
    assert states[-1].resources[0] == expected - consumed
    assert states[-1].done == {n for n in fired if not m.node_by_id[n].repeatable}


@fast
@given(models(), st.sets(st.sampled_from(["glitch", "road", "none"])))
def test_ruleset_is_idempotent(m, banned):
    try:
        once = apply_ruleset(m, banned)
    except InfeasibleError:
        return
    twice = apply_ruleset(once, banned)
    assert model_to_document(twice) == model_to_document(once)
    assert not any(set(e.tags) & banned for e in once.edges)


@fast
@given(models())
def test_document_round_trip_preserves_hash(m):
    again = load_model(dumps(model_to_document(m)))
    assert model_hash(again) == model_hash(m)


@st.composite
def dags(draw):
    n = draw(st.integers(1, 8))
    items = [f"x{i}" for i in range(n)]
    prec = {}
    for j, x in enumerate(items):
        prec[x] = frozenset(draw(st.sets(st.sampled_from(items[:j])))) if j else frozenset()
    return items, prec


@settings(max_examples=200, deadline=None)
@given(dags(), st.randoms(use_true_random=False))
def test_repair_is_sound(dag, rnd):
    items, prec = dag
    perm = items[:]
    rnd.shuffle(perm)
    fixed = repair(perm, prec)
    assert sorted(fixed) == sorted(items)
    assert respects(fixed, prec)
    assert repair(fixed, prec) == fixed


@settings(max_examples=25, deadline=None, suppress_health_check=[HealthCheck.too_slow, HealthCheck.filter_too_much])
@given(models(with_rules=False), st.integers(0, 3))
def test_pareto_front_is_sound(m, seed):
    try:
        exact = brute_force_pareto(m, CAP0).objectives
    except InfeasibleError:
        return
    front = solve_pareto(m, SolverParams(seed=seed, population=12, generations=8), CAP0).front
    objs = front.objectives
    assert not any(dominates(a, b) for a in objs for b in objs)
    assert objs == exact
    for route in front.routes:
        assert evaluate_route(m, route.steps).objectives == route.objectives
    # no walk of up to 4 edges beats the front
    for p in pareto_walks(m, 4):
        assert not any(dominates(p, q) for q in objs)


@st.composite
def stage_models(draw, n=None):
    n = n or draw(st.integers(1, 4))
    ids = [f"S{i}" for i in range(n)]
    stages = []
    for sid in ids:
        base = draw(st.integers(0, 30))
        events = []
        budget = base
        for j in range(draw(st.integers(0, 3))):
            saves = {}
            for p in ids:
                if p != sid and budget > 0 and draw(st.booleans()):
                    saves[p] = draw(st.integers(0, budget))
            budget -= max(saves.values(), default=0)
            events.append(StageEvent(f"e{j}", tuple(saves.items())))
        stages.append(Stage(sid, Fraction(base), tuple(events)))
    return StageModel(tuple(stages))


@settings(max_examples=80, deadline=None)
@given(stage_models())
def test_stage_conversion_is_faithful(sm):
    g = to_event_graph(sm)
    for order in permutations(sm.ids):
        assert evaluate_route(g, ordering_steps(order)).total_time == score_ordering(sm, order).total_time


@settings(max_examples=30, deadline=None)
@given(
    st.sampled_from(["checkpoint-tsp", "stage-save", "resource-gated"]),
    st.integers(3, 9),
    st.integers(0, 10**6),
    st.booleans(),
)
def test_generation_is_deterministic(family, n, seed, diffs):
    spec = GenSpec(family, n, required=1 if family == "resource-gated" else None, seed=seed, difficulties=diffs)
    assert dumps(generate_document(spec)) == dumps(generate_document(spec))


@settings(max_examples=15, deadline=None, suppress_health_check=[HealthCheck.too_slow, HealthCheck.filter_too_much])
@given(models(), st.integers(0, 100))
def test_ga_is_deterministic(m, seed):
    p = SolverParams(seed=seed, population=6, generations=4)
    try:
        a = solve_ga(m, p, CAP0)
    except InfeasibleError:
        return
    b = solve_ga(m, p, CAP0)
    assert a.order == b.order and a.log == b.log
    route = _search(m)
    assert route is not None and a.route.total_time >= route.total_time
