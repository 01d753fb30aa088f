import pytest

from conftest import line_doc, toy, toy_doc
from oracles import best_walk, count_reachable
from speedroute.errors import InfeasibleError, StateBudgetExceeded
from speedroute.model import evaluate_route, load_model
from speedroute.statespace import SearchConfig, StateSpace, count_states, expand_and_search

CAP0 = SearchConfig(repeat_cap=0)

# frozen from oracles.best_walk / count_reachable (walks up to 8 edges)
TOY_OPTIMA = {"line": 9, "swap": 5, "gain": 3.5, "resource": 6, "mo": 5}
TOY_COUNTS = {"line": 4, "swap": 8, "gain": 14, "resource": 6, "mo": 4}


@pytest.mark.parametrize("name", sorted(TOY_OPTIMA))
def test_toy_optima_frozen_from_walk_oracle(name):
    m = toy(name)
    assert best_walk(m, 8)[0] == TOY_OPTIMA[name]
    res = expand_and_search(m, CAP0)
    assert res.route.total_time == TOY_OPTIMA[name]
    # the label-built route re-evaluates to the same totals
    assert evaluate_route(m, res.route.steps).objectives == res.route.objectives


def test_swap_takes_a_then_b():
    res = expand_and_search(toy("swap"), CAP0)
    assert res.route.nodes == ("alpha", "A", "B", "omega")
    assert res.stats.expanded > 0 and res.stats.frontier_peak > 0


def test_gain_detours_through_bomb_node():
    res = expand_and_search(toy("gain"), CAP0)
    assert res.route.steps == ("alpha-C", "C-A", "A-B", "B-omega")


def test_start_is_goal_gives_empty_route():
    m = load_model(line_doc(ends=["alpha"], required=[]))
    res = expand_and_search(m)
    assert res.route.steps == () and res.route.total_time == 0


@pytest.mark.parametrize("name", sorted(TOY_COUNTS))
def test_state_counts_frozen_from_enumeration(name):
    m = toy(name)
    assert count_reachable(m) == TOY_COUNTS[name]
    assert count_states(m, CAP0) == TOY_COUNTS[name]


def test_line_chain_has_four_states():
    # one state per location; the done-set is forced along the chain
    assert count_states(toy("line"), CAP0) == 4


def test_empty_model_has_one_state():
    m = load_model({"schema": "speedroute-model/1", "nodes": [{"id": "s"}], "edges": [], "start": "s", "ends": ["s"]})
    assert count_states(m) == 1


def _refill_doc():
    # omega needs 2 bombs; the repeatable refill R gives 1 per visit
    return {
        "schema": "speedroute-model/1",
        "nodes": [{"id": "alpha"}, {"id": "R", "repeatable": True, "grants": {"bombs": 1}}, {"id": "omega"}],
        "edges": [
            {"id": "alpha-R", "from": "alpha", "to": "R", "time": 1},
            {"id": "R-alpha", "from": "R", "to": "alpha", "time": 1},
            {"id": "alpha-omega", "from": "alpha", "to": "omega", "time": 1, "requires": {"bombs": 2}},
        ],
        "resources": [{"id": "bombs", "initial": 0, "cap": 5}],
        "start": "alpha",
        "ends": ["omega"],
    }


def test_repeat_cap_bounds_revisits():
    m = load_model(_refill_doc())
    with pytest.raises(InfeasibleError) as exc:
        expand_and_search(m, CAP0)
    assert exc.value.kind == "disconnected"
    res = expand_and_search(m, SearchConfig(repeat_cap=1))
    assert res.route.total_time == best_walk(m, 8, repeat_cap=1)[0] == 5


def test_counts_grow_with_repeat_cap():
    m = load_model(_refill_doc())
    counts = [count_states(m, SearchConfig(repeat_cap=k)) for k in range(5)]
    assert counts == [count_reachable(m, k) for k in range(5)]
    assert counts == sorted(counts) and counts[-1] > counts[0]


def test_budget_exhaustion():
    m = toy("gain")
    with pytest.raises(InfeasibleError) as exc:
        expand_and_search(m, SearchConfig(state_budget=2))
    assert exc.value.kind == "budget"
    with pytest.raises(StateBudgetExceeded) as exc:
        count_states(m, SearchConfig(state_budget=3))
    assert exc.value.partial == 3


def test_difficulty_cap_forces_safe_edge():
    m = toy("mo")
    assert expand_and_search(m, SearchConfig(repeat_cap=0, difficulty_cap=5)).route.total_time == 7
    assert best_walk(m, 6, difficulty_cap=5)[0] == 7


def test_clock_buckets_enter_state_identity():
    doc = toy_doc("swap")
    doc["clock"] = {"period": 4}
    m = load_model(doc)
    one = count_states(m, SearchConfig(repeat_cap=0, clock_buckets=1))
    four = count_states(m, SearchConfig(repeat_cap=0, clock_buckets=4))
    assert one == count_reachable(m, 0, 1)
    assert four == count_reachable(m, 0, 4)
    assert one <= four


def test_irrelevant_nodes_stay_out_of_state_identity():
    doc = line_doc()
    doc["nodes"].append({"id": "X"})
    doc["edges"] += [{"id": "A-X", "from": "A", "to": "X", "time": 1}, {"id": "X-B", "from": "X", "to": "B", "time": 1}]
    space = StateSpace(load_model(doc))
    assert "X" not in space.relevant


def test_dungeon_fixture():
    m = toy("dungeon")
    cfg = SearchConfig(repeat_cap=1)
    res = expand_and_search(m, cfg)
    assert res.route.total_time == best_walk(m, 8, repeat_cap=1)[0] == 16
    assert "wall-clip" in res.route.steps and res.route.max_difficulty == 8
    from speedroute.model import apply_ruleset

    assert expand_and_search(apply_ruleset(m, {"glitch"}), cfg).route.total_time == 20
    assert [count_states(m, SearchConfig(repeat_cap=k)) for k in range(3)] == [
        count_reachable(m, k) for k in range(3)
    ] == [32, 99, 208]
