import pytest

from conftest import line_doc, toy, toy_doc
from oracles import best_walk
from speedroute.errors import InfeasibleError, ModelValidationError
from speedroute.model import apply_ruleset, cluster_nodes, load_model, model_to_document, reduce_model
from speedroute.model.transforms import reachable


def test_reduce_drops_bomb_node_and_loses_the_detour():
    full = toy("gain")
    reduced = reduce_model(full)
    assert "C" not in reduced.node_by_id
    assert reduced.reduced and not full.reduced
    assert best_walk(full, 6)[0] == 3.5
    assert best_walk(reduced, 6)[0] == 5


def test_reduce_is_identity_when_everything_matters():
    m = toy("line")
    assert reduce_model(m) is m


def test_reduce_drops_isolated_optional_node():
    doc = line_doc()
    doc["nodes"].append({"id": "island"})
    m = reduce_model(load_model(doc))
    assert "island" not in m.node_by_id


def test_reduce_prunes_rules_on_dropped_nodes():
    reduced = reduce_model(toy("gain"))
    assert all("C" not in r.condition.nodes() for r in reduced.rules)


def _cluster_doc():
    doc = toy_doc("resource")
    doc["nodes"][3] = {"id": "C", "grants": {"bombs": 2}, "cluster": "refill"}
    doc["nodes"].append({"id": "D", "grants": {"bombs": 3}, "cluster": "refill"})
    doc["edges"] += [
        {"id": "C-D", "from": "C", "to": "D", "time": 1},
        {"id": "D-B", "from": "D", "to": "B", "time": 4},
    ]
    return doc


def test_cluster_sums_grants():
    m = cluster_nodes(load_model(_cluster_doc()))
    node = m.node_by_id["refill"]
    assert dict(node.grants) == {"bombs": 5}
    assert "C" not in m.node_by_id and "D" not in m.node_by_id
    assert "C-D" not in m.edge_by_id  # internal edge
    # parallel refill->B edges collapse to the faster one
    assert [e.id for e in m.edges if e.src == "refill" and e.dst == "B"] == ["C-B"]


def test_cluster_of_one_node_is_identity():
    doc = toy_doc("line")
    doc["nodes"][1]["cluster"] = "solo"
    m = load_model(doc)
    assert model_to_document(cluster_nodes(m)) == model_to_document(m)


def test_cluster_with_required_member_is_required():
    doc = _cluster_doc()
    doc["required"] = ["A", "B", "C"]
    m = cluster_nodes(load_model(doc))
    assert "refill" in m.required


def test_cluster_rejects_start_with_end():
    doc = line_doc()
    doc["nodes"][0]["cluster"] = "x"
    doc["nodes"][3]["cluster"] = "x"
    with pytest.raises(ModelValidationError):
        cluster_nodes(load_model(doc))


def test_ban_removes_exactly_tagged_edges():
    m = toy("mo")
    banned = apply_ruleset(m, {"glitch"})
    tagged = [e for e in m.edges if "glitch" in e.tags]
    assert len(banned.edges) == len(m.edges) - len(tagged) == len(m.edges) - 1


def test_empty_ban_is_identity():
    m = toy("mo")
    assert apply_ruleset(m, set()) is m
    assert apply_ruleset(m, {"no-such-tag"}) is m


def test_ban_cutting_off_required_node_names_it():
    doc = line_doc()
    doc["edges"][1]["tags"] = ["glitch"]
    with pytest.raises(InfeasibleError, match="B"):
        apply_ruleset(load_model(doc), {"glitch"})


def test_reachable():
    assert reachable(toy("line")) == {"alpha", "A", "B", "omega"}
    assert reachable(toy("line"), "B") == {"B", "omega"}
