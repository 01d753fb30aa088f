"""Model / route documents (JSON) and DOT export."""

from __future__ import annotations

import hashlib
import json
from fractions import Fraction
from pathlib import Path
from typing import Any, Union

from .._num import fmt_rational, to_rational
from ..errors import ModelParseError, ModelValidationError
from .types import (
    AllOf,
    Always,
    AnyOf,
    ClockIn,
    Condition,
    Done,
    Edge,
    EdgeWeight,
    EventNode,
    GameModel,
    Not,
    ResourceCmp,
    ResourceDef,
    Route,
    WeightRule,
    _CMP,
)

MODEL_SCHEMA = "speedroute-model/1"
ROUTE_SCHEMA = "speedroute-route/1"

_TOP_KEYS = {"schema", "nodes", "edges", "rules", "resources", "clock", "start", "ends", "required"}
_NODE_KEYS = {"id", "repeatable", "grants", "cluster", "tags"}
_EDGE_KEYS = {"id", "from", "to", "time", "difficulty", "hidden_gain", "requires", "preconditions", "tags"}
_RULE_KEYS = {"id", "priority", "when", "edges", "tags", "component", "effect", "value"}
_RES_KEYS = {"id", "initial", "cap"}


def _check_keys(obj, allowed, path):
    if not isinstance(obj, dict):
        raise ModelValidationError(path, f"expected an object, got {type(obj).__name__}")
    extra = sorted(set(obj) - allowed)
    if extra:
        raise ModelValidationError(path, f"unknown key(s) {', '.join(extra)}")


def _str(obj, key, path, default=None):
    value = obj.get(key, default)
    if not isinstance(value, str) or not value:
        raise ModelValidationError(f"{path}.{key}", "expected a non-empty string")
    return value


def _int(value, path, minimum=None):
    if isinstance(value, bool) or not isinstance(value, int):
        raise ModelValidationError(path, "expected an integer")
    if minimum is not None and value < minimum:
        raise ModelValidationError(path, f"must be >= {minimum}")
    return value


def _rational(value, path):
    try:
        return to_rational(value)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise ModelValidationError(path, f"expected a rational number ({exc})") from None


def _str_list(value, path):
    if value is None:
        return ()
    if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
        raise ModelValidationError(path, "expected a list of strings")
    return tuple(value)


def _amounts(value, path):
    if value is None:
        return ()
    if not isinstance(value, dict):
        raise ModelValidationError(path, "expected an object of resource -> integer")
    return tuple((k, _int(v, f"{path}.{k}", 0)) for k, v in value.items())


def parse_condition(doc, path="when") -> Condition:
    if doc is None or doc is True:
        return Always(True)
    if doc is False:
        return Always(False)
    if not isinstance(doc, dict):
        raise ModelValidationError(path, "condition must be an object or boolean")
    if "resource" in doc:
        _check_keys(doc, {"resource", "op", "value"}, path)
        op = doc.get("op", ">=")
        if op not in _CMP:
            raise ModelValidationError(f"{path}.op", f"unknown comparison {op!r}")
        return ResourceCmp(_str(doc, "resource", path), op, _int(doc.get("value"), f"{path}.value"))
    if len(doc) != 1:
        raise ModelValidationError(path, "condition object needs exactly one operator key")
    (key, arg), = doc.items()
    if key == "done":
        if not isinstance(arg, str):
            raise ModelValidationError(f"{path}.done", "expected a node id")
        return Done(arg)
    if key == "clock":
        if not isinstance(arg, list) or len(arg) != 2:
            raise ModelValidationError(f"{path}.clock", "expected [from, until]")
        return ClockIn(_rational(arg[0], f"{path}.clock[0]"), _rational(arg[1], f"{path}.clock[1]"))
    if key in ("all", "any"):
        if not isinstance(arg, list):
            raise ModelValidationError(f"{path}.{key}", "expected a list of conditions")
        items = tuple(parse_condition(c, f"{path}.{key}[{i}]") for i, c in enumerate(arg))
        return AllOf(items) if key == "all" else AnyOf(items)
    if key == "not":
        return Not(parse_condition(arg, f"{path}.not"))
    raise ModelValidationError(path, f"unknown condition operator {key!r}")


def condition_to_doc(c: Condition):
    if isinstance(c, Always):
        return c.value
    if isinstance(c, Done):
        return {"done": c.node}
    if isinstance(c, ResourceCmp):
        return {"resource": c.resource, "op": c.op, "value": c.value}
    if isinstance(c, ClockIn):
        return {"clock": [_num_out(c.lo), _num_out(c.hi)]}
    if isinstance(c, AnyOf):
        return {"any": [condition_to_doc(x) for x in c.items]}
    if isinstance(c, AllOf):
        return {"all": [condition_to_doc(x) for x in c.items]}
    if isinstance(c, Not):
        return {"not": condition_to_doc(c.item)}
    raise TypeError(f"cannot serialise {c!r}")


def _parse_node(doc, path):
    _check_keys(doc, _NODE_KEYS, path)
    repeatable = doc.get("repeatable", False)
    if not isinstance(repeatable, bool):
        raise ModelValidationError(f"{path}.repeatable", "expected a boolean")
    cluster = doc.get("cluster")
    if cluster is not None and not isinstance(cluster, str):
        raise ModelValidationError(f"{path}.cluster", "expected a string or null")
    return EventNode(
        id=_str(doc, "id", path),
        repeatable=repeatable,
        grants=_amounts(doc.get("grants"), f"{path}.grants"),
        cluster_tag=cluster,
        tags=_str_list(doc.get("tags"), f"{path}.tags"),
    )


def _parse_edge(doc, path):
    _check_keys(doc, _EDGE_KEYS, path)
    if "time" not in doc:
        raise ModelValidationError(f"{path}.time", "missing")
    time = _rational(doc["time"], f"{path}.time")
    if time < 0:
        raise ModelValidationError(f"{path}.time", "time >= 0 violated")
    gain = _rational(doc.get("hidden_gain", 0), f"{path}.hidden_gain")
    if gain < 0:
        raise ModelValidationError(f"{path}.hidden_gain", "hidden_gain >= 0 violated")
    diff = _int(doc.get("difficulty", 0), f"{path}.difficulty")
    if not 0 <= diff <= 10:
        raise ModelValidationError(f"{path}.difficulty", "difficulty must be in 0..10")
    return Edge(
        id=_str(doc, "id", path),
        src=_str(doc, "from", path),
        dst=_str(doc, "to", path),
        base=EdgeWeight(time, diff, gain),
        requires=_amounts(doc.get("requires"), f"{path}.requires"),
        preconditions=_str_list(doc.get("preconditions"), f"{path}.preconditions"),
        tags=_str_list(doc.get("tags"), f"{path}.tags"),
    )


def _parse_rule(doc, path):
    _check_keys(doc, _RULE_KEYS, path)
    edges = doc.get("edges")
    tags = _str_list(doc.get("tags"), f"{path}.tags")
    if edges == "*":
        edge_ids = None
    elif edges is None:
        if not tags:
            raise ModelValidationError(path, 'rule needs "edges" (list or "*") or "tags"')
        edge_ids = frozenset()
    else:
        edge_ids = frozenset(_str_list(edges, f"{path}.edges"))
    if "value" not in doc:
        raise ModelValidationError(f"{path}.value", "missing")
    return WeightRule(
        id=_str(doc, "id", path),
        priority=_int(doc.get("priority", 0), f"{path}.priority"),
        condition=parse_condition(doc.get("when"), f"{path}.when"),
        edge_ids=edge_ids,
        edge_tags=frozenset(tags),
        component=_str(doc, "component", path),
        effect=_str(doc, "effect", path),
        value=_rational(doc["value"], f"{path}.value"),
    )


def _parse_resource(doc, path):
    _check_keys(doc, _RES_KEYS, path)
    cap = doc.get("cap")
    return ResourceDef(
        id=_str(doc, "id", path),
        initial=_int(doc.get("initial", 0), f"{path}.initial", 0),
        cap=None if cap is None else _int(cap, f"{path}.cap", 0),
    )


def model_from_document(doc: dict) -> GameModel:
    _check_keys(doc, _TOP_KEYS, "$")
    if doc.get("schema") != MODEL_SCHEMA:
        raise ModelValidationError("schema", f"expected {MODEL_SCHEMA!r}, got {doc.get('schema')!r}")

    def seq(key):
        value = doc.get(key, [])
        if not isinstance(value, list):
            raise ModelValidationError(key, "expected a list")
        return value

    clock = doc.get("clock")
    period = None
    if clock is not None:
        _check_keys(clock, {"period"}, "clock")
        period = _rational(clock.get("period"), "clock.period")
    ends = doc.get("ends")
    if isinstance(ends, str):
        ends = [ends]
    return GameModel(
        nodes=tuple(_parse_node(n, f"nodes[{i}]") for i, n in enumerate(seq("nodes"))),
        edges=tuple(_parse_edge(e, f"edges[{i}]") for i, e in enumerate(seq("edges"))),
        rules=tuple(_parse_rule(r, f"rules[{i}]") for i, r in enumerate(seq("rules"))),
        resources=tuple(_parse_resource(r, f"resources[{i}]") for i, r in enumerate(seq("resources"))),
        clock_period=period,
        start=_str(doc, "start", "$"),
        ends=frozenset(_str_list(ends, "ends")),
        required=frozenset(_str_list(doc.get("required", []), "required")),
    )


def load_model(source: Union[str, Path, dict]) -> GameModel:
    """Load and validate a model from a path, a JSON string or a parsed dict."""
    if isinstance(source, dict):
        return model_from_document(source)
    if isinstance(source, Path) or (isinstance(source, str) and not source.lstrip().startswith("{")):
        text = Path(source).read_text()
    else:
        text = source
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelParseError(f"malformed model document: {exc}") from None
    if not isinstance(doc, dict):
        raise ModelParseError("model document must be a JSON object")
    return model_from_document(doc)


def _num_out(value: Fraction):
    value = Fraction(value)
    return value.numerator if value.denominator == 1 else fmt_rational(value)


def model_to_document(m: GameModel) -> dict[str, Any]:
    nodes = []
    for n in m.nodes:
        d: dict[str, Any] = {"id": n.id}
        if n.repeatable:
            d["repeatable"] = True
        if n.grants:
            d["grants"] = dict(n.grants)
        if n.cluster_tag is not None:
            d["cluster"] = n.cluster_tag
        if n.tags:
            d["tags"] = list(n.tags)
        nodes.append(d)
    edges = []
    for e in m.edges:
        d = {"id": e.id, "from": e.src, "to": e.dst, "time": _num_out(e.base.time)}
        if e.base.difficulty:
            d["difficulty"] = e.base.difficulty
        if e.base.hidden_gain:
            d["hidden_gain"] = _num_out(e.base.hidden_gain)
        if e.requires:
            d["requires"] = dict(e.requires)
        if e.preconditions:
            d["preconditions"] = list(e.preconditions)
        if e.tags:
            d["tags"] = list(e.tags)
        edges.append(d)
    rules = []
    for r in m.rules:
        d = {"id": r.id, "priority": r.priority, "when": condition_to_doc(r.condition)}
        if r.edge_ids is None and not r.edge_tags:
            d["edges"] = "*"
        elif r.edge_ids:
            d["edges"] = sorted(r.edge_ids)
        if r.edge_tags:
            d["tags"] = sorted(r.edge_tags)
        d.update(component=r.component, effect=r.effect, value=_num_out(r.value))
        rules.append(d)
    return {
        "schema": MODEL_SCHEMA,
        "nodes": nodes,
        "edges": edges,
        "rules": rules,
        "resources": [{"id": r.id, "initial": r.initial, "cap": r.cap} for r in m.resources],
        "clock": None if m.clock_period is None else {"period": _num_out(m.clock_period)},
        "start": m.start,
        "ends": sorted(m.ends),
        "required": sorted(m.required),
    }


def dumps(doc) -> str:
    """Canonical JSON text: sorted keys, fixed indentation, trailing newline."""
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def model_hash(m: GameModel) -> str:
    canon = json.dumps(model_to_document(m), sort_keys=True, separators=(",", ":"))
    return "sha256:" + hashlib.sha256(canon.encode()).hexdigest()


def route_document(m: GameModel, route: Route, **extra) -> dict[str, Any]:
    doc = {
        "schema": ROUTE_SCHEMA,
        "model_hash": model_hash(m),
        "steps": list(route.steps),
        "totals": {
            "time": fmt_rational(route.total_time),
            "max_difficulty": route.max_difficulty,
            "hidden_gain": fmt_rational(route.total_hidden_gain),
        },
    }
    doc.update(extra)
    return doc


def read_route_steps(source: Union[str, Path, dict]) -> list[str]:
    """Steps from a route document; a bare JSON list of edge ids is accepted too."""
    if isinstance(source, dict):
        doc = source
    else:
        try:
            doc = json.loads(Path(source).read_text())
        except json.JSONDecodeError as exc:
            raise ModelParseError(f"malformed route document: {exc}") from None
    if isinstance(doc, list):
        steps = doc
    elif isinstance(doc, dict) and isinstance(doc.get("steps"), list):
        steps = doc["steps"]
    else:
        raise ModelParseError('route document needs a "steps" list')
    if not all(isinstance(s, str) for s in steps):
        raise ModelParseError("route steps must be edge id strings")
    return steps


def _dot_id(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(m: GameModel) -> str:
    lines = [f"digraph {_dot_id('speedroute')} {{", "  rankdir=LR;"]
    for n in m.nodes:
        attrs = []
        if n.id == m.start:
            attrs.append("shape=box")
        elif n.id in m.ends:
            attrs.append("shape=doubleoctagon")
        if n.id in m.required:
            attrs.append("peripheries=2")
        if n.repeatable:
            attrs.append("style=dashed")
        label = n.id + "".join(f"\\n+{amt} {rid}" for rid, amt in n.grants)
        attrs.append(f"label={_dot_id(label)}")
        lines.append(f"  {_dot_id(n.id)} [{', '.join(attrs)}];")
    for e in m.edges:
        label = fmt_rational(e.base.time)
        if e.base.difficulty:
            label += f" d{e.base.difficulty}"
        attrs = [f"label={_dot_id(label)}", f"tooltip={_dot_id(e.id)}"]
        if "glitch" in e.tags:
            attrs.append("style=dashed")
        lines.append(f"  {_dot_id(e.src)} -> {_dot_id(e.dst)} [{', '.join(attrs)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
