"""Model-to-model transforms: reduction to required events, clustering, ruleset filtering."""

from __future__ import annotations

from collections import defaultdict

from ..errors import InfeasibleError, ModelValidationError
from .types import AllOf, Always, Condition, Done, EventNode, GameModel, Not, WeightRule


def reachable(m: GameModel, src: str | None = None) -> set[str]:
    """Nodes reachable from ``src`` (default: start) ignoring resources and preconditions."""
    src = m.start if src is None else src
    seen, stack = {src}, [src]
    while stack:
        for e in m.out_edges[stack.pop()]:
            if e.dst not in seen:
                seen.add(e.dst)
                stack.append(e.dst)
    return seen


def check_reachability(m: GameModel) -> None:
    seen = reachable(m)
    missing = sorted(m.required - seen)
    if missing:
        raise InfeasibleError(
            f"required event(s) unreachable from {m.start!r}: {', '.join(missing)}",
            kind="disconnected",
            unreachable=missing,
        )
    if not m.ends & seen:
        raise InfeasibleError(f"no end event reachable from {m.start!r}", kind="disconnected")


def _rewrite_condition(c: Condition, mapping: dict) -> Condition:
    """Rename ``done`` atoms; a mapping to None makes the atom constantly false."""
    if isinstance(c, Done):
        if c.node not in mapping:
            return c
        target = mapping[c.node]
        return Always(False) if target is None else Done(target)
    if isinstance(c, AllOf):
        return type(c)(tuple(_rewrite_condition(x, mapping) for x in c.items))
    if isinstance(c, Not):
        return Not(_rewrite_condition(c.item, mapping))
    return c


def _prune_rules(rules, kept_edges: set, node_map: dict) -> tuple[WeightRule, ...]:
    out = []
    for r in rules:
        edge_ids = r.edge_ids
        if edge_ids is not None:
            edge_ids = frozenset(edge_ids & kept_edges)
            if not edge_ids and not r.edge_tags:
                continue
        cond = _rewrite_condition(r.condition, node_map) if node_map else r.condition
        if edge_ids == r.edge_ids and cond == r.condition:
            out.append(r)
        else:
            out.append(WeightRule(r.id, r.component, r.effect, r.value, cond, r.priority, edge_ids, r.edge_tags))
    return tuple(out)


def reduce_model(m: GameModel) -> GameModel:
    """Keep only start, ends and required events plus the edges among them.

    Optional events (pickups, refills) are dropped with their incident edges.
    Edges gated on a dropped event become untraversable and are removed too.
    The result carries ``reduced=True`` because a dropped detour may have been
    what made the true optimum fast.
    """
    keep = set(m.required) | set(m.ends) | {m.start}
    dropped = {n.id for n in m.nodes if n.id not in keep}
    if not dropped:
        return m
    edges = tuple(
        e
        for e in m.edges
        if e.src in keep and e.dst in keep and not any(p in dropped for p in e.preconditions)
    )
    kept_edges = {e.id for e in edges}
    out = m.replace(
        nodes=tuple(n for n in m.nodes if n.id in keep),
        edges=edges,
        rules=_prune_rules(m.rules, kept_edges, {d: None for d in dropped}),
        reduced=True,
    )
    check_reachability(out)
    return out


def apply_ruleset(m: GameModel, banned_tags) -> GameModel:
    """Remove every edge carrying a banned tag (e.g. ``"glitch"``)."""
    banned = set(banned_tags)
    if not banned:
        return m
    edges = tuple(e for e in m.edges if not banned.intersection(e.tags))
    if len(edges) == len(m.edges):
        return m
    out = m.replace(edges=edges, rules=_prune_rules(m.rules, {e.id for e in edges}, {}))
    check_reachability(out)
    return out


def cluster_nodes(m: GameModel) -> GameModel:
    """Merge nodes sharing a ``cluster_tag`` into one node named after the tag."""
    groups = defaultdict(list)
    for n in m.nodes:
        if n.cluster_tag is not None:
            groups[n.cluster_tag].append(n)
    merges = {tag: members for tag, members in groups.items() if len(members) > 1}
    if not merges:
        return m

    node_map = {}
    for tag, members in merges.items():
        ids = {n.id for n in members}
        if m.start in ids and ids & m.ends:
            raise ModelValidationError(f"cluster {tag!r}", "cluster holds both the start and an end event")
        if tag in m.node_by_id and tag not in ids:
            raise ModelValidationError(f"cluster {tag!r}", "cluster tag collides with an existing node id")
        for nid in ids:
            node_map[nid] = tag

    def ren(nid):
        return node_map.get(nid, nid)

    nodes, emitted = [], set()
    for n in m.nodes:
        target = ren(n.id)
        if target in emitted:
            continue
        emitted.add(target)
        if n.id not in node_map:
            nodes.append(n)
            continue
        members = merges[target]
        grants = defaultdict(int)
        for mem in members:
            for rid, amt in mem.grants:
                grants[rid] += amt
        tags = []
        for mem in members:
            tags.extend(t for t in mem.tags if t not in tags)
        nodes.append(
            EventNode(
                id=target,
                repeatable=all(mem.repeatable for mem in members),
                grants=tuple(grants.items()),
                cluster_tag=target,
                tags=tuple(tags),
            )
        )

    best = {}
    for e in sorted(m.edges, key=lambda e: e.id):
        src, dst = ren(e.src), ren(e.dst)
        if src == dst and (e.src in node_map or e.dst in node_map):
            continue  # internal to a merged cluster
        key = (src, dst, tuple(sorted(e.tags)))
        cur = best.get(key)
        if cur is None or e.base.time < cur.base.time:
            best[key] = e
    survivors = {e.id for e in best.values()}
    edges = []
    for e in m.edges:
        if e.id not in survivors:
            continue
        pre = tuple(dict.fromkeys(ren(p) for p in e.preconditions))
        edges.append(type(e)(e.id, ren(e.src), ren(e.dst), e.base, e.requires, pre, e.tags))

    return m.replace(
        nodes=tuple(nodes),
        edges=tuple(edges),
        rules=_prune_rules(m.rules, survivors, node_map),
        start=ren(m.start),
        ends=frozenset(ren(x) for x in m.ends),
        required=frozenset(ren(x) for x in m.required),
    )
