"""Event digraph, dynamic weights and the reference route evaluator."""

from .dynamics import initial_state, resolve_weight
from .io import (
    MODEL_SCHEMA,
    ROUTE_SCHEMA,
    dumps,
    load_model,
    model_hash,
    model_to_document,
    read_route_steps,
    route_document,
    to_dot,
)
from .routes import Violation, evaluate_route, validate_route
from .transforms import apply_ruleset, cluster_nodes, reachable, reduce_model
from .types import (
    Edge,
    EdgeWeight,
    EventNode,
    GameModel,
    GameState,
    ResourceDef,
    Route,
    WeightRule,
)

__all__ = [
    "MODEL_SCHEMA",
    "ROUTE_SCHEMA",
    "Edge",
    "EdgeWeight",
    "EventNode",
    "GameModel",
    "GameState",
    "ResourceDef",
    "Route",
    "Violation",
    "WeightRule",
    "apply_ruleset",
    "cluster_nodes",
    "dumps",
    "evaluate_route",
    "initial_state",
    "load_model",
    "model_hash",
    "model_to_document",
    "reachable",
    "read_route_steps",
    "reduce_model",
    "resolve_weight",
    "route_document",
    "to_dot",
    "validate_route",
]
