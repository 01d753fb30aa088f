"""``speedroute`` command line: load, transform, solve, validate, export.

Exit status: 0 success, 1 infeasible model or invalid route, 2 usage or
validation error. Every run prints the seed it used; files written with
``--out``/``--log`` are the machine interface and are byte-stable for a
given seed.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from ._num import fmt_rational
from .errors import InfeasibleError, ModelParseError, ModelValidationError, RouteError
from .gen import FAMILIES, GenerationError, GenSpec, generate_document
from .model import apply_ruleset, cluster_nodes, load_model, reduce_model
from .model.io import dumps, read_route_steps, route_document, to_dot
from .model.routes import validate_route
from .solvers import ACOParams, MOParams, SolverParams, brute_force, solve_aco, solve_ga, solve_pareto
from .solvers.ga import log_to_csv
from .statespace import SearchConfig, count_states, expand_and_search
from .timesave import best_ordering, load_stage_model


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _model_args(p: argparse.ArgumentParser):
    p.add_argument("model", help="model document (JSON)")
    p.add_argument("--repeat-cap", type=int, default=3, help="extra visits allowed per repeatable event")
    p.add_argument("--clock-buckets", type=int, default=1, help="clock buckets used for state identity")
    p.add_argument("--state-budget", type=int, default=1_000_000)
    p.add_argument("--difficulty-cap", type=int, default=None, help="ignore edges harder than this")
    p.add_argument("--banned-tags", default="", help="comma-separated edge tags to remove first")
    p.add_argument("--reduce", action="store_true", help="drop events that are not start, end or required")
    p.add_argument("--cluster", action="store_true", help="merge events sharing a cluster tag")


def _solver_args(p: argparse.ArgumentParser, aco=False):
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1, help="processes for fitness evaluation")
    p.add_argument("--population", type=int, default=SolverParams.population)
    p.add_argument("--generations", type=int, default=SolverParams.generations)
    p.add_argument("--crossover-rate", type=float, default=SolverParams.crossover_rate)
    p.add_argument("--mutation-rate", type=float, default=SolverParams.mutation_rate)
    p.add_argument("--stitch", choices=("auto", "greedy", "relaxed", "exhaustive"), default="auto")
    p.add_argument("--log", help="write the per-generation CSV log here")
    if aco:
        p.add_argument("--ants", type=int, default=ACOParams.ants)
        p.add_argument("--iterations", type=int, default=ACOParams.iterations)
        p.add_argument("--evaporation", type=float, default=ACOParams.evaporation)
        p.add_argument("--alpha", type=float, default=ACOParams.alpha)
        p.add_argument("--beta", type=float, default=ACOParams.beta)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="speedroute", description="Speedrun route optimisation over event graphs.")
    parser.add_argument("--version", action="version", version=f"speedroute {__version__}")
    sub = parser.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    p = sub.add_parser("solve", help="fastest route (GA by default)")
    _model_args(p)
    _solver_args(p, aco=True)
    p.add_argument("--algo", choices=("ga", "aco", "exact"), default="ga")
    p.add_argument("--out", help="write the route document here")

    p = sub.add_parser("pareto", help="time/difficulty trade-off front")
    _model_args(p)
    _solver_args(p)
    p.add_argument("--archive-cap", type=int, default=MOParams.archive_cap)
    p.add_argument("--out", help="write the front as CSV here")

    p = sub.add_parser("oracle", help="brute force over every order of the required events")
    _model_args(p)
    p.add_argument("--seed", type=int, default=0, help="echoed only; the oracle is deterministic")
    p.add_argument("--mode", choices=("greedy", "full"), default="greedy")
    p.add_argument("--out", help="write the route document here")

    p = sub.add_parser("validate", help="check a route document against a model")
    p.add_argument("model")
    p.add_argument("route")
    p.add_argument("--seed", type=int, default=0, help="echoed only")

    p = sub.add_parser("expand", help="count reachable states")
    _model_args(p)
    p.add_argument("--seed", type=int, default=0, help="echoed only")
    p.add_argument("--up-to", type=int, default=None, help="report counts for repeat caps 0..N")
    p.add_argument("--out", help="write the counts as JSON here")

    p = sub.add_parser("stages", help="best stage ordering for a stage document")
    p.add_argument("stages")
    p.add_argument("--mode", choices=("exact", "enumerate", "ga"), default="exact")
    _solver_args(p)
    p.add_argument("--out", help="write the ordering as JSON here")

    p = sub.add_parser("gen", help="generate a synthetic instance")
    p.add_argument("--family", choices=FAMILIES, required=True)
    p.add_argument("--nodes", type=int, required=True)
    p.add_argument("--required", type=int, default=None)
    p.add_argument("--resources", type=int, default=1)
    p.add_argument("--rules", type=int, default=2)
    p.add_argument("--difficulties", action="store_true", help="draw random edge difficulties")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="write the document here (default stdout)")

    p = sub.add_parser("export-dot", help="Graphviz rendering of a model")
    p.add_argument("model")
    p.add_argument("--seed", type=int, default=0, help="echoed only")
    p.add_argument("--out", help="write the DOT text here (default stdout)")
    return parser


def _write(path: Optional[str], text: str, out) -> None:
    if path:
        Path(path).write_text(text, encoding="utf-8")
    else:
        out.write(text)


def _load(args):
    m = load_model(Path(args.model))
    banned = {t.strip() for t in args.banned_tags.split(",") if t.strip()}
    if banned:
        m = apply_ruleset(m, banned)
    if args.cluster:
        m = cluster_nodes(m)
    if args.reduce:
        m = reduce_model(m)
    return m


def _config(args, repeat_cap=None) -> SearchConfig:
    return SearchConfig(
        repeat_cap=args.repeat_cap if repeat_cap is None else repeat_cap,
        clock_buckets=args.clock_buckets,
        state_budget=args.state_budget,
        difficulty_cap=args.difficulty_cap,
    )


def _params(args) -> SolverParams:
    extra = {}
    if hasattr(args, "ants"):
        extra["aco"] = ACOParams(
            ants=args.ants,
            iterations=args.iterations,
            evaporation=args.evaporation,
            alpha=args.alpha,
            beta=args.beta,
        )
    if hasattr(args, "archive_cap"):
        extra["mo"] = MOParams(archive_cap=args.archive_cap)
    return SolverParams(
        seed=args.seed,
        workers=args.workers,
        population=args.population,
        generations=args.generations,
        crossover_rate=args.crossover_rate,
        mutation_rate=args.mutation_rate,
        stitch=args.stitch,
        **extra,
    )


def _summary(route, out) -> None:
    out.write(
        f"time {fmt_rational(route.total_time)}  max difficulty {route.max_difficulty}  "
        f"hidden gain {fmt_rational(route.total_hidden_gain)}  steps {len(route.steps)}\n"
    )
    out.write("route: " + " ".join(route.steps) + "\n")


def _cmd_solve(args, out):
    m = _load(args)
    cfg = _config(args)
    if args.algo == "exact":
        res = expand_and_search(m, cfg)
        route, extra = res.route, {"algo": "exact", "stats": res.stats.as_dict()}
        out.write(f"expanded {res.stats.expanded} states, frontier peak {res.stats.frontier_peak}\n")
    else:
        params = _params(args)
        solve = solve_ga if args.algo == "ga" else solve_aco
        res = solve(m, params, cfg)
        route = res.route
        extra = {"algo": args.algo, "seed": args.seed, "order": list(res.order)}
        if args.log:
            _write(args.log, log_to_csv(res.log), out)
    _summary(route, out)
    if args.out:
        _write(args.out, dumps(route_document(m, route, **extra)), out)
    return 0


def _cmd_pareto(args, out):
    m = _load(args)
    res = solve_pareto(m, _params(args), _config(args))
    for t, d in res.front.objectives:
        out.write(f"time {fmt_rational(t)}  difficulty {d}\n")
    if args.out:
        _write(args.out, res.front.to_csv(), out)
    if args.log:
        _write(args.log, log_to_csv(res.log), out)
    return 0


def _cmd_oracle(args, out):
    m = _load(args)
    res = brute_force(m, _config(args), mode=args.mode)
    out.write(f"{res.evaluated} orders evaluated, best order: {' '.join(res.order)}\n")
    _summary(res.route, out)
    if args.out:
        doc = route_document(m, res.route, algo=f"oracle-{args.mode}", order=list(res.order))
        _write(args.out, dumps(doc), out)
    return 0


def _cmd_validate(args, out):
    m = load_model(Path(args.model))
    violations = validate_route(m, read_route_steps(Path(args.route)))
    if violations:
        for v in violations:
            where = "" if v.step is None else f" (step {v.step})"
            out.write(f"violation [{v.kind}]{where}: {v.message}\n")
        return 1
    out.write("route is valid\n")
    return 0


def _cmd_expand(args, out):
    m = _load(args)
    caps = range(args.up_to + 1) if args.up_to is not None else [args.repeat_cap]
    counts = {}
    for cap in caps:
        counts[cap] = count_states(m, _config(args, cap))
        out.write(f"repeat cap {cap}: {counts[cap]} states\n")
    if args.out:
        doc = {"clock_buckets": args.clock_buckets, "states": [{"repeat_cap": k, "count": v} for k, v in counts.items()]}
        _write(args.out, dumps(doc), out)
    return 0


def _cmd_stages(args, out):
    sm = load_stage_model(Path(args.stages))
    res = best_ordering(sm, args.mode, _params(args))
    out.write(f"order: {' '.join(res.order)}\n")
    out.write(f"total time {fmt_rational(res.score.total_time)}  saved {res.score.total_save}\n")
    if args.out:
        doc = {
            "order": list(res.order),
            "total_time": fmt_rational(res.score.total_time),
            "total_save": res.score.total_save,
            "mode": args.mode,
        }
        _write(args.out, dumps(doc), out)
    if args.log and res.log:
        _write(args.log, log_to_csv(res.log), out)
    return 0


def _cmd_gen(args, out):
    spec = GenSpec(
        family=args.family,
        nodes=args.nodes,
        required=args.required,
        resources=args.resources,
        rules=args.rules,
        seed=args.seed,
        difficulties=args.difficulties,
    )
    _write(args.out, dumps(generate_document(spec)), out)
    return 0


def _cmd_export_dot(args, out):
    _write(args.out, to_dot(load_model(Path(args.model))), out)
    return 0


COMMANDS = {
    "solve": _cmd_solve,
    "pareto": _cmd_pareto,
    "oracle": _cmd_oracle,
    "validate": _cmd_validate,
    "expand": _cmd_expand,
    "stages": _cmd_stages,
    "gen": _cmd_gen,
    "export-dot": _cmd_export_dot,
}


def run(argv: Optional[Sequence[str]] = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        err.write(f"{exc}\n")
        return 2
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)

    # stdout stays free for documents when gen/export-dot print to it
    seed_stream = err if args.verb in ("gen", "export-dot") and not args.out else out
    seed_stream.write(f"seed: {args.seed}\n")
    try:
        return COMMANDS[args.verb](args, out)
    except InfeasibleError as exc:
        err.write(f"infeasible ({exc.kind}): {exc}\n")
        return 1
    except RouteError as exc:
        err.write(f"invalid route: {exc}\n")
        return 1
    except (ModelParseError, ModelValidationError, GenerationError) as exc:
        err.write(f"{exc}\n")
        return 2
    except (ValueError, OSError) as exc:
        err.write(f"error: {exc}\n")
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
