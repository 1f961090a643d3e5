"""Command line front end: solve one problem, run comparison suites,
serve the live elicitation API, or print the policy-quality diagnostic.

Exit codes: 0 when the command completed (and any requested plan was
found), 2 when planning finished without a plan, 3 for configuration or
usage errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .bench import emit, kl_diagnostic, load_suite_config, run_suite
from .errors import PgplanError, SuiteConfigError
from .oracle import (
    NoisyExpert,
    ScriptedOracle,
    SilentExpert,
    load_upfront,
    log_elicited,
)
from .parser import parse_domain, parse_problem
from .preferences import PreferenceStore
from .search import (
    ACTIVE,
    NONE,
    RANDOM,
    STRATEGIES,
    UPFRONT,
    SearchObserver,
    SearchParams,
    pg_search,
)
from .validator import validate_plan

EXIT_OK = 0
EXIT_UNSOLVED = 2
EXIT_CONFIG = 3


class _Parser(argparse.ArgumentParser):
    """argparse's default usage-error exit code is 2; this tool reserves
    2 for unsolved problems, so usage errors exit 3."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"error: {message}\n")


class _TraceObserver(SearchObserver):
    def __init__(self):
        self.records = []

    def node_evaluated(self, record):
        self.records.append(record)


def _read(path: str) -> str:
    with open(path, encoding="utf-8") as handle:
        return handle.read()


def _solve_expert(args, domain):
    if args.strategy not in (ACTIVE, RANDOM):
        if args.oracle:
            raise SuiteConfigError(
                f"strategy '{args.strategy}' takes no oracle"
            )
        return None
    if args.prefs:
        raise SuiteConfigError(
            f"strategy '{args.strategy}' elicits preferences; "
            "use --prefs with strategy upfront"
        )
    expert = (
        ScriptedOracle.from_file(args.oracle, domain)
        if args.oracle else SilentExpert()
    )
    if args.flip_prob > 0.0:
        expert = NoisyExpert(expert, args.flip_prob, seed=args.seed)
    return expert


def cmd_solve(args) -> int:
    domain = parse_domain(_read(args.domain))
    problem = parse_problem(_read(args.problem), domain)
    store = PreferenceStore()
    if args.prefs and args.strategy not in (UPFRONT,):
        raise SuiteConfigError(
            f"strategy '{args.strategy}' takes no upfront preferences"
        )
    if args.prefs:
        for pref in load_upfront(args.prefs, domain):
            store.add(pref)
    expert = _solve_expert(args, domain)
    params = SearchParams(
        rollout_depth=args.rollout_depth,
        entropy_threshold=args.entropy_threshold,
        temperature=args.temperature,
        time_budget=args.time_limit,
        rng_seed=args.seed,
        random_query_prob=args.random_query_prob,
        max_queries=args.max_queries,
    )
    observer = _TraceObserver() if (args.trace or args.out) else None
    result = pg_search(
        domain, problem, expert, store, params, args.strategy, observer
    )
    stats = result.stats
    defects = (
        validate_plan(domain, problem, result.plan)
        if result.plan is not None else []
    )

    if args.out:
        os.makedirs(args.out, exist_ok=True)
        with open(os.path.join(args.out, "plan.txt"), "w", encoding="utf-8") as fh:
            if result.plan is not None:
                fh.write("\n".join(str(s) for s in result.plan.steps) + "\n")
        with open(os.path.join(args.out, "stats.json"), "w", encoding="utf-8") as fh:
            json.dump({
                "solved": stats.solved,
                "plan_len": stats.plan_len,
                "reason": result.reason,
                "nodes": stats.nodes_expanded,
                "backtracks": stats.backtracks,
                "queries": stats.queries_issued,
                "prefs": stats.prefs_acquired,
                "max_depth": stats.max_depth,
                "wall_ms": stats.wall_ms,
            }, fh, indent=2)
            fh.write("\n")
        if observer is not None:
            with open(os.path.join(args.out, "trace.json"), "w", encoding="utf-8") as fh:
                json.dump(observer.records, fh, indent=2)
                fh.write("\n")
        if any(p.origin == "elicited" for p in store):
            log_elicited(store, os.path.join(args.out, "elicited.prefs"))

    if args.trace:
        for record in observer.records:
            print(json.dumps(record))
        print(json.dumps({
            "result": {
                "solved": stats.solved,
                "plan": [str(s) for s in result.plan.steps]
                if result.plan else [],
                "reason": result.reason,
                "queries": stats.queries_issued,
                "prefs": stats.prefs_acquired,
                "nodes": stats.nodes_expanded,
            }
        }))
    else:
        print(f"strategy: {args.strategy}")
        if result.plan is not None:
            print(f"plan ({stats.plan_len} steps):")
            for step in result.plan.steps:
                print(f"  {step}")
        else:
            print(f"no plan: {result.reason}")
        print(
            f"nodes: {stats.nodes_expanded}  backtracks: {stats.backtracks}  "
            f"queries: {stats.queries_issued}  prefs: {stats.prefs_acquired}  "
            f"wall: {stats.wall_ms:.1f} ms"
        )
    if defects:
        for defect in defects:
            print(f"plan defect: {defect}", file=sys.stderr)
        return EXIT_UNSOLVED
    return EXIT_OK if result.plan is not None else EXIT_UNSOLVED


def cmd_suite(args) -> int:
    config = load_suite_config(args.config)
    report = run_suite(config)
    out_dir = args.out or config.out_dir
    if out_dir:
        for fmt in ("json", "csv"):
            print(f"wrote {emit(report, fmt, out_dir)}")
    print(report["header"]["note"])
    widths = "{:<10} {:>14} {:>14} {:>8} {:>8} {:>10}"
    print(widths.format(
        "strategy", "percent_solved", "mean_plan_len", "queries",
        "usage", "influence%",
    ))
    for strategy, agg in report["aggregates"].items():
        mean_len = agg["mean_plan_len"]
        influence = agg["influence_percent"]
        print(widths.format(
            strategy,
            f"{agg['percent_solved']:.1f}",
            "-" if mean_len is None else f"{mean_len:.2f}",
            agg["queries"],
            agg["usage_count"],
            "-" if influence is None else f"{influence:.1f}",
        ))
    for notice in report["notices"]:
        print(f"notice: {notice}")
    return EXIT_OK


def cmd_kl(args) -> int:
    domain = parse_domain(_read(args.domain))
    problem = parse_problem(_read(args.problem), domain)
    store = PreferenceStore()
    if args.prefs:
        for pref in load_upfront(args.prefs, domain):
            store.add(pref)
    params = SearchParams(
        rollout_depth=args.rollout_depth, temperature=args.temperature
    )
    out = kl_diagnostic(domain, problem, store, params, max_nodes=args.max_nodes)
    print(f"D_R (rollout only):      {out['D_R']:.9g}")
    print(f"D_A (with preferences):  {out['D_A']:.9g}")
    print(f"difference (D_R - D_A):  {out['difference']:.9g}")
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(blind=args.blind_console, static_dir=args.static)
    uvicorn.run(app, host=args.host, port=args.port)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pgplan", description=__doc__)
    commands = parser.add_subparsers(dest="command", required=True)

    solve = commands.add_parser("solve", help="plan one problem")
    solve.add_argument("--domain", required=True)
    solve.add_argument("--problem", required=True)
    solve.add_argument("--strategy", choices=STRATEGIES, default=NONE)
    channel = solve.add_mutually_exclusive_group()
    channel.add_argument("--oracle", help="scripted expert rule file")
    channel.add_argument("--prefs", help="preferences to load before planning")
    solve.add_argument("--entropy-threshold", type=float, default=0.5)
    solve.add_argument("--rollout-depth", type=int, default=3)
    solve.add_argument("--temperature", type=float, default=1.0)
    solve.add_argument("--seed", type=int, default=0)
    solve.add_argument("--time-limit", type=float, default=600.0)
    solve.add_argument("--random-query-prob", type=float, default=0.1)
    solve.add_argument("--max-queries", type=int, default=None)
    solve.add_argument("--flip-prob", type=float, default=0.0,
                       help="probability of inverting each expert answer")
    solve.add_argument("--trace", action="store_true",
                       help="print per-node policy records as JSON lines")
    solve.add_argument("--out", help="directory for plan/stats/trace files")
    solve.set_defaults(func=cmd_solve)

    suite = commands.add_parser("suite", help="run a strategy comparison")
    suite.add_argument("--config", required=True)
    suite.add_argument("--out", help="directory for report.json/report.csv")
    suite.set_defaults(func=cmd_suite)

    serve = commands.add_parser("serve", help="start the elicitation service")
    serve.add_argument("--port", type=int, default=8000)
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--blind-console", action="store_true",
                       help="hide method scores from posed queries")
    serve.add_argument("--static", help="directory with the console bundle")
    serve.set_defaults(func=cmd_serve)

    kl = commands.add_parser("kl", help="policy divergence diagnostic")
    kl.add_argument("--domain", required=True)
    kl.add_argument("--problem", required=True)
    kl.add_argument("--prefs")
    kl.add_argument("--rollout-depth", type=int, default=3)
    kl.add_argument("--temperature", type=float, default=1.0)
    kl.add_argument("--max-nodes", type=int, default=10_000)
    kl.set_defaults(func=cmd_kl)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (PgplanError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
