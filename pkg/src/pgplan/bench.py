"""Strategy-comparison suites, preference-usage profiles, and a
policy-quality diagnostic.

A suite runs every (problem, strategy) cell with its own store and
expert, then aggregates: percent solved, mean plan length over the
problems every strategy solved, plan-length ratios against the longest
average, learning curves, preference influence, and cumulative
usage-versus-depth curves. Reports are plain dicts with a fixed field
order so seeded runs serialize identically apart from wall-clock
fields.
"""

from __future__ import annotations

import csv
import json
import math
import os
import tempfile
from dataclasses import dataclass, field, fields, replace

from .bruteforce import best_plan_length
from .errors import SuiteConfigError
from .model import Domain, Problem
from .oracle import ScriptedOracle, load_upfront, log_elicited
from .parser import parse_domain, parse_problem
from .preferences import PreferenceStore
from .search import (
    ACTIVE,
    DEAD_END,
    RANDOM,
    STRATEGIES,
    UPFRONT,
    SearchParams,
    boltzmann,
    eval_node,
    pg_search,
)
from .semantics import admissible_methods, instantiate_subtasks
from .validator import validate_plan

CSV_COLUMNS = ("problem", "strategy", "solved", "plan_len", "queries",
               "prefs", "wall_ms", "nodes")
AGGREGATE_COLUMNS = ("strategy", "percent_solved", "mean_plan_len",
                     "plan_length_ratio", "queries", "usage_count",
                     "influence_percent")

_CONFIG_KEYS = {"domain", "problems", "oracle", "prefs", "strategies",
                "carry_prefs", "time_budget", "seeds", "params", "out"}
_RESERVED_PARAMS = {"rng_seed", "time_budget"}


@dataclass
class SuiteConfig:
    """One benchmark run: which problems, which strategies, what knobs."""

    domain_path: str
    problem_paths: list[str]
    strategies: list[str]
    oracle_path: str | None = None
    prefs_path: str | None = None
    carry_prefs: bool = True
    time_budget: float = 30.0
    seeds: list[int] = field(default_factory=lambda: [0])
    overrides: dict = field(default_factory=dict)
    out_dir: str | None = None


def _require_file(path: str, role: str) -> None:
    if not os.path.isfile(path):
        raise SuiteConfigError(f"{role} file not found: {path}")


def validate_config(config: SuiteConfig) -> None:
    """Fail fast on anything that would abort the suite mid-run."""
    if not config.problem_paths:
        raise SuiteConfigError("suite lists no problems")
    if not config.strategies:
        raise SuiteConfigError("suite lists no strategies")
    for strategy in config.strategies:
        if strategy not in STRATEGIES:
            raise SuiteConfigError(f"unknown strategy '{strategy}'")
    if not config.seeds:
        raise SuiteConfigError("suite lists no seeds")
    if config.time_budget <= 0:
        raise SuiteConfigError("time_budget must be positive")
    _require_file(config.domain_path, "domain")
    for path in config.problem_paths:
        _require_file(path, "problem")
    needs_oracle = {ACTIVE, RANDOM} & set(config.strategies)
    if needs_oracle and config.oracle_path is None:
        raise SuiteConfigError(
            f"strategies {sorted(needs_oracle)} need an oracle file"
        )
    if config.oracle_path is not None:
        _require_file(config.oracle_path, "oracle")
    if UPFRONT in config.strategies and config.prefs_path is None:
        raise SuiteConfigError("strategy 'upfront' needs a prefs file")
    if config.prefs_path is not None:
        _require_file(config.prefs_path, "prefs")
    known = {f.name for f in fields(SearchParams)}
    for key in config.overrides:
        if key in _RESERVED_PARAMS:
            raise SuiteConfigError(
                f"set '{key}' through the top-level seeds/time_budget fields"
            )
        if key not in known:
            raise SuiteConfigError(f"unknown search parameter '{key}'")


def load_suite_config(path: str) -> SuiteConfig:
    """Read a suite description; relative paths resolve against the
    config file's own directory."""
    try:
        with open(path, encoding="utf-8") as handle:
            raw = json.load(handle)
    except OSError as exc:
        raise SuiteConfigError(f"cannot read suite config: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise SuiteConfigError(f"suite config is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise SuiteConfigError("suite config must be a JSON object")
    unknown = set(raw) - _CONFIG_KEYS
    if unknown:
        raise SuiteConfigError(f"unknown suite config keys: {sorted(unknown)}")
    if "domain" not in raw or "problems" not in raw or "strategies" not in raw:
        raise SuiteConfigError("suite config needs domain, problems, strategies")
    base = os.path.dirname(os.path.abspath(path))

    def resolve(name):
        return name if os.path.isabs(name) else os.path.join(base, name)

    config = SuiteConfig(
        domain_path=resolve(raw["domain"]),
        problem_paths=[resolve(p) for p in raw["problems"]],
        strategies=list(raw["strategies"]),
        oracle_path=resolve(raw["oracle"]) if raw.get("oracle") else None,
        prefs_path=resolve(raw["prefs"]) if raw.get("prefs") else None,
        carry_prefs=bool(raw.get("carry_prefs", True)),
        time_budget=float(raw.get("time_budget", 30.0)),
        seeds=[int(s) for s in raw.get("seeds", [0])],
        overrides=dict(raw.get("params", {})),
        out_dir=resolve(raw["out"]) if raw.get("out") else None,
    )
    validate_config(config)
    return config


def _problem_name(path: str) -> str:
    stem = os.path.basename(path)
    return stem[:-5] if stem.endswith(".prob") else stem


def _read(path: str) -> str:
    with open(path, encoding="utf-8") as handle:
        return handle.read()


def _fresh_store(strategy: str, config: SuiteConfig, domain: Domain) -> PreferenceStore:
    store = PreferenceStore()
    if strategy == UPFRONT and config.prefs_path is not None:
        for pref in load_upfront(config.prefs_path, domain):
            store.add(pref)
    return store


def _cell_expert(strategy: str, config: SuiteConfig, domain: Domain):
    if strategy in (ACTIVE, RANDOM) and config.oracle_path is not None:
        return ScriptedOracle.from_file(config.oracle_path, domain)
    return None


def _cell_params(config: SuiteConfig, seed: int) -> SearchParams:
    return replace(
        SearchParams(**config.overrides),
        rng_seed=seed,
        time_budget=config.time_budget,
    )


def _run_cell(
    domain: Domain,
    problem: Problem,
    name: str,
    strategy: str,
    seed: int,
    expert,
    store: PreferenceStore,
    params: SearchParams,
) -> dict:
    cell = {
        "problem": name,
        "strategy": strategy,
        "seed": seed,
        "solved": False,
        "plan_len": None,
        "queries": 0,
        "prefs": 0,
        "wall_ms": 0.0,
        "nodes": 0,
        "valid": None,
        "error": None,
        "usage": [],
        "max_depth": 0,
    }
    try:
        result = pg_search(domain, problem, expert, store, params, strategy)
    except Exception as exc:  # per-cell failures are recorded, not fatal
        cell["error"] = f"{type(exc).__name__}: {exc}"
        return cell
    stats = result.stats
    cell.update(
        solved=stats.solved,
        plan_len=stats.plan_len,
        queries=stats.queries_issued,
        prefs=stats.prefs_acquired,
        wall_ms=stats.wall_ms,
        nodes=stats.nodes_expanded,
        usage=list(stats.usage),
        max_depth=stats.max_depth,
    )
    if result.plan is not None:
        defects = validate_plan(domain, problem, result.plan)
        cell["valid"] = not defects
        if defects:
            cell["error"] = "; ".join(defects)
    elif result.reason is not None:
        cell["error"] = result.reason
    return cell


def depth_profile(logs: list[tuple[list[int], int]], bins: int = 10) -> list[float] | None:
    """Average cumulative usage against relative decomposition depth.

    Each log is one run: (depths of its usage records, deepest node the
    run reached). Depths normalize to [0, 1] by that maximum; the value
    at bin k is the fraction of the run's usage at or below depth ratio
    k/bins, averaged over runs. Runs without usage contribute nothing;
    no usage anywhere means no curve (None).
    """
    curves = []
    for depths, max_depth in logs:
        if not depths:
            continue
        scale = float(max_depth) if max_depth > 0 else 1.0
        ratios = [min(1.0, d / scale) for d in depths]
        total = len(ratios)
        curves.append([
            sum(1 for r in ratios if r <= k / bins) / total
            for k in range(1, bins + 1)
        ])
    if not curves:
        return None
    return [sum(curve[i] for curve in curves) / len(curves) for i in range(bins)]


def _influence_percent(usage: list) -> float | None:
    if not usage:
        return None
    influenced = sum(1 for record in usage if record.influenced)
    return 100.0 * influenced / len(usage)


def _learning_curve(names: list[str], per_seed_cells: list[list[dict]]) -> list[dict]:
    """Per problem, in suite order: cumulative queries (averaged over
    seeds) and percent of problems solved so far."""
    points = []
    for index, name in enumerate(names):
        queries = []
        solved = []
        for cells in per_seed_cells:
            queries.append(sum(c["queries"] for c in cells[: index + 1]))
            solved.append(sum(1 for c in cells[: index + 1] if c["solved"]))
        points.append({
            "problem": name,
            "queries": sum(queries) / len(queries),
            "percent_solved": 100.0 * sum(solved) / len(solved) / (index + 1),
        })
    return points


def run_suite(config: SuiteConfig) -> dict:
    """Run every (problem, strategy, seed) cell and aggregate the
    comparison. Plan-length statistics use only the problems every
    strategy solved in every seed."""
    validate_config(config)
    domain = parse_domain(_read(config.domain_path))
    names = [_problem_name(p) for p in config.problem_paths]
    notices: list[str] = []

    cells: list[dict] = []
    by_strategy: dict[str, list[list[dict]]] = {}
    for strategy in config.strategies:
        per_seed: list[list[dict]] = []
        for seed in config.seeds:
            store = _fresh_store(strategy, config, domain)
            seed_cells = []
            for path, name in zip(config.problem_paths, names):
                if not config.carry_prefs:
                    store = _fresh_store(strategy, config, domain)
                problem = parse_problem(_read(path), domain)
                cell = _run_cell(
                    domain, problem, name, strategy, seed,
                    _cell_expert(strategy, config, domain),
                    store, _cell_params(config, seed),
                )
                if cell["error"]:
                    notices.append(
                        f"cell {name}/{strategy}/seed {seed}: {cell['error']}"
                    )
                seed_cells.append(cell)
            per_seed.append(seed_cells)
        by_strategy[strategy] = per_seed
        for seed_cells in per_seed:
            cells.extend(seed_cells)

    commonly_solved = [
        name for index, name in enumerate(names)
        if all(
            per_seed[s][index]["solved"]
            for per_seed in by_strategy.values()
            for s in range(len(config.seeds))
        )
    ]
    common_set = set(commonly_solved)
    if not commonly_solved:
        notices.append("no problem was solved by every strategy; "
                       "plan-length comparison omitted")

    means: dict[str, float | None] = {}
    for strategy, per_seed in by_strategy.items():
        lengths = [
            cell["plan_len"]
            for seed_cells in per_seed
            for cell in seed_cells
            if cell["problem"] in common_set
        ]
        means[strategy] = sum(lengths) / len(lengths) if lengths else None
    finite_means = [m for m in means.values() if m is not None]
    longest = max(finite_means) if finite_means else None

    aggregates = {}
    for strategy, per_seed in by_strategy.items():
        flat = [cell for seed_cells in per_seed for cell in seed_cells]
        usage = [record for cell in flat for record in cell["usage"]]
        mean_len = means[strategy]
        if mean_len is None:
            ratio = None
        elif longest in (None, 0):
            ratio = 1.0  # all-zero averages compare equal
        else:
            ratio = mean_len / longest
        curve = depth_profile([
            ([record.depth for record in cell["usage"]], cell["max_depth"])
            for cell in flat
        ])
        if curve is None:
            notices.append(f"strategy '{strategy}' recorded no preference "
                           "usage; depth curve omitted")
        aggregates[strategy] = {
            "percent_solved": 100.0 * sum(1 for c in flat if c["solved"]) / len(flat),
            "mean_plan_len": mean_len,
            "plan_length_ratio": ratio,
            "queries": sum(c["queries"] for c in flat),
            "prefs_acquired": sum(c["prefs"] for c in flat),
            "usage_count": len(usage),
            "influence_percent": _influence_percent(usage),
            "learning_curve": _learning_curve(names, per_seed),
            "depth_curve": curve,
        }

    report_cells = [
        {key: cell[key] for key in (
            "problem", "strategy", "seed", "solved", "plan_len", "queries",
            "prefs", "wall_ms", "nodes", "valid", "error",
        )}
        for cell in cells
    ]
    return {
        "header": {
            "domain": domain.name,
            "time_budget_s": config.time_budget,
            "note": f"per-problem wall budget {config.time_budget:g} s (desk scale)",
            "strategies": list(config.strategies),
            "problems": names,
            "seeds": list(config.seeds),
            "carry_prefs": config.carry_prefs,
        },
        "cells": report_cells,
        "aggregates": aggregates,
        "commonly_solved": commonly_solved,
        "notices": notices,
    }


def kl_divergence(p: list[float], q: list[float], epsilon: float = 1e-9) -> float:
    """KL(p || q) with q smoothed by epsilon and renormalized. Terms
    with p = 0 contribute nothing; the result clamps at zero against
    rounding."""
    if not p:
        return 0.0
    smoothed = [value + epsilon for value in q]
    total = sum(smoothed)
    smoothed = [value / total for value in smoothed]
    divergence = sum(
        pi * math.log(pi / qi) for pi, qi in zip(p, smoothed) if pi > 0.0
    )
    return max(0.0, divergence)


def kl_diagnostic(
    domain: Domain,
    problem: Problem,
    store: PreferenceStore | None = None,
    params: SearchParams | None = None,
    max_nodes: int = 10_000,
) -> dict:
    """Compare the root policy against the exact-optimum distribution.

    The reference distribution weights each root candidate by the
    negated best achievable plan length when that candidate is fixed
    (exhaustive enumeration, capped at max_nodes configurations; dead
    candidates get weight zero). D_R is the divergence of the
    rollout-only policy from it, D_A the divergence of the
    preference-adjusted policy; a positive difference means the stored
    preferences moved the policy toward the optimum.
    """
    params = params or SearchParams()
    store = store or PreferenceStore()
    state = problem.initial_state
    if not problem.initial_tasks:
        return {"D_R": 0.0, "D_A": 0.0, "difference": 0.0}
    root, rest = problem.initial_tasks[0], problem.initial_tasks[1:]
    optima = []
    for method, binding in admissible_methods(state, root, domain):
        fixed = instantiate_subtasks(method, binding) + rest
        best = best_plan_length(domain, state, fixed, problem.goal, max_nodes)
        optima.append(DEAD_END if best is None else -float(best))
    optimal = boltzmann(optima, params.temperature)
    rollout = eval_node(state, root, domain, problem.goal, PreferenceStore(), params)
    adjusted = eval_node(state, root, domain, problem.goal, store, params)
    d_r = kl_divergence(optimal, [s.probability for s in rollout.scores])
    d_a = kl_divergence(optimal, [s.probability for s in adjusted.scores])
    return {"D_R": d_r, "D_A": d_a, "difference": d_r - d_a}


def replay_experiment(config: SuiteConfig, log_path: str | None = None) -> dict:
    """Active elicitation versus its own output replayed upfront.

    First pass runs the active strategy over the suite, accumulating
    elicited preferences; they are written to a log file and loaded back
    as the upfront store for the second pass over the same problems.
    Both passes report usage and influence so the two acquisition modes
    can be compared on identical trajectories.
    """
    validate_config(config)
    if config.oracle_path is None:
        raise SuiteConfigError("replay experiment needs an oracle file")
    domain = parse_domain(_read(config.domain_path))
    names = [_problem_name(p) for p in config.problem_paths]
    seed = config.seeds[0]
    if log_path is None:
        # never write next to the problem files; they may be package data
        base = config.out_dir or tempfile.mkdtemp(prefix="pgplan-replay-")
        os.makedirs(base, exist_ok=True)
        log_path = os.path.join(base, f"{domain.name}-elicited.prefs")

    def run_pass(strategy: str, store: PreferenceStore) -> list[dict]:
        out = []
        for path, name in zip(config.problem_paths, names):
            problem = parse_problem(_read(path), domain)
            out.append(_run_cell(
                domain, problem, name, strategy, seed,
                _cell_expert(strategy, config, domain),
                store, _cell_params(config, seed),
            ))
        return out

    active_store = PreferenceStore()
    active_cells = run_pass(ACTIVE, active_store)
    logged = log_elicited(active_store, log_path)

    replay_store = PreferenceStore()
    for pref in load_upfront(log_path, domain):
        replay_store.add(pref)
    replay_cells = run_pass(UPFRONT, replay_store)

    def side(cells: list[dict]) -> dict:
        usage = [record for cell in cells for record in cell["usage"]]
        solved = [c for c in cells if c["solved"]]
        return {
            "percent_solved": 100.0 * len(solved) / len(cells),
            "mean_plan_len": (
                sum(c["plan_len"] for c in solved) / len(solved) if solved else None
            ),
            "queries": sum(c["queries"] for c in cells),
            "usage_count": len(usage),
            "influence_percent": _influence_percent(usage),
        }

    return {
        "domain": domain.name,
        "problems": names,
        "seed": seed,
        "prefs_logged": logged,
        "log_path": log_path,
        "active": side(active_cells),
        "upfront_from_log": side(replay_cells),
    }


def _csv_value(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, float):
        return f"{value:.3f}"
    return str(value)


def emit(report: dict, format: str, out_dir: str) -> str:
    """Write the report in the named format; returns the file path."""
    os.makedirs(out_dir, exist_ok=True)
    if format == "json":
        path = os.path.join(out_dir, "report.json")
        with open(path, "w", encoding="utf-8") as handle:
            json.dump(report, handle, indent=2)
            handle.write("\n")
        return path
    if format == "csv":
        path = os.path.join(out_dir, "report.csv")
        with open(path, "w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle)
            writer.writerow(CSV_COLUMNS)
            for cell in report.get("cells", []):
                writer.writerow([_csv_value(cell[key]) for key in CSV_COLUMNS])
            writer.writerow([])
            writer.writerow(["# aggregates"])
            writer.writerow(AGGREGATE_COLUMNS)
            for strategy, agg in report.get("aggregates", {}).items():
                writer.writerow([strategy] + [
                    _csv_value(agg[key]) for key in AGGREGATE_COLUMNS[1:]
                ])
        return path
    raise ValueError(f"unknown report format '{format}'")
