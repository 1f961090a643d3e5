import csv
import json
import math

import pytest

from pgplan.bench import (
    AGGREGATE_COLUMNS,
    CSV_COLUMNS,
    SuiteConfig,
    depth_profile,
    emit,
    kl_diagnostic,
    kl_divergence,
    load_suite_config,
    replay_experiment,
    run_suite,
)
from pgplan.bruteforce import SpaceTooLargeError
from pgplan.errors import SuiteConfigError
from pgplan.fixtures import fixture_path, fixture_text
from pgplan.oracle import load_upfront
from pgplan.parser import parse_domain, parse_problem
from pgplan.preferences import PreferenceStore, parse_preference

# Two ways to finish the same task: one step or three. The exact
# reference distribution weights the methods by negated best plan
# length; the rollout sees costs 1 and 3 with the goal reached either
# way.
KL_DOMAIN = """
(defdomain kd (
  (:predicate P 1)
  (:predicate Q 1)
  (:operator (step ?x) ((P ?x)) () ((Q ?x)))
  (:method MGood (T) ((P A)) ((step A)))
  (:method MBad (T) ((P A)) ((step A) (step B) (step C)))
))
"""
KL_PROBLEM = "(defproblem kp kd ((P A) (P B) (P C)) ((T)) ((Q A)))"

ONE_METHOD_DOMAIN = """
(defdomain od (
  (:predicate P 1)
  (:predicate Q 1)
  (:operator (step ?x) ((P ?x)) () ((Q ?x)))
  (:method Only (T) ((P A)) ((step A)))
))
"""
ONE_METHOD_PROBLEM = "(defproblem op od ((P A)) ((T)) ((Q A)))"


def softmax(values):
    shift = max(values)
    weights = [math.exp(v - shift) for v in values]
    total = sum(weights)
    return [w / total for w in weights]


def plain_kl(p, q):
    return sum(pi * math.log(pi / qi) for pi, qi in zip(p, q) if pi > 0)


def small_config(**kwargs):
    base = dict(
        domain_path=fixture_path("blocksworld.dom"),
        problem_paths=[fixture_path("bw-01.prob"), fixture_path("bw-02.prob")],
        strategies=["none", "active"],
        oracle_path=fixture_path("blocksworld.oracle"),
        prefs_path=fixture_path("blocksworld.prefs"),
        time_budget=10.0,
        seeds=[0],
    )
    base.update(kwargs)
    return SuiteConfig(**base)


def strip_wall(report):
    clone = json.loads(json.dumps(report))
    for cell in clone["cells"]:
        cell.pop("wall_ms")
    return clone


# ---------------------------------------------------------------- depth


def test_depth_profile_all_usage_at_root_saturates():
    assert depth_profile([([0, 0, 0], 5)]) == [1.0] * 10


def test_depth_profile_uniform_usage_tracks_identity():
    curve = depth_profile([(list(range(1, 11)), 10)])
    assert curve == pytest.approx([k / 10 for k in range(1, 11)], abs=1e-12)


def test_depth_profile_averages_across_runs():
    curve = depth_profile([([0], 1), ([1], 1)])
    assert curve == pytest.approx([0.5] * 9 + [1.0], abs=1e-12)


def test_depth_profile_without_usage_is_omitted():
    assert depth_profile([]) is None
    assert depth_profile([([], 3)]) is None


def test_depth_profile_depth_zero_run_counts_as_root_usage():
    assert depth_profile([([0, 0], 0)]) == [1.0] * 10


# ------------------------------------------------------------------- kl


def test_kl_divergence_matches_plain_formula():
    p = [0.7, 0.2, 0.1]
    q = [0.5, 0.3, 0.2]
    assert kl_divergence(p, q) == pytest.approx(plain_kl(p, q), abs=1e-7)
    assert kl_divergence([], []) == 0.0
    assert kl_divergence([1.0, 0.0], [0.5, 0.5]) == pytest.approx(
        math.log(2.0), abs=1e-7
    )


def test_kl_diagnostic_matches_hand_softmax_references():
    domain = parse_domain(KL_DOMAIN)
    problem = parse_problem(KL_PROBLEM, domain)
    store = PreferenceStore()
    store.add(parse_preference("(pref G () (T) (:prefer MGood) (:avoid))", domain))
    out = kl_diagnostic(domain, problem, store)
    optimal = softmax([-1.0, -3.0])
    rollout = softmax([1.5, 1.25])  # 1/(1+0) + 1/(1+L) for L = 1, 3
    adjusted = softmax([2.5, 1.25])  # prefer MGood adds one to its score
    assert out["D_R"] == pytest.approx(plain_kl(optimal, rollout), abs=1e-6)
    assert out["D_A"] == pytest.approx(plain_kl(optimal, adjusted), abs=1e-6)
    assert out["difference"] == pytest.approx(
        plain_kl(optimal, rollout) - plain_kl(optimal, adjusted), abs=1e-6
    )
    # the preference points at the truly better method, so it helps
    assert out["difference"] > 0.0


def test_kl_empty_store_difference_is_exactly_zero(blocksworld, bw01):
    out = kl_diagnostic(blocksworld, bw01)
    assert out["difference"] == 0.0
    assert out["D_R"] == out["D_A"]
    assert out["D_R"] >= 0.0


def test_kl_single_method_root_is_degenerate():
    domain = parse_domain(ONE_METHOD_DOMAIN)
    problem = parse_problem(ONE_METHOD_PROBLEM, domain)
    out = kl_diagnostic(domain, problem)
    assert out == {"D_R": 0.0, "D_A": 0.0, "difference": 0.0}


def test_kl_respects_enumeration_budget(blocksworld, bw01):
    with pytest.raises(SpaceTooLargeError):
        kl_diagnostic(blocksworld, bw01, max_nodes=3)


def test_kl_divergences_are_nonnegative_with_fixture_prefs(blocksworld, bw01):
    store = PreferenceStore()
    for pref in load_upfront(fixture_path("blocksworld.prefs"), blocksworld):
        store.add(pref)
    out = kl_diagnostic(blocksworld, bw01, store)
    assert out["D_R"] >= 0.0
    assert out["D_A"] >= 0.0


# --------------------------------------------------------------- config


def test_load_bundled_suite_config():
    config = load_suite_config(fixture_path("blocksworld.suite.json"))
    assert len(config.problem_paths) == 12
    assert config.strategies == ["none", "random", "upfront", "active"]
    assert config.carry_prefs is True
    assert config.time_budget == 30.0
    assert config.seeds == [0]
    assert config.oracle_path and config.prefs_path


def write_config(tmp_path, body):
    path = tmp_path / "suite.json"
    path.write_text(body if isinstance(body, str) else json.dumps(body))
    return str(path)


def test_config_errors_fail_fast(tmp_path):
    domain = fixture_path("blocksworld.dom")
    problem = fixture_path("bw-01.prob")
    good = {"domain": domain, "problems": [problem], "strategies": ["none"]}
    assert load_suite_config(write_config(tmp_path, good)).strategies == ["none"]

    cases = [
        "not json at all",
        json.dumps(["a", "list"]),
        {**good, "bogus": 1},
        {"problems": [problem], "strategies": ["none"]},
        {**good, "problems": []},
        {**good, "strategies": []},
        {**good, "strategies": ["sideways"]},
        {**good, "strategies": ["active"]},  # no oracle given
        {**good, "strategies": ["upfront"]},  # no prefs given
        {**good, "seeds": []},
        {**good, "time_budget": 0},
        {**good, "params": {"rng_seed": 3}},
        {**good, "params": {"mystery_knob": 1}},
        {**good, "domain": str(tmp_path / "missing.dom")},
    ]
    for body in cases:
        with pytest.raises(SuiteConfigError):
            load_suite_config(write_config(tmp_path, body))


# ---------------------------------------------------------------- suite


def test_run_suite_small_grid():
    report = run_suite(small_config())
    cells = report["cells"]
    assert [(c["problem"], c["strategy"]) for c in cells] == [
        ("bw-01", "none"), ("bw-02", "none"),
        ("bw-01", "active"), ("bw-02", "active"),
    ]
    assert all(c["solved"] and c["valid"] and c["error"] is None for c in cells)
    assert cells[0]["plan_len"] == 2  # unguided bw-01 shoves F onto D
    assert all(c["queries"] == 0 for c in cells if c["strategy"] == "none")
    assert report["commonly_solved"] == ["bw-01", "bw-02"]

    none_agg = report["aggregates"]["none"]
    active_agg = report["aggregates"]["active"]
    assert none_agg["percent_solved"] == 100.0
    assert active_agg["percent_solved"] == 100.0
    assert active_agg["queries"] >= 1
    assert active_agg["usage_count"] > 0
    ratios = [a["plan_length_ratio"] for a in report["aggregates"].values()]
    assert max(ratios) == 1.0
    assert all(0 < r <= 1.0 for r in ratios)
    # no preferences ever apply without elicitation or loading
    assert none_agg["usage_count"] == 0
    assert none_agg["influence_percent"] is None
    assert none_agg["depth_curve"] is None
    assert any("'none'" in n for n in report["notices"])
    curve = [p["queries"] for p in active_agg["learning_curve"]]
    assert curve == sorted(curve)
    assert json.dumps(report)  # report is plain data


def test_run_suite_is_deterministic_modulo_wall_clock():
    config = small_config()
    first = strip_wall(run_suite(config))
    second = strip_wall(run_suite(config))
    assert json.dumps(first) == json.dumps(second)


def test_run_suite_entropy_threshold_override_silences_queries():
    report = run_suite(small_config(
        strategies=["active"], overrides={"entropy_threshold": 99.0}
    ))
    assert report["aggregates"]["active"]["queries"] == 0


def test_run_suite_upfront_uses_loaded_preferences_per_cell():
    report = run_suite(small_config(strategies=["upfront"], carry_prefs=False))
    agg = report["aggregates"]["upfront"]
    assert agg["queries"] == 0
    assert agg["usage_count"] > 0
    assert agg["depth_curve"] is not None
    assert len(agg["depth_curve"]) == 10


def test_run_suite_records_unsolvable_cells_without_aborting(tmp_path):
    # no fuel tokens, so the rocket can never reach the cargo
    problem = tmp_path / "stuck.prob"
    problem.write_text(
        "(defproblem stranded rockets"
        " ((Place L1) (Place L2) (Other L1 L2) (Other L2 L1)"
        "  (Rocket R1) (At R1 L1) (At c1 L2))"
        " ((Deliver c1 L1)) ((At c1 L1)))"
    )
    config = SuiteConfig(
        domain_path=fixture_path("rockets.dom"),
        problem_paths=[str(problem)],
        strategies=["none"],
        time_budget=10.0,
    )
    report = run_suite(config)
    cell = report["cells"][0]
    assert cell["solved"] is False and cell["error"] == "exhausted"
    assert report["aggregates"]["none"]["percent_solved"] == 0.0
    assert report["commonly_solved"] == []
    assert any("plan-length comparison omitted" in n for n in report["notices"])
    assert report["aggregates"]["none"]["mean_plan_len"] is None
    assert report["aggregates"]["none"]["plan_length_ratio"] is None


# ----------------------------------------------------------------- emit


def test_emit_json_round_trips(tmp_path):
    report = run_suite(small_config())
    path = emit(report, "json", str(tmp_path))
    with open(path, encoding="utf-8") as handle:
        assert json.load(handle) == json.loads(json.dumps(report))


def test_emit_csv_rows_and_aggregate_block(tmp_path):
    report = run_suite(small_config())
    path = emit(report, "csv", str(tmp_path))
    with open(path, newline="", encoding="utf-8") as handle:
        rows = list(csv.reader(handle))
    assert rows[0] == list(CSV_COLUMNS)
    assert len(rows[1:5]) == 4 and all(len(r) == len(CSV_COLUMNS) for r in rows[1:5])
    assert rows[5] == []
    assert rows[6] == ["# aggregates"]
    assert rows[7] == list(AGGREGATE_COLUMNS)
    assert [r[0] for r in rows[8:]] == ["none", "active"]


def test_emit_handles_empty_report(tmp_path):
    empty = {"header": {}, "cells": [], "aggregates": {},
             "commonly_solved": [], "notices": []}
    json_path = emit(empty, "json", str(tmp_path))
    csv_path = emit(empty, "csv", str(tmp_path))
    assert json.load(open(json_path)) == empty
    rows = list(csv.reader(open(csv_path, newline="")))
    assert rows[0] == list(CSV_COLUMNS)
    with pytest.raises(ValueError):
        emit(empty, "yaml", str(tmp_path))


# --------------------------------------------------------------- replay


def test_replay_experiment_round_trip(tmp_path):
    config = SuiteConfig(
        domain_path=fixture_path("blocksworld.dom"),
        problem_paths=[
            fixture_path("bw-01.prob"),
            fixture_path("bw-02.prob"),
            fixture_path("bw-03.prob"),
        ],
        strategies=["active"],
        oracle_path=fixture_path("blocksworld.oracle"),
        time_budget=10.0,
    )
    log_path = str(tmp_path / "elicited.prefs")
    out = replay_experiment(config, log_path=log_path)
    assert out["active"]["queries"] > 0
    assert out["upfront_from_log"]["queries"] == 0
    assert out["prefs_logged"] >= 1
    domain = parse_domain(fixture_text("blocksworld.dom"))
    assert len(load_upfront(log_path, domain)) == out["prefs_logged"]
    assert out["active"]["percent_solved"] == 100.0
    assert out["upfront_from_log"]["percent_solved"] == 100.0
    assert out["active"]["usage_count"] > 0
    assert out["upfront_from_log"]["usage_count"] > 0
