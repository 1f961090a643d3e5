"""Frozen node-evaluation values for the bw-01 root.

The expected numbers below were derived by hand from the domain
definition before running the engine: each candidate's greedy lookahead
was traced on paper (budget 3, primitives free), giving the action
counts L, the goal distances D at the lookahead's end state, and the
scores 1/(1+D) + 1/(1+L) + A. They are frozen here; the engine has to
reproduce them.
"""

import math
import random

import pytest
from hypothesis import given, strategies as st

from pgplan.model import Variable
from pgplan.preferences import PreferenceStore, parse_preference
from pgplan.search import (
    SearchParams,
    boltzmann,
    entropy,
    eval_node,
    should_query,
)

INF = math.inf

# canonical candidate order at the bw-01 root: (method, x binding).
# Hand-traced lookaheads, budget 3:
#   ShoveOff[E]   shove E onto D, then the lookahead shuttles E between
#                 D and C (every option keeps distance 1, so the first
#                 candidate wins each tie) and the budget runs out with
#                 B still covered: L=4, D=1.
#   ShoveOff[F]   shove F onto D exposes A; put A on the table clears B
#                 (no shove target is open, every table block is now
#                 covered): L=2, D=0.
#   PutOnTable[E] E to the table opens C, so the lookahead shoves F onto
#                 C and then shoves A onto D, clearing B: L=3, D=0.
#   PutOnTable[F] F to the table exposes A; shove A onto D clears B:
#                 L=2, D=0.
#   StackonD[E]   three moves park E on D, then the shuttle again eats
#                 the budget: L=6, D=1.
#   StackonD[F]   three moves park F on D, covering D kills further
#                 shoves; put A on the table clears B: L=4, D=0.
#   StackonE[E]   picking E deletes Clear E, so stacking E on itself
#                 fails: dead end.
#   StackonE[F]   three moves park F on E; put A on the table: L=4, D=0.
EXPECTED_IDS = [
    "ShoveOff", "ShoveOff",
    "PutOnTable", "PutOnTable",
    "StackonD", "StackonD",
    "StackonE", "StackonE",
]
EXPECTED_X = ["E", "F", "E", "F", "E", "F", "E", "F"]
EXPECTED_L = [4.0, 2.0, 3.0, 2.0, 6.0, 4.0, INF, 4.0]
EXPECTED_D = [1, 0, 0, 0, 1, 0, 1, 0]
EXPECTED_SCORES = [
    1 / 2 + 1 / 5,
    1 + 1 / 3,
    1.25,
    1 + 1 / 3,
    1 / 2 + 1 / 7,
    1.2,
    -INF,
    1.2,
]
DEAD_INDEX = 6

# with the lookahead disabled (budget 0) only the leading primitive
# prefix of each candidate runs
EXPECTED_L_D0 = [1.0, 1.0, 1.0, 1.0, 3.0, 3.0, INF, 3.0]
EXPECTED_GD_D0 = [1, 1, 1, 1, 1, 1, 1, 1]


def reference_probs(scores):
    """Direct softmax, no shift; safe for these small magnitudes."""
    weights = [0.0 if s == -INF else math.exp(s) for s in scores]
    total = sum(weights)
    return [w / total for w in weights]


def reference_entropy(probs):
    return sum(p * math.log(1.0 / p) for p in probs if p > 0.0)


def root_policy(domain, problem, store=None, **kwargs):
    params = SearchParams(**kwargs)
    return eval_node(
        problem.initial_state,
        problem.initial_tasks[0],
        domain,
        problem.goal,
        store or PreferenceStore(),
        params,
    )


def test_root_rollout_costs_and_distances(blocksworld, bw01):
    policy = root_policy(blocksworld, bw01)
    assert [s.method_id for s in policy.scores] == EXPECTED_IDS
    assert [s.binding[Variable("x")].name for s in policy.scores] == EXPECTED_X
    assert [s.rollout_cost for s in policy.scores] == EXPECTED_L
    assert [s.goal_distance for s in policy.scores] == EXPECTED_D


def test_root_scores_match_hand_computation(blocksworld, bw01):
    policy = root_policy(blocksworld, bw01)
    for got, want in zip([s.score for s in policy.scores], EXPECTED_SCORES):
        if want == -INF:
            assert got == -INF
        else:
            assert got == pytest.approx(want, abs=1e-12)


def test_root_probabilities_match_direct_softmax(blocksworld, bw01):
    policy = root_policy(blocksworld, bw01)
    expected = reference_probs(EXPECTED_SCORES)
    for got, want in zip([s.probability for s in policy.scores], expected):
        assert got == pytest.approx(want, abs=1e-9)
    assert policy.scores[DEAD_INDEX].probability == 0.0
    assert sum(s.probability for s in policy.scores) == pytest.approx(1.0, abs=1e-12)


def test_root_entropy_matches_direct_formula(blocksworld, bw01):
    policy = root_policy(blocksworld, bw01)
    assert policy.entropy == pytest.approx(
        reference_entropy(reference_probs(EXPECTED_SCORES)), abs=1e-12
    )
    assert policy.entropy > 0.5  # the root is genuinely uncertain


def test_zero_budget_rollout_runs_only_primitive_prefix(blocksworld, bw01):
    policy = root_policy(blocksworld, bw01, rollout_depth=0)
    assert [s.rollout_cost for s in policy.scores] == EXPECTED_L_D0
    assert [s.goal_distance for s in policy.scores] == EXPECTED_GD_D0


def test_adherence_shifts_scores_additively(blocksworld, bw01):
    store = PreferenceStore()
    store.add(
        parse_preference(
            "(pref TableNotE ((Space Table)) (Clear ?b)"
            " (:prefer PutOnTable) (:avoid StackonE))",
            blocksworld,
        )
    )
    policy = root_policy(blocksworld, bw01, store=store)
    assert [s.adherence for s in policy.scores] == [0, 0, 1, 1, 0, 0, -1, -1]
    shifts = [0, 0, 1, 1, 0, 0, -1, -1]
    expected = [
        EXPECTED_SCORES[i] + shifts[i] if EXPECTED_SCORES[i] != -INF else -INF
        for i in range(len(EXPECTED_SCORES))
    ]
    for got, want in zip([s.score for s in policy.scores], expected):
        if want == -INF:
            assert got == -INF
        else:
            assert got == pytest.approx(want, abs=1e-12)
    # the preferred table move is now the clear argmax
    best = max(policy.scores, key=lambda s: s.score)
    assert best.method_id == "PutOnTable"


def test_entropy_drops_after_decisive_preference(blocksworld, bw01):
    before = root_policy(blocksworld, bw01).entropy
    store = PreferenceStore()
    store.add(
        parse_preference(
            "(pref Decisive ((Space Table)) (Clear ?b)"
            " (:prefer PutOnTable) (:avoid StackonD StackonE))",
            blocksworld,
        )
    )
    after = root_policy(blocksworld, bw01, store=store).entropy
    assert after < before


def test_should_query_gates():
    import types

    policy = types.SimpleNamespace(entropy=0.9)
    params = SearchParams(entropy_threshold=0.5)
    rng = random.Random(0)
    assert should_query(policy, params, "active", rng) is True
    policy.entropy = 0.5
    assert should_query(policy, params, "active", rng) is False  # strict >
    assert should_query(policy, params, "upfront", rng) is False
    assert should_query(policy, params, "none", rng) is False


def test_random_strategy_is_seeded_bernoulli():
    import types

    policy = types.SimpleNamespace(entropy=0.0)
    params = SearchParams(random_query_prob=0.3)
    draws = [
        should_query(policy, params, "random", random.Random(7)) for _ in range(3)
    ]
    assert draws[0] is draws[1] is draws[2]
    reference = random.Random(7).random() < 0.3
    assert draws[0] is reference


def test_boltzmann_edge_cases():
    assert boltzmann([]) == []
    assert boltzmann([2.5]) == [1.0]
    assert boltzmann([-INF, -INF]) == [0.5, 0.5]
    uniform = boltzmann([1.0, 1.0, 1.0, 1.0])
    assert uniform == pytest.approx([0.25] * 4, abs=1e-12)
    assert entropy(uniform) == pytest.approx(math.log(4), abs=1e-12)
    assert entropy([1.0]) == 0.0
    assert entropy([0.5, 0.5], base=2.0) == pytest.approx(1.0, abs=1e-12)


def test_temperature_flattens_distribution():
    sharp = boltzmann([1.0, 0.0], temperature=0.25)
    flat = boltzmann([1.0, 0.0], temperature=4.0)
    assert sharp[0] > flat[0] > 0.5


finite_scores = st.lists(
    st.floats(min_value=-50, max_value=50, allow_nan=False), min_size=1, max_size=8
)


@given(finite_scores)
def test_boltzmann_is_a_distribution(scores):
    probs = boltzmann(scores)
    assert all(p >= 0 for p in probs)
    assert sum(probs) == pytest.approx(1.0, abs=1e-9)


@given(finite_scores, st.floats(min_value=-100, max_value=100, allow_nan=False))
def test_boltzmann_shift_invariance(scores, shift):
    base = boltzmann(scores)
    shifted = boltzmann([s + shift for s in scores])
    for a, b in zip(base, shifted):
        assert abs(a - b) <= 1e-9


@given(finite_scores)
def test_entropy_bounds(scores):
    probs = boltzmann(scores)
    h = entropy(probs)
    assert -1e-12 <= h <= math.log(len(probs)) + 1e-9
