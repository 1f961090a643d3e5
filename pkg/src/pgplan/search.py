"""Interactive decomposition search.

At every non-primitive node the planner scores each admissible method by
a short greedy rollout (estimated cost to go), the goal distance at the
rollout's end state, and adherence to the acquired preferences. Scores
feed a Boltzmann policy; when the policy's entropy is high the planner
may pose a query to the expert, fold the answer into the store, and
rescore. Methods are then explored in descending probability with
chronological backtracking.
"""

from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass, field, replace

from .errors import (
    GroundingConflictError,
    PreconditionFailureError,
)
from .model import (
    Binding,
    Domain,
    Method,
    Plan,
    PlanStep,
    Problem,
    State,
    Task,
    TaskNetwork,
)
from .preferences import (
    ELICITED,
    Preference,
    PreferenceStore,
    adherence,
    record_usage,
)
from .semantics import (
    admissible_methods,
    apply_operator,
    goal_distance,
    instantiate_subtasks,
    primitive_binding,
    state_fingerprint,
)

ACTIVE = "active"
UPFRONT = "upfront"
RANDOM = "random"
NONE = "none"
STRATEGIES = (ACTIVE, UPFRONT, RANDOM, NONE)

TIMEOUT = "timeout"
EXHAUSTED = "exhausted"
DEPTH_CAP = "depth_cap"

DEAD_END = float("-inf")


@dataclass
class SearchParams:
    """Knobs for one planning run. Defaults suit interactive use."""

    rollout_depth: int = 3
    entropy_threshold: float = 0.5
    temperature: float = 1.0
    max_decomposition_depth: int = 200
    time_budget: float = 600.0
    rng_seed: int = 0
    random_query_prob: float = 0.1
    max_queries: int | None = None
    entropy_base: float | None = None  # None means natural log
    sample_methods: bool = False


@dataclass
class MethodScore:
    """One candidate's evaluation at a node."""

    method_id: str
    binding: Binding
    rollout_cost: float  # inf when the rollout hit a dead end
    goal_distance: int
    adherence: int
    score: float  # -inf when the rollout hit a dead end
    probability: float = 0.0


@dataclass
class NodePolicy:
    node: int
    task: Task
    depth: int
    scores: list[MethodScore]
    entropy: float


@dataclass
class Query:
    """What the expert sees when the planner asks for guidance."""

    state: State
    task: Task
    node: int
    depth: int
    candidates: list[MethodScore]


@dataclass
class RunStats:
    solved: bool = False
    plan_len: int | None = None
    wall_ms: float = 0.0
    nodes_expanded: int = 0
    backtracks: int = 0
    queries_issued: int = 0
    prefs_acquired: int = 0
    max_depth: int = 0
    usage: list = field(default_factory=list)


@dataclass
class SearchResult:
    plan: Plan | None
    reason: str | None  # None when solved, else timeout/exhausted/depth_cap
    stats: RunStats
    network: TaskNetwork


class SearchObserver:
    """Callback hooks; every method is optional to override."""

    def node_expanded(self, node: int, task: Task, depth: int, state: State,
                      plan: tuple[PlanStep, ...], frontier_size: int) -> None:
        pass

    def node_evaluated(self, record: dict) -> None:
        pass

    def step_applied(self, node: int, step: PlanStep, state: State,
                     plan: tuple[PlanStep, ...]) -> None:
        pass

    def query_posed(self, query: Query) -> None:
        pass

    def response_received(self, node: int, preference: Preference | None) -> None:
        pass

    def finished(self, result: SearchResult) -> None:
        pass


def boltzmann(scores: list[float], temperature: float = 1.0) -> list[float]:
    """Softmax over scores with max-shift for numeric safety.

    Dead ends (-inf) get probability zero. If every score is -inf the
    distribution is uniform, since the node fails either way.
    """
    if not scores:
        return []
    finite = [s for s in scores if s != DEAD_END]
    if not finite:
        return [1.0 / len(scores)] * len(scores)
    shift = max(finite)
    weights = [
        math.exp((s - shift) / temperature) if s != DEAD_END else 0.0
        for s in scores
    ]
    total = sum(weights)
    return [w / total for w in weights]


def entropy(probabilities: list[float], base: float | None = None) -> float:
    """Shannon entropy, natural log unless a base is given. Terms with
    probability zero contribute nothing."""
    h = sum(-p * math.log(p) for p in probabilities if p > 0.0)
    if base is not None:
        h /= math.log(base)
    return h


@dataclass
class _Candidate:
    """Per-method evaluation cached across a query within one node visit."""

    method: Method
    binding: Binding
    subtasks: tuple[Task, ...]
    rollout_cost: float
    goal_dist: int


def _apply_primitive(state: State, task: Task, domain: Domain) -> State:
    operator = domain.operators[task.name]
    binding = primitive_binding(operator, task)
    return apply_operator(state, operator, binding)


def _rollout_prefix_distance(
    state: State, subtasks: tuple[Task, ...], domain: Domain,
    goal: frozenset,
) -> float:
    """Goal distance after applying a candidate's leading primitive
    subtasks; inf when that prefix fails. Greedy lookahead ranks
    candidates by this."""
    current = state
    for sub in subtasks:
        if not sub.primitive:
            break
        try:
            current = _apply_primitive(current, sub, domain)
        except (PreconditionFailureError, GroundingConflictError):
            return math.inf
    return float(goal_distance(current, goal))


def simulate_rollout(
    state: State,
    tasks: tuple[Task, ...],
    domain: Domain,
    goal: frozenset,
    expansion_budget: int,
) -> tuple[float, State]:
    """Greedy lookahead: execute the tasks, spending the budget on
    method expansions; primitive steps are free.

    Returns (actions applied, end state). The cost is inf when a
    primitive fails or a task has no admissible method; the lookahead
    simply stops once the budget would be exceeded, so a budget of zero
    means no non-primitive task gets expanded.
    """
    queue = list(tasks)
    current = state
    cost = 0.0
    budget = expansion_budget
    while queue:
        task = queue.pop(0)
        if task.primitive:
            try:
                current = _apply_primitive(current, task, domain)
            except (PreconditionFailureError, GroundingConflictError):
                return math.inf, current
            cost += 1.0
            continue
        if budget <= 0:
            break
        budget -= 1
        options = admissible_methods(current, task, domain)
        if not options:
            return math.inf, current
        best = None
        best_key = None
        for index, (method, binding) in enumerate(options):
            subtasks = instantiate_subtasks(method, binding)
            key = (_rollout_prefix_distance(current, subtasks, domain, goal), index)
            if best_key is None or key < best_key:
                best_key = key
                best = subtasks
        queue = list(best) + queue
    return cost, current


def evaluate_candidates(
    state: State,
    task: Task,
    domain: Domain,
    goal: frozenset,
    params: SearchParams,
) -> list[_Candidate]:
    """Rollout every admissible method once; preference-independent."""
    out = []
    for method, binding in admissible_methods(state, task, domain):
        subtasks = instantiate_subtasks(method, binding)
        cost, end_state = simulate_rollout(
            state, subtasks, domain, goal, params.rollout_depth
        )
        out.append(
            _Candidate(method, binding, subtasks, cost, goal_distance(end_state, goal))
        )
    return out


def score_method(rollout_cost: float, goal_dist: int, adh: int) -> float:
    """Candidate desirability: closeness to the goal plus cheapness of
    the rollout plus preference adherence. Dead ends score -inf."""
    if math.isinf(rollout_cost):
        return DEAD_END
    return 1.0 / (1.0 + goal_dist) + 1.0 / (1.0 + rollout_cost) + float(adh)


def build_policy(
    node: int,
    task: Task,
    depth: int,
    candidates: list[_Candidate],
    applicable: list[Preference],
    params: SearchParams,
) -> NodePolicy:
    scores = []
    for cand in candidates:
        adh = adherence(cand.method.id, applicable)
        scores.append(
            MethodScore(
                method_id=cand.method.id,
                binding=cand.binding,
                rollout_cost=cand.rollout_cost,
                goal_distance=cand.goal_dist,
                adherence=adh,
                score=score_method(cand.rollout_cost, cand.goal_dist, adh),
            )
        )
    probs = boltzmann([s.score for s in scores], params.temperature)
    for ms, p in zip(scores, probs):
        ms.probability = p
    return NodePolicy(
        node=node,
        task=task,
        depth=depth,
        scores=scores,
        entropy=entropy(probs, params.entropy_base),
    )


def eval_node(
    state: State,
    task: Task,
    domain: Domain,
    goal: frozenset,
    store: PreferenceStore,
    params: SearchParams,
    node: int = 0,
    depth: int = 0,
) -> NodePolicy:
    """Score one decomposition node as the search would."""
    candidates = evaluate_candidates(state, task, domain, goal, params)
    applicable = store.applicable(state, task)
    return build_policy(node, task, depth, candidates, applicable, params)


def should_query(
    policy: NodePolicy,
    params: SearchParams,
    strategy: str,
    rng: random.Random,
) -> bool:
    """Query gate. Active asks when entropy exceeds the threshold;
    random flips a seeded coin regardless of entropy; upfront and none
    never ask."""
    if strategy == ACTIVE:
        return policy.entropy > params.entropy_threshold
    if strategy == RANDOM:
        return rng.random() < params.random_query_prob
    return False


def _argmax_index(scores: list[float]) -> int:
    best = 0
    for i in range(1, len(scores)):
        if scores[i] > scores[best]:
            best = i
    return best


def _pref_contribution(pref: Preference, method_id: str) -> int:
    plus = 1 if method_id in pref.preferred else 0
    minus = 1 if method_id in pref.non_preferred else 0
    return plus - minus


def _influences(policy: NodePolicy, pref: Preference) -> bool:
    """Would removing this preference change the node's argmax?"""
    with_scores = [s.score for s in policy.scores]
    without = []
    for ms in policy.scores:
        if ms.score == DEAD_END:
            without.append(ms.score)
        else:
            without.append(ms.score - _pref_contribution(pref, ms.method_id))
    return _argmax_index(with_scores) != _argmax_index(without)


def _exploration_order(
    policy: NodePolicy, params: SearchParams, rng: random.Random
) -> list[int]:
    """Candidate indices, most probable first; ties break on canonical
    order. With sample_methods the live candidates are instead drawn
    without replacement proportionally to probability."""
    indices = list(range(len(policy.scores)))
    if not params.sample_methods:
        return sorted(indices, key=lambda i: (-policy.scores[i].probability, i))
    live = [i for i in indices if policy.scores[i].score != DEAD_END]
    dead = [i for i in indices if policy.scores[i].score == DEAD_END]
    order = []
    weights = {i: policy.scores[i].probability for i in live}
    while live:
        total = sum(weights[i] for i in live)
        if total <= 0.0:
            order.extend(live)
            break
        pick = rng.random() * total
        acc = 0.0
        chosen = live[-1]
        for i in live:
            acc += weights[i]
            if pick <= acc:
                chosen = i
                break
        order.append(chosen)
        live.remove(chosen)
    return order + dead


def _trace_number(value: float) -> float | None:
    return None if math.isinf(value) else value


def _node_record(
    policy: NodePolicy, state: State, queried: bool, chosen: str | None
) -> dict:
    return {
        "node": policy.node,
        "depth": policy.depth,
        "state": state_fingerprint(state),
        "task": str(policy.task),
        "methods": [
            {
                "id": ms.method_id,
                "L": _trace_number(ms.rollout_cost),
                "D": ms.goal_distance,
                "A": ms.adherence,
                "score": _trace_number(ms.score),
                "p": ms.probability,
            }
            for ms in policy.scores
        ],
        "entropy": policy.entropy,
        "queried": queried,
        "chosen": chosen,
    }


@dataclass
class _ChoicePoint:
    state: State
    frontier: tuple
    plan: tuple[PlanStep, ...]
    node: int
    depth: int
    ordered: list[_Candidate]
    next_index: int


class Expert:
    """Answer protocol: return a Preference or None to decline."""

    def answer(self, query: Query) -> Preference | None:
        raise NotImplementedError


def pg_search(
    domain: Domain,
    problem: Problem,
    expert: Expert | None,
    store: PreferenceStore,
    params: SearchParams,
    strategy: str = NONE,
    observer: SearchObserver | None = None,
) -> SearchResult:
    """Solve one problem, interacting with the expert per the strategy.

    A plan is accepted only when the frontier is empty and the goal
    atoms all hold; otherwise the search backtracks through remaining
    method choices. Returns the first accepted plan.
    """
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy '{strategy}'")
    observer = observer or SearchObserver()
    rng = random.Random(params.rng_seed)
    network = TaskNetwork()
    stats = RunStats()
    usage_start = len(store.usage)
    started = time.monotonic()
    deadline = started + params.time_budget
    cap_hit = False
    reason: str | None = None
    plan_found: Plan | None = None

    state = problem.initial_state
    frontier = tuple((t, network.add(t), 0) for t in problem.initial_tasks)
    plan: tuple[PlanStep, ...] = ()
    stack: list[_ChoicePoint] = []

    def enter_candidate(point: _ChoicePoint) -> tuple[State, tuple, tuple]:
        cand = point.ordered[point.next_index]
        subtasks = tuple(
            (sub, network.add(sub, point.node, cand.method.id), point.depth + 1)
            for sub in cand.subtasks
        )
        return point.state, subtasks + point.frontier[1:], point.plan

    def backtrack() -> bool:
        nonlocal state, frontier, plan
        stats.backtracks += 1
        while stack:
            point = stack[-1]
            point.next_index += 1
            if point.next_index < len(point.ordered):
                state, frontier, plan = enter_candidate(point)
                return True
            stack.pop()
        return False

    while True:
        if time.monotonic() > deadline:
            reason = TIMEOUT
            break
        if not frontier:
            if goal_distance(state, problem.goal) == 0:
                plan_found = Plan(plan)
                break
            if not backtrack():
                reason = DEPTH_CAP if cap_hit else EXHAUSTED
                break
            continue

        task, node, depth = frontier[0]
        stats.nodes_expanded += 1
        stats.max_depth = max(stats.max_depth, depth)
        observer.node_expanded(node, task, depth, state, plan, len(frontier))

        if task.primitive:
            try:
                state = _apply_primitive(state, task, domain)
            except (PreconditionFailureError, GroundingConflictError):
                if not backtrack():
                    reason = DEPTH_CAP if cap_hit else EXHAUSTED
                    break
                continue
            step = PlanStep(task.name, task.args)  # type: ignore[arg-type]
            plan = plan + (step,)
            frontier = frontier[1:]
            observer.step_applied(node, step, state, plan)
            continue

        if depth >= params.max_decomposition_depth:
            cap_hit = True
            if not backtrack():
                reason = DEPTH_CAP
                break
            continue

        candidates = evaluate_candidates(state, task, domain, problem.goal, params)
        if not candidates:
            empty = NodePolicy(node, task, depth, [], 0.0)
            observer.node_evaluated(_node_record(empty, state, False, None))
            if not backtrack():
                reason = DEPTH_CAP if cap_hit else EXHAUSTED
                break
            continue

        applicable = store.applicable(state, task)
        policy = build_policy(node, task, depth, candidates, applicable, params)

        queried = False
        budget_open = (
            params.max_queries is None or stats.queries_issued < params.max_queries
        )
        if expert is not None and budget_open and should_query(
            policy, params, strategy, rng
        ):
            queried = True
            stats.queries_issued += 1
            query = Query(state, task, node, depth, list(policy.scores))
            observer.query_posed(query)
            answer = expert.answer(query)
            observer.response_received(node, answer)
            if answer is not None:
                adopted = replace(answer, origin=ELICITED, depth=depth)
                if store.add(adopted):
                    stats.prefs_acquired += 1
                applicable = store.applicable(state, task)
                policy = build_policy(node, task, depth, candidates, applicable, params)

        for pref in applicable:
            record_usage(store, pref.id, depth, _influences(policy, pref))

        order = _exploration_order(policy, params, rng)
        ordered = [candidates[i] for i in order]
        chosen = ordered[0].method.id
        observer.node_evaluated(_node_record(policy, state, queried, chosen))

        point = _ChoicePoint(state, frontier, plan, node, depth, ordered, 0)
        stack.append(point)
        state, frontier, plan = enter_candidate(point)

    stats.wall_ms = (time.monotonic() - started) * 1000.0
    stats.usage = list(store.usage[usage_start:])
    if plan_found is not None:
        stats.solved = True
        stats.plan_len = len(plan_found)
    result = SearchResult(plan_found, None if plan_found else reason, stats, network)
    observer.finished(result)
    return result
