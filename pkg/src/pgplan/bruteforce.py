"""Exhaustive decomposition enumeration for small problems.

This is the ground-truth counterpart to the guided search. A planning
configuration is (state, remaining task list); applying a primitive is
an edge of weight one, expanding a method is an edge of weight zero.
Zero-one breadth-first search over that graph yields the exact shortest
plan length, and reachability of a satisfied empty-frontier
configuration decides solvability.

Only suitable for tiny instances; the node budget guards against
explosion.
"""

from __future__ import annotations

from collections import deque

from .errors import GroundingConflictError, PgplanError, PreconditionFailureError
from .model import Domain, Problem, State, Task
from .semantics import (
    admissible_methods,
    apply_operator,
    goal_distance,
    instantiate_subtasks,
    primitive_binding,
)


class SpaceTooLargeError(PgplanError):
    """The enumeration exceeded its node budget."""


def best_plan_length(
    domain: Domain,
    state: State,
    tasks: tuple[Task, ...],
    goal: frozenset,
    max_nodes: int = 200_000,
) -> int | None:
    """Length of the shortest plan completing the tasks and reaching the
    goal, or None when no completion exists."""
    start_key = (state.atoms, tasks)
    dist: dict = {start_key: 0}
    queue: deque = deque([(0, state, tasks)])
    popped = 0
    while queue:
        d, current, frontier = queue.popleft()
        key = (current.atoms, frontier)
        if d > dist.get(key, d):
            continue  # stale entry superseded by a shorter route
        popped += 1
        if popped > max_nodes:
            raise SpaceTooLargeError(f"enumeration exceeded {max_nodes} configurations")
        if not frontier:
            if goal_distance(current, goal) == 0:
                return d  # zero-one BFS pops in nondecreasing distance
            continue
        task, rest = frontier[0], frontier[1:]
        if task.primitive:
            operator = domain.operators[task.name]
            try:
                nxt = apply_operator(
                    current, operator, primitive_binding(operator, task)
                )
            except (PreconditionFailureError, GroundingConflictError):
                continue
            nxt_key = (nxt.atoms, rest)
            if d + 1 < dist.get(nxt_key, d + 2):
                dist[nxt_key] = d + 1
                queue.append((d + 1, nxt, rest))
        else:
            for method, binding in admissible_methods(current, task, domain):
                subtasks = instantiate_subtasks(method, binding) + rest
                sub_key = (current.atoms, subtasks)
                if d < dist.get(sub_key, d + 1):
                    dist[sub_key] = d
                    queue.appendleft((d, current, subtasks))
    return None


def solvable(domain: Domain, problem: Problem, max_nodes: int = 200_000) -> bool:
    """Whether any decomposition of the initial tasks reaches the goal."""
    length = best_plan_length(
        domain, problem.initial_state, problem.initial_tasks, problem.goal, max_nodes
    )
    return length is not None
