"""Matching, admissibility, and state transition semantics.

All matching is against ground states, so substitutions only ever bind
variables to constants. Wherever several matches exist they are
enumerated in canonical order: method declaration order first, then
lexicographic order of the bindings (variables sorted by name, compared
by the constants they map to).
"""

from __future__ import annotations

import hashlib

from .errors import GroundingConflictError, PreconditionFailureError, UnboundVariableError
from .model import (
    Atom,
    Binding,
    Constant,
    Domain,
    Method,
    Operator,
    State,
    Task,
    Term,
    Variable,
    atom_sort_key,
)


def substitute_term(term: Term, binding: Binding) -> Term:
    if isinstance(term, Variable):
        return binding.get(term, term)
    return term


def substitute_atom(atom: Atom, binding: Binding) -> Atom:
    return Atom(atom.predicate, tuple(substitute_term(t, binding) for t in atom.args))


def substitute_task(task: Task, binding: Binding) -> Task:
    return Task(
        task.name,
        tuple(substitute_term(t, binding) for t in task.args),
        task.primitive,
    )


def unify_atom(pattern: Atom, fact: Atom, binding: Binding) -> Binding | None:
    """Extend ``binding`` so that ``pattern`` equals the ground ``fact``.

    Returns the extended binding, or None when they cannot match.
    """
    if pattern.predicate != fact.predicate or pattern.arity != fact.arity:
        return None
    extended = dict(binding)
    for pat_term, fact_term in zip(pattern.args, fact.args):
        if isinstance(pat_term, Constant):
            if pat_term != fact_term:
                return None
        else:
            bound = extended.get(pat_term)
            if bound is None:
                extended[pat_term] = fact_term  # type: ignore[assignment]
            elif bound != fact_term:
                return None
    return extended


def match_conjunction(
    conditions: tuple[Atom, ...], state: State, binding: Binding | None = None
) -> list[Binding]:
    """All substitutions under which every condition is in the state.

    Solutions come out in canonical order: state atoms are tried in
    sorted order at each position. An empty conjunction matches once.
    """
    solutions: list[Binding] = []

    def extend(index: int, current: Binding) -> None:
        if index == len(conditions):
            solutions.append(current)
            return
        pattern = substitute_atom(conditions[index], current)
        if pattern.is_ground():
            if pattern in state:
                extend(index + 1, current)
            return
        for fact in state.by_predicate(pattern.predicate):
            extended = unify_atom(pattern, fact, current)
            if extended is not None:
                extend(index + 1, extended)

    extend(0, dict(binding or {}))
    return solutions


def binding_sort_key(binding: Binding) -> tuple:
    """Lexicographic key over bindings with variables sorted by name."""
    return tuple(
        (var.name, binding[var].name)
        for var in sorted(binding, key=lambda v: v.name)
    )


def unify_task_head(method: Method, task: Task) -> Binding | None:
    """Bind the method's head parameters against a ground task."""
    if method.task != task.name or len(method.params) != len(task.args):
        return None
    binding: Binding = {}
    for param, arg in zip(method.params, task.args):
        if not isinstance(arg, Constant):
            raise UnboundVariableError(f"task {task} is not ground")
        if param in binding and binding[param] != arg:
            return None
        binding[param] = arg
    return binding


def admissible_methods(
    state: State, task: Task, domain: Domain
) -> list[tuple[Method, Binding]]:
    """Every (method, binding) admissible for the task in the state.

    A method qualifies when its head unifies with the task and its
    admissibility conjunction matches the state under that unifier.
    Results follow canonical order, so two calls with equal arguments
    return identical lists.
    """
    if task.primitive:
        raise ValueError(f"primitive task {task} is decomposed by its operator")
    out: list[tuple[Method, Binding]] = []
    for method in domain.methods_for(task.name):
        head_binding = unify_task_head(method, task)
        if head_binding is None:
            continue
        matches = match_conjunction(method.admissibility, state, head_binding)
        matches.sort(key=binding_sort_key)
        out.extend((method, m) for m in matches)
    return out


def instantiate_subtasks(method: Method, binding: Binding) -> tuple[Task, ...]:
    """Ground the method's subtasks; the match must have bound every variable."""
    subtasks = tuple(substitute_task(t, binding) for t in method.subtasks)
    for sub in subtasks:
        if not sub.is_ground():
            raise UnboundVariableError(
                f"subtask {sub} of method '{method.id}' left unbound variables"
            )
    return subtasks


def apply_operator(state: State, operator: Operator, binding: Binding) -> State:
    """Apply a ground operator instance: delete first, then add.

    Raises PreconditionFailureError if any grounded precondition is
    absent, UnboundVariableError if the binding misses a parameter, and
    GroundingConflictError if grounding makes add and delete overlap.
    """
    for param in operator.params:
        if param not in binding:
            raise UnboundVariableError(
                f"operator '{operator.name}' parameter {param} is unbound"
            )
    preconditions = [substitute_atom(a, binding) for a in operator.preconditions]
    missing = tuple(
        sorted((a for a in preconditions if a not in state), key=atom_sort_key)
    )
    if missing:
        raise PreconditionFailureError(operator.name, missing)
    delete = frozenset(substitute_atom(a, binding) for a in operator.delete_list)
    add = frozenset(substitute_atom(a, binding) for a in operator.add_list)
    conflict = delete & add
    if conflict:
        sample = sorted(conflict, key=atom_sort_key)[0]
        raise GroundingConflictError(
            f"operator '{operator.name}' grounds {sample} into both add and delete"
        )
    return state.with_changes(delete, add)


def primitive_binding(operator: Operator, task: Task) -> Binding:
    """Binding from a ground primitive task occurrence to its operator."""
    if len(operator.params) != len(task.args):
        raise UnboundVariableError(
            f"task {task} does not match operator '{operator.name}' parameters"
        )
    binding: Binding = {}
    for param, arg in zip(operator.params, task.args):
        if not isinstance(arg, Constant):
            raise UnboundVariableError(f"task {task} is not ground")
        binding[param] = arg
    return binding


def goal_distance(state: State, goal: frozenset[Atom]) -> int:
    """Number of goal atoms the state does not yet satisfy."""
    return len(goal - state.atoms)


def state_fingerprint(state: State) -> str:
    """Stable short hash of a state, for traces and memo keys."""
    text = " ".join(str(a) for a in state.sorted_atoms())
    return hashlib.sha1(text.encode("utf-8")).hexdigest()[:12]
