"""Independent plan checker.

Replays a plan against the domain's operator definitions and the
problem's initial state, then checks the goal. The grounding and
application logic here is deliberately written from scratch rather than
imported from the search machinery, so a planner bug cannot hide behind
a matching validator bug.
"""

from __future__ import annotations

from .model import Atom, Constant, Domain, Plan, Problem, Variable


def _ground(atom: Atom, assignment: dict[Variable, Constant]) -> Atom:
    args = []
    for term in atom.args:
        if isinstance(term, Variable):
            args.append(assignment[term])
        else:
            args.append(term)
    return Atom(atom.predicate, tuple(args))


def validate_plan(domain: Domain, problem: Problem, plan: Plan) -> list[str]:
    """Replay the plan; return a list of defects, empty when valid."""
    defects: list[str] = []
    facts = set(problem.initial_state.atoms)
    for index, step in enumerate(plan.steps):
        operator = domain.operators.get(step.operator)
        if operator is None:
            defects.append(f"step {index}: unknown operator '{step.operator}'")
            return defects
        if len(operator.params) != len(step.args):
            defects.append(
                f"step {index}: {step.operator} takes {len(operator.params)} "
                f"arguments, got {len(step.args)}"
            )
            return defects
        if not all(isinstance(a, Constant) for a in step.args):
            defects.append(f"step {index}: {step} is not ground")
            return defects
        assignment = dict(zip(operator.params, step.args))
        missing = [
            ground
            for pre in operator.preconditions
            if (ground := _ground(pre, assignment)) not in facts
        ]
        if missing:
            shown = ", ".join(str(a) for a in sorted(missing, key=str))
            defects.append(f"step {index}: {step} requires missing {shown}")
            return defects
        for atom in operator.delete_list:
            facts.discard(_ground(atom, assignment))
        for atom in operator.add_list:
            facts.add(_ground(atom, assignment))
    unmet = [atom for atom in problem.goal if atom not in facts]
    for atom in sorted(unmet, key=str):
        defects.append(f"goal atom {atom} does not hold in the final state")
    return defects
