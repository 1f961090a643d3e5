import pytest

from pgplan.errors import (
    GroundingConflictError,
    PreconditionFailureError,
    UnboundVariableError,
)
from pgplan.model import Atom, Constant, State, Task, Variable
from pgplan.semantics import (
    admissible_methods,
    apply_operator,
    goal_distance,
    instantiate_subtasks,
    match_conjunction,
    primitive_binding,
    state_fingerprint,
    substitute_atom,
    unify_atom,
)


def A(name):
    return Constant(name)


def V(name):
    return Variable(name)


def atom(pred, *names):
    return Atom(pred, tuple(A(n) if n[0].isupper() else V(n[1:]) for n in names))


def test_unify_binds_and_checks():
    pattern = Atom("On", (V("x"), A("B")))
    fact = Atom("On", (A("A"), A("B")))
    assert unify_atom(pattern, fact, {}) == {V("x"): A("A")}
    assert unify_atom(pattern, Atom("On", (A("A"), A("C"))), {}) is None
    assert unify_atom(pattern, fact, {V("x"): A("C")}) is None
    assert unify_atom(Atom("Clear", (A("A"),)), fact, {}) is None


def test_substitution_leaves_unbound_variables():
    pattern = Atom("On", (V("x"), V("y")))
    out = substitute_atom(pattern, {V("x"): A("A")})
    assert out == Atom("On", (A("A"), V("y")))
    assert not out.is_ground()


def test_match_conjunction_enumerates_all_solutions():
    state = State(
        frozenset(
            {
                Atom("On", (A("A"), A("B"))),
                Atom("On", (A("C"), A("D"))),
                Atom("Clear", (A("A"),)),
                Atom("Clear", (A("C"),)),
            }
        )
    )
    conditions = (Atom("On", (V("x"), V("y"))), Atom("Clear", (V("x"),)))
    solutions = match_conjunction(conditions, state)
    as_pairs = {(s[V("x")].name, s[V("y")].name) for s in solutions}
    assert as_pairs == {("A", "B"), ("C", "D")}


def test_match_conjunction_empty_matches_once():
    assert match_conjunction((), State()) == [{}]


def test_match_respects_seed_binding():
    state = State(frozenset({Atom("On", (A("A"), A("B")))}))
    conditions = (Atom("On", (V("x"), V("y"))),)
    assert match_conjunction(conditions, state, {V("x"): A("C")}) == []


def test_apply_operator_delete_then_add(blocksworld):
    op = blocksworld.operators["put-on-table"]
    state = State(
        frozenset(
            {
                Atom("On", (A("F"), A("A"))),
                Atom("Clear", (A("F"),)),
                Atom("Space", (A("Table"),)),
            }
        )
    )
    binding = {V("x"): A("F"), V("y"): A("A")}
    out = apply_operator(state, op, binding)
    assert Atom("On", (A("F"), A("A"))) not in out
    assert Atom("OnTable", (A("F"),)) in out
    assert Atom("Clear", (A("A"),)) in out
    assert Atom("Space", (A("Table"),)) in out
    # the input state is untouched
    assert Atom("On", (A("F"), A("A"))) in state


def test_apply_operator_reports_missing_preconditions(blocksworld):
    op = blocksworld.operators["pick-up"]
    state = State(frozenset({Atom("OnTable", (A("F"),))}))
    with pytest.raises(PreconditionFailureError) as err:
        apply_operator(state, op, {V("x"): A("F")})
    assert err.value.missing == (
        Atom("Clear", (A("F"),)),
        Atom("HandEmpty", ()),
    )


def test_apply_operator_requires_total_binding(blocksworld):
    op = blocksworld.operators["put-on-table"]
    with pytest.raises(UnboundVariableError):
        apply_operator(State(), op, {V("x"): A("F")})


def test_grounding_conflict_detected():
    from pgplan.parser import parse_domain

    domain = parse_domain(
        """
        (defdomain g (
          (:predicate P 2)
          (:operator (o ?x ?y) () ((P ?x ?y)) ((P ?y ?x)))
        ))
        """
    )
    op = domain.operators["o"]
    ok = apply_operator(
        State(), op, {V("x"): A("A"), V("y"): A("B")}
    )
    assert Atom("P", (A("B"), A("A"))) in ok
    with pytest.raises(GroundingConflictError):
        apply_operator(State(), op, {V("x"): A("A"), V("y"): A("A")})


def test_goal_distance_counts_unsatisfied_atoms():
    state = State(frozenset({atom("Clear", "B")}))
    goal = frozenset({atom("Clear", "B"), atom("Clear", "C")})
    assert goal_distance(state, goal) == 1
    assert goal_distance(state, frozenset()) == 0


def test_primitive_binding_zips_params(blocksworld):
    op = blocksworld.operators["stack"]
    task = Task("stack", (A("F"), A("E")), primitive=True)
    assert primitive_binding(op, task) == {V("x"): A("F"), V("z"): A("E")}


def test_state_fingerprint_is_order_insensitive():
    a = State(frozenset({atom("Clear", "B"), atom("Clear", "A")}))
    b = State(frozenset({atom("Clear", "A"), atom("Clear", "B")}))
    c = State(frozenset({atom("Clear", "A")}))
    assert state_fingerprint(a) == state_fingerprint(b)
    assert state_fingerprint(a) != state_fingerprint(c)


# The bw-01 layout: F on A on B, E on C, D alone. The admissible set at
# the root excludes Done (B is covered) and StackonF (F is not on the
# table); moving F to the table unlocks StackonF one level down.
# ShoveOff needs a clear table-level landing block and only D qualifies,
# so each clear carried block (E, F) pairs with z=D.


def test_root_admissible_methods_and_canonical_order(blocksworld, bw01):
    task = bw01.initial_tasks[0]
    pairs = admissible_methods(bw01.initial_state, task, blocksworld)
    ids = [m.id for m, _ in pairs]
    assert ids == [
        "ShoveOff",
        "ShoveOff",
        "PutOnTable",
        "PutOnTable",
        "StackonD",
        "StackonD",
        "StackonE",
        "StackonE",
    ]
    xs = [binding[V("x")].name for _, binding in pairs]
    assert xs == ["E", "F", "E", "F", "E", "F", "E", "F"]
    assert {m.id for m, _ in pairs} == {
        "ShoveOff", "PutOnTable", "StackonD", "StackonE"
    }


def test_stackonf_becomes_admissible_after_table_move(blocksworld, bw01):
    task = bw01.initial_tasks[0]
    op = blocksworld.operators["put-on-table"]
    moved = apply_operator(
        bw01.initial_state, op, {V("x"): A("F"), V("y"): A("A")}
    )
    ids = {m.id for m, _ in admissible_methods(moved, task, blocksworld)}
    assert "StackonF" in ids
    assert ids == {"ShoveOff", "PutOnTable", "StackonD", "StackonE", "StackonF"}


def test_admissibility_repeated_calls_identical(blocksworld, bw01):
    task = bw01.initial_tasks[0]
    first = admissible_methods(bw01.initial_state, task, blocksworld)
    second = admissible_methods(bw01.initial_state, task, blocksworld)
    assert [(m.id, b) for m, b in first] == [(m.id, b) for m, b in second]


def test_instantiate_subtasks_grounds_everything(blocksworld, bw01):
    task = bw01.initial_tasks[0]
    pairs = admissible_methods(bw01.initial_state, task, blocksworld)
    method, binding = pairs[3]  # PutOnTable with x=F, y=A
    subtasks = instantiate_subtasks(method, binding)
    assert [str(t) for t in subtasks] == ["(put-on-table F A)", "(Clear B)"]
    assert all(t.is_ground() for t in subtasks)
