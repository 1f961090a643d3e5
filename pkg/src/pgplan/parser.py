"""Parsing and printing of domain and problem definitions.

Grammar (s-expressions, ``;`` comments, case-sensitive identifiers):

    domain   := (defdomain NAME (decl*))
    decl     := (:predicate NAME ARITY)
              | (:operator (NAME var*) conj conj conj)   ; pre, delete, add
              | (:method ID (NAME var*) conj (taskexpr*))
    problem  := (defproblem NAME DOMAINNAME (atom*) (taskexpr*) (atom*))

Declaration checking is strict: every atom must use a declared predicate
at its declared arity, every task name must resolve to an operator or a
method head, and variables may only appear where something binds them.
"""

from __future__ import annotations

from .errors import (
    ArityError,
    DomainError,
    DuplicateMethodIdError,
    SexpSyntaxError,
    UnboundVariableError,
    UndeclaredPredicateError,
    UnknownTaskError,
)
from .model import (
    Atom,
    Constant,
    Domain,
    Method,
    Operator,
    Problem,
    State,
    Task,
    Term,
    Variable,
    atom_sort_key,
    is_identifier,
)
from .sexpr import SList, Symbol, read_one


def _expect_list(form, what: str) -> SList:
    if not isinstance(form, SList):
        raise SexpSyntaxError(f"expected {what}", form.line, form.column)
    return form


def _expect_symbol(form, what: str) -> Symbol:
    if not isinstance(form, Symbol):
        raise SexpSyntaxError(f"expected {what}", form.line, form.column)
    return form


def parse_name(form, what: str = "identifier") -> str:
    sym = _expect_symbol(form, what)
    if not is_identifier(sym.text):
        raise SexpSyntaxError(f"expected {what}, got '{sym.text}'", sym.line, sym.column)
    return sym.text


def parse_term(form) -> Term:
    sym = _expect_symbol(form, "term")
    if sym.text.startswith("?"):
        name = sym.text[1:]
        if not is_identifier(name):
            raise SexpSyntaxError(
                f"expected variable, got '{sym.text}'", sym.line, sym.column
            )
        return Variable(name)
    if not is_identifier(sym.text):
        raise SexpSyntaxError(
            f"expected constant, got '{sym.text}'", sym.line, sym.column
        )
    return Constant(sym.text)


def parse_variable(form) -> Variable:
    term = parse_term(form)
    if not isinstance(term, Variable):
        raise SexpSyntaxError(
            f"expected variable, got '{term}'", form.line, form.column
        )
    return term


def parse_atom(form, predicates: dict[str, int] | None = None) -> Atom:
    lst = _expect_list(form, "atom")
    if not lst.items:
        raise SexpSyntaxError("expected predicate name", lst.line, lst.column)
    predicate = parse_name(lst[0], "predicate name")
    args = tuple(parse_term(item) for item in lst.items[1:])
    if predicates is not None:
        if predicate not in predicates:
            raise UndeclaredPredicateError(
                f"undeclared predicate '{predicate}' "
                f"(line {lst.line}, column {lst.column})"
            )
        if predicates[predicate] != len(args):
            raise ArityError(
                f"predicate '{predicate}' declared with arity "
                f"{predicates[predicate]}, used with {len(args)} "
                f"(line {lst.line}, column {lst.column})"
            )
    return Atom(predicate, args)


def parse_conjunction(form, predicates: dict[str, int] | None = None) -> tuple[Atom, ...]:
    lst = _expect_list(form, "conjunction")
    return tuple(parse_atom(item, predicates) for item in lst.items)


def _parse_head(form) -> tuple[str, tuple[Variable, ...]]:
    """Parse ``(NAME var*)`` with distinct parameter variables."""
    lst = _expect_list(form, "head")
    if not lst.items:
        raise SexpSyntaxError("expected task or operator name", lst.line, lst.column)
    name = parse_name(lst[0], "name")
    params = tuple(parse_variable(item) for item in lst.items[1:])
    if len(set(params)) != len(params):
        raise DomainError(
            f"duplicate parameter in head of '{name}' "
            f"(line {lst.line}, column {lst.column})"
        )
    return name, params


def _check_vars_bound(atoms: tuple[Atom, ...], bound: set[Variable], where: str) -> None:
    for atom in atoms:
        for var in atom.variables():
            if var not in bound:
                raise UnboundVariableError(f"variable {var} unbound in {where}")


class _DomainTables:
    """Name tables collected in a first pass so declaration order is free."""

    def __init__(self) -> None:
        self.predicates: dict[str, int] = {}
        self.operator_names: set[str] = set()
        self.method_heads: set[str] = set()
        self.method_ids: set[str] = set()
        self.task_arities: dict[str, int] = {}

    def note_task_arity(self, name: str, arity: int, line: int, column: int) -> None:
        seen = self.task_arities.get(name)
        if seen is None:
            self.task_arities[name] = arity
        elif seen != arity:
            raise ArityError(
                f"task '{name}' used with arity {arity}, elsewhere {seen} "
                f"(line {line}, column {column})"
            )


def _collect_tables(decls: SList) -> _DomainTables:
    tables = _DomainTables()
    for decl in decls:
        lst = _expect_list(decl, "declaration")
        if not lst.items:
            raise SexpSyntaxError("empty declaration", lst.line, lst.column)
        kw = _expect_symbol(lst[0], "declaration keyword").text
        if kw == ":predicate":
            if len(lst.items) != 3:
                raise SexpSyntaxError(
                    "expected (:predicate NAME ARITY)", lst.line, lst.column
                )
            name = parse_name(lst[1], "predicate name")
            arity_sym = _expect_symbol(lst[2], "arity")
            if not arity_sym.text.isdigit():
                raise SexpSyntaxError(
                    f"expected arity, got '{arity_sym.text}'",
                    arity_sym.line,
                    arity_sym.column,
                )
            if name in tables.predicates:
                raise DomainError(f"predicate '{name}' declared twice")
            tables.predicates[name] = int(arity_sym.text)
        elif kw == ":operator":
            if len(lst.items) != 5:
                raise SexpSyntaxError(
                    "expected (:operator (NAME var*) pre delete add)",
                    lst.line,
                    lst.column,
                )
            name, params = _parse_head(lst[1])
            if name in tables.operator_names:
                raise DomainError(f"operator '{name}' declared twice")
            if name in tables.method_heads:
                raise DomainError(f"'{name}' is both an operator and a task")
            tables.operator_names.add(name)
            tables.note_task_arity(name, len(params), lst.line, lst.column)
        elif kw == ":method":
            if len(lst.items) != 5:
                raise SexpSyntaxError(
                    "expected (:method ID (NAME var*) conj (taskexpr*))",
                    lst.line,
                    lst.column,
                )
            method_id = parse_name(lst[1], "method id")
            if method_id in tables.method_ids:
                raise DuplicateMethodIdError(f"method id '{method_id}' declared twice")
            tables.method_ids.add(method_id)
            name, params = _parse_head(lst[2])
            if name in tables.operator_names:
                raise DomainError(f"'{name}' is both an operator and a task")
            tables.method_heads.add(name)
            tables.note_task_arity(name, len(params), lst.line, lst.column)
        else:
            raise SexpSyntaxError(
                f"unknown declaration '{kw}'", lst.line, lst.column
            )
    return tables


def parse_task(form, tables: _DomainTables, require_ground: bool = False) -> Task:
    lst = _expect_list(form, "task expression")
    if not lst.items:
        raise SexpSyntaxError("expected task name", lst.line, lst.column)
    name = parse_name(lst[0], "task name")
    args = tuple(parse_term(item) for item in lst.items[1:])
    if name in tables.operator_names:
        primitive = True
    elif name in tables.method_heads:
        primitive = False
    else:
        raise UnknownTaskError(
            f"task '{name}' matches no operator and no method "
            f"(line {lst.line}, column {lst.column})"
        )
    expected = tables.task_arities[name]
    if expected != len(args):
        raise ArityError(
            f"task '{name}' takes {expected} arguments, got {len(args)} "
            f"(line {lst.line}, column {lst.column})"
        )
    if require_ground and any(isinstance(t, Variable) for t in args):
        raise UnboundVariableError(
            f"task {name} must be ground (line {lst.line}, column {lst.column})"
        )
    return Task(name, args, primitive)


def _parse_operator(lst: SList, tables: _DomainTables) -> Operator:
    name, params = _parse_head(lst[1])
    preconditions = parse_conjunction(lst[2], tables.predicates)
    delete_list = parse_conjunction(lst[3], tables.predicates)
    add_list = parse_conjunction(lst[4], tables.predicates)
    bound = set(params)
    _check_vars_bound(preconditions, bound, f"preconditions of '{name}'")
    _check_vars_bound(delete_list, bound, f"delete list of '{name}'")
    _check_vars_bound(add_list, bound, f"add list of '{name}'")
    overlap = set(add_list) & set(delete_list)
    if overlap:
        sample = sorted(overlap, key=atom_sort_key)[0]
        raise DomainError(
            f"operator '{name}' lists {sample} in both add and delete"
        )
    return Operator(name, params, preconditions, delete_list, add_list)


def _parse_method(lst: SList, tables: _DomainTables) -> Method:
    method_id = parse_name(lst[1], "method id")
    task_name, params = _parse_head(lst[2])
    admissibility = parse_conjunction(lst[3], tables.predicates)
    subtask_list = _expect_list(lst[4], "subtask list")
    subtasks = tuple(parse_task(item, tables) for item in subtask_list.items)
    bound = set(params)
    for atom in admissibility:
        bound |= atom.variables()
    for sub in subtasks:
        for term in sub.args:
            if isinstance(term, Variable) and term not in bound:
                raise UnboundVariableError(
                    f"variable {term} in subtask {sub.name} of method "
                    f"'{method_id}' is bound by neither head nor admissibility"
                )
    return Method(method_id, task_name, params, admissibility, subtasks)


def parse_domain(text: str) -> Domain:
    """Parse a domain definition and run all declaration checks."""
    form = read_one(text, "domain definition")
    if len(form.items) != 3 or str(form[0]) != "defdomain":
        raise SexpSyntaxError(
            "expected (defdomain NAME (decl*))", form.line, form.column
        )
    name = parse_name(form[1], "domain name")
    decls = _expect_list(form[2], "declaration list")
    tables = _collect_tables(decls)

    operators: dict[str, Operator] = {}
    methods: list[Method] = []
    for decl in decls:
        kw = str(decl[0])
        if kw == ":operator":
            op = _parse_operator(decl, tables)
            operators[op.name] = op
        elif kw == ":method":
            methods.append(_parse_method(decl, tables))

    domain = Domain(
        name=name,
        predicates=dict(tables.predicates),
        operators=operators,
        methods=tuple(methods),
        method_index={m.id: m for m in methods},
        task_arities=dict(tables.task_arities),
    )
    return domain


def _tables_from_domain(domain: Domain) -> _DomainTables:
    tables = _DomainTables()
    tables.predicates = dict(domain.predicates)
    tables.operator_names = set(domain.operators)
    tables.method_heads = {m.task for m in domain.methods}
    tables.method_ids = set(domain.method_index)
    tables.task_arities = dict(domain.task_arities)
    return tables


def parse_problem(text: str, domain: Domain) -> Problem:
    """Parse a problem definition against an already parsed domain."""
    form = read_one(text, "problem definition")
    if len(form.items) != 6 or str(form[0]) != "defproblem":
        raise SexpSyntaxError(
            "expected (defproblem NAME DOMAIN (init) (tasks) (goal))",
            form.line,
            form.column,
        )
    name = parse_name(form[1], "problem name")
    domain_name = parse_name(form[2], "domain name")
    if domain_name != domain.name:
        raise DomainError(
            f"problem '{name}' names domain '{domain_name}', "
            f"but '{domain.name}' was given"
        )
    tables = _tables_from_domain(domain)

    init_form = _expect_list(form[3], "initial state")
    init_atoms = []
    for item in init_form.items:
        atom = parse_atom(item, tables.predicates)
        if not atom.is_ground():
            raise UnboundVariableError(f"initial state atom {atom} is not ground")
        init_atoms.append(atom)

    task_form = _expect_list(form[4], "task list")
    tasks = tuple(
        parse_task(item, tables, require_ground=True) for item in task_form.items
    )
    if not tasks:
        raise DomainError(f"problem '{name}' lists no initial tasks")

    goal_form = _expect_list(form[5], "goal")
    goal_atoms = []
    for item in goal_form.items:
        atom = parse_atom(item, tables.predicates)
        if not atom.is_ground():
            raise UnboundVariableError(f"goal atom {atom} is not ground")
        goal_atoms.append(atom)

    objects: set[Constant] = set()
    for atom in [*init_atoms, *goal_atoms]:
        objects.update(t for t in atom.args if isinstance(t, Constant))
    for task in tasks:
        objects.update(t for t in task.args if isinstance(t, Constant))

    return Problem(
        name=name,
        domain_name=domain_name,
        initial_state=State(frozenset(init_atoms)),
        initial_tasks=tasks,
        goal=frozenset(goal_atoms),
        objects=frozenset(objects),
    )


def atom_to_text(atom: Atom) -> str:
    return str(atom)


def _conj_to_text(atoms: tuple[Atom, ...]) -> str:
    return "(" + " ".join(str(a) for a in atoms) + ")"


def domain_to_text(domain: Domain) -> str:
    """Print a domain in canonical form; reparsing yields an equal domain."""
    lines = [f"(defdomain {domain.name} ("]
    for pred in sorted(domain.predicates):
        lines.append(f"  (:predicate {pred} {domain.predicates[pred]})")
    for op in domain.operators.values():
        head = " ".join([op.name, *(str(v) for v in op.params)]).strip()
        lines.append(f"  (:operator ({head})")
        lines.append(f"    {_conj_to_text(op.preconditions)}")
        lines.append(f"    {_conj_to_text(op.delete_list)}")
        lines.append(f"    {_conj_to_text(op.add_list)})")
    for m in domain.methods:
        head = " ".join([m.task, *(str(v) for v in m.params)]).strip()
        lines.append(f"  (:method {m.id} ({head})")
        lines.append(f"    {_conj_to_text(m.admissibility)}")
        subtasks = " ".join(str(t) for t in m.subtasks)
        lines.append(f"    ({subtasks}))")
    lines.append("))")
    return "\n".join(lines) + "\n"


def problem_to_text(problem: Problem) -> str:
    """Print a problem in canonical form; reparsing yields an equal problem."""
    init = " ".join(str(a) for a in problem.initial_state.sorted_atoms())
    tasks = " ".join(str(t) for t in problem.initial_tasks)
    goal = " ".join(str(a) for a in sorted(problem.goal, key=atom_sort_key))
    return (
        f"(defproblem {problem.name} {problem.domain_name}\n"
        f"  ({init})\n"
        f"  ({tasks})\n"
        f"  ({goal}))\n"
    )
