"""Core value types for HTN domains, problems, states, and plans.

Everything here is immutable. Terms are either constants or variables;
variables are written with a leading ``?`` in the surface syntax but the
marker is not part of the stored name.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

IDENTIFIER_RE = re.compile(r"[A-Za-z][A-Za-z0-9_-]*\Z")


def is_identifier(text: str) -> bool:
    return bool(IDENTIFIER_RE.match(text))


@dataclass(frozen=True)
class Constant:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Variable:
    name: str

    def __str__(self) -> str:
        return "?" + self.name


Term = Constant | Variable
Binding = dict[Variable, Constant]


@dataclass(frozen=True)
class Atom:
    """A predicate applied to terms, e.g. ``(On A B)``."""

    predicate: str
    args: tuple[Term, ...] = ()

    @property
    def arity(self) -> int:
        return len(self.args)

    def is_ground(self) -> bool:
        return all(isinstance(t, Constant) for t in self.args)

    def variables(self) -> set[Variable]:
        return {t for t in self.args if isinstance(t, Variable)}

    def __str__(self) -> str:
        if not self.args:
            return f"({self.predicate})"
        return f"({self.predicate} {' '.join(str(t) for t in self.args)})"


def atom_sort_key(atom: Atom) -> tuple:
    """Canonical ordering key: predicate first, then argument spelling."""
    return (atom.predicate, tuple(str(t) for t in atom.args))


@dataclass(frozen=True)
class State:
    """A set of ground atoms under the closed-world reading."""

    atoms: frozenset[Atom] = frozenset()

    def __contains__(self, atom: Atom) -> bool:
        return atom in self.atoms

    def __len__(self) -> int:
        return len(self.atoms)

    def sorted_atoms(self) -> list[Atom]:
        return sorted(self.atoms, key=atom_sort_key)

    def with_changes(self, delete: frozenset[Atom], add: frozenset[Atom]) -> "State":
        return State((self.atoms - delete) | add)

    def by_predicate(self, predicate: str) -> list[Atom]:
        return sorted(
            (a for a in self.atoms if a.predicate == predicate), key=atom_sort_key
        )

    def __str__(self) -> str:
        return "{" + " ".join(str(a) for a in self.sorted_atoms()) + "}"


@dataclass(frozen=True)
class Task:
    """A task occurrence: primitive tasks name operators, the rest name
    method heads."""

    name: str
    args: tuple[Term, ...] = ()
    primitive: bool = False

    @property
    def arity(self) -> int:
        return len(self.args)

    def is_ground(self) -> bool:
        return all(isinstance(t, Constant) for t in self.args)

    def __str__(self) -> str:
        if not self.args:
            return f"({self.name})"
        return f"({self.name} {' '.join(str(t) for t in self.args)})"


@dataclass(frozen=True)
class Operator:
    """A primitive action schema.

    ``preconditions`` must all hold in the current state; application
    removes ``delete_list`` and then inserts ``add_list``. All lists may
    mention only the parameter variables.
    """

    name: str
    params: tuple[Variable, ...]
    preconditions: tuple[Atom, ...]
    delete_list: tuple[Atom, ...]
    add_list: tuple[Atom, ...]


@dataclass(frozen=True)
class Method:
    """One way to decompose a task.

    The method is admissible in a state when its head unifies with the
    task and the admissibility conjunction matches the state. Subtasks
    replace the task in order.
    """

    id: str
    task: str
    params: tuple[Variable, ...]
    admissibility: tuple[Atom, ...]
    subtasks: tuple[Task, ...]


@dataclass(frozen=True)
class Domain:
    name: str
    predicates: dict[str, int]
    operators: dict[str, Operator]
    methods: tuple[Method, ...]
    method_index: dict[str, Method] = field(default_factory=dict)
    task_arities: dict[str, int] = field(default_factory=dict)

    def methods_for(self, task_name: str) -> list[Method]:
        """Methods whose head names the task, in declaration order."""
        return [m for m in self.methods if m.task == task_name]

    def method_order(self, method_id: str) -> int:
        """Position of a method in declaration order; ties break on this."""
        for i, m in enumerate(self.methods):
            if m.id == method_id:
                return i
        raise KeyError(method_id)

    def is_primitive(self, task_name: str) -> bool:
        return task_name in self.operators


@dataclass(frozen=True)
class Problem:
    name: str
    domain_name: str
    initial_state: State
    initial_tasks: tuple[Task, ...]
    goal: frozenset[Atom]
    objects: frozenset[Constant] = frozenset()


@dataclass(frozen=True)
class PlanStep:
    operator: str
    args: tuple[Constant, ...]

    def __str__(self) -> str:
        if not self.args:
            return f"({self.operator})"
        return f"({self.operator} {' '.join(str(a) for a in self.args)})"


@dataclass(frozen=True)
class Plan:
    steps: tuple[PlanStep, ...] = ()

    def __len__(self) -> int:
        return len(self.steps)

    def __str__(self) -> str:
        return "\n".join(str(s) for s in self.steps)


class TaskNetwork:
    """Decomposition tree built during search.

    Nodes are integer ids issued in expansion order; edges point from a
    decomposed task to the nodes created for its subtasks. The root set
    holds the initial tasks. Edges never form a cycle because children
    are always freshly issued ids.
    """

    def __init__(self) -> None:
        self._next_id = 0
        self.tasks: dict[int, Task] = {}
        self.parents: dict[int, int | None] = {}
        self.children: dict[int, list[int]] = {}
        self.via: dict[int, str | None] = {}

    def add(self, task: Task, parent: int | None = None,
            via: str | None = None) -> int:
        node = self._next_id
        self._next_id += 1
        self.tasks[node] = task
        self.parents[node] = parent
        self.children[node] = []
        self.via[node] = via
        if parent is not None:
            self.children[parent].append(node)
        return node

    def lineage(self, node: int) -> list[str]:
        """Methods that produced this node, nearest decomposition first."""
        out = []
        current: int | None = node
        while current is not None:
            method = self.via.get(current)
            if method is not None:
                out.append(method)
            current = self.parents[current]
        return out

    def depth(self, node: int) -> int:
        d = 0
        parent = self.parents[node]
        while parent is not None:
            d += 1
            parent = self.parents[parent]
        return d

    def __len__(self) -> int:
        return self._next_id
