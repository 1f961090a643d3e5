"""Decomposition preferences: parsing, storage, matching, adherence.

A preference says: whenever a task matching the pattern is decomposed in
a state satisfying the conditions, favor the listed preferred methods
and penalize the non-preferred ones. Grammar:

    pref := (pref ID (atom*) (NAME term*) (:prefer ID*) (:avoid ID*))

Each preference applies at most once per decomposition node, under the
first matching substitution in canonical order.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .errors import (
    DuplicatePreferenceIdError,
    OverlapError,
    SexpSyntaxError,
    TaskMismatchError,
    UnknownMethodIdError,
    UnknownPreferenceIdError,
    UnknownTaskError,
)
from .model import Atom, Binding, Constant, Domain, State, Task, Variable, atom_sort_key
from .parser import parse_atom, parse_conjunction, parse_name, parse_term
from .semantics import binding_sort_key, match_conjunction, substitute_term
from .sexpr import SList, Symbol, read, read_one

ELICITED = "elicited"
UPFRONT = "upfront"


@dataclass(frozen=True)
class Preference:
    """Conditional method preference for one task pattern."""

    id: str
    conditions: tuple[Atom, ...]
    task_pattern: Task
    preferred: frozenset[str]
    non_preferred: frozenset[str]
    origin: str = ELICITED
    depth: int | None = None

    def same_content(self, other: "Preference") -> bool:
        """Equality up to provenance; conjunctions compare as sets."""
        return (
            self.id == other.id
            and frozenset(self.conditions) == frozenset(other.conditions)
            and self.task_pattern == other.task_pattern
            and self.preferred == other.preferred
            and self.non_preferred == other.non_preferred
        )


@dataclass(frozen=True)
class UsageRecord:
    pref_id: str
    depth: int
    influenced: bool


def _unify_pattern(pattern: Task, task: Task) -> Binding | None:
    """Bind pattern variables so the pattern equals the ground task."""
    if pattern.name != task.name or pattern.arity != task.arity:
        return None
    binding: Binding = {}
    for pat_term, arg in zip(pattern.args, task.args):
        if isinstance(pat_term, Constant):
            if pat_term != arg:
                return None
        else:
            bound = binding.get(pat_term)
            if bound is None:
                binding[pat_term] = arg  # type: ignore[assignment]
            elif bound != arg:
                return None
    return binding


def pattern_match(
    conditions: tuple[Atom, ...], pattern: Task, state: State, task: Task
) -> Binding | None:
    """First substitution (canonical order) making the pattern equal the
    task and placing every condition in the state, or None."""
    head = _unify_pattern(pattern, task)
    if head is None:
        return None
    matches = match_conjunction(conditions, state, head)
    if not matches:
        return None
    return min(matches, key=binding_sort_key)


def preference_applies(
    preference: Preference, state: State, task: Task
) -> Binding | None:
    """First substitution (canonical order) under which the preference
    applies to this task in this state, or None."""
    return pattern_match(
        preference.conditions, preference.task_pattern, state, task
    )


def adherence(method_id: str, applicable: list[Preference]) -> int:
    """Preferred mentions minus non-preferred mentions. Conflicting
    preferences cancel out."""
    plus = sum(1 for p in applicable if method_id in p.preferred)
    minus = sum(1 for p in applicable if method_id in p.non_preferred)
    return plus - minus


class PreferenceStore:
    """Preferences acquired during one planning session, plus their
    usage log. Insertion order is preserved."""

    def __init__(self) -> None:
        self._prefs: list[Preference] = []
        self._by_id: dict[str, Preference] = {}
        self.usage: list[UsageRecord] = []

    def __len__(self) -> int:
        return len(self._prefs)

    def __iter__(self):
        return iter(self._prefs)

    def __contains__(self, pref_id: str) -> bool:
        return pref_id in self._by_id

    def get(self, pref_id: str) -> Preference | None:
        return self._by_id.get(pref_id)

    def add(self, preference: Preference) -> bool:
        """Add a preference; re-adding identical content is a no-op.

        Returns True if the store grew. Raises
        DuplicatePreferenceIdError when the id is taken by different
        content.
        """
        existing = self._by_id.get(preference.id)
        if existing is not None:
            if existing.same_content(preference):
                return False
            raise DuplicatePreferenceIdError(
                f"preference id '{preference.id}' already holds different content"
            )
        self._prefs.append(preference)
        self._by_id[preference.id] = preference
        return True

    def applicable(self, state: State, task: Task) -> list[Preference]:
        """Preferences applying to this node, in acquisition order."""
        out = []
        for pref in self._prefs:
            if preference_applies(pref, state, task) is not None:
                out.append(pref)
        return out


def record_usage(
    store: PreferenceStore, pref_id: str, node_depth: int, changed_argmax: bool
) -> UsageRecord:
    """Append one usage record; the preference must be in the store."""
    if pref_id not in store:
        raise UnknownPreferenceIdError(f"preference '{pref_id}' is not in the store")
    record = UsageRecord(pref_id, node_depth, changed_argmax)
    store.usage.append(record)
    return record


def _parse_pattern_task(form, domain: Domain) -> Task:
    lst = form
    if not isinstance(lst, SList) or not lst.items:
        raise SexpSyntaxError(
            "expected task pattern (NAME term*)",
            getattr(form, "line", 1),
            getattr(form, "column", 1),
        )
    name = parse_name(lst[0], "task name")
    args = tuple(parse_term(item) for item in lst.items[1:])
    if name in domain.operators:
        raise TaskMismatchError(
            f"preference pattern names '{name}', which is primitive"
        )
    if name not in domain.task_arities:
        raise UnknownTaskError(f"preference pattern names unknown task '{name}'")
    if domain.task_arities[name] != len(args):
        raise SexpSyntaxError(
            f"task '{name}' takes {domain.task_arities[name]} arguments, "
            f"got {len(args)}",
            lst.line,
            lst.column,
        )
    return Task(name, args, primitive=False)


def _parse_id_section(form, keyword: str) -> tuple[str, ...]:
    lst = form
    if not isinstance(lst, SList) or not lst.items or str(lst[0]) != keyword:
        raise SexpSyntaxError(
            f"expected ({keyword} ID*)",
            getattr(form, "line", 1),
            getattr(form, "column", 1),
        )
    return tuple(parse_name(item, "method id") for item in lst.items[1:])


def preference_from_form(form: SList, domain: Domain, origin: str = UPFRONT) -> Preference:
    if len(form.items) != 6 or str(form[0]) != "pref":
        raise SexpSyntaxError(
            "expected (pref ID (conditions) (task) (:prefer ...) (:avoid ...))",
            form.line,
            form.column,
        )
    pref_id = parse_name(form[1], "preference id")
    conditions = parse_conjunction(form[2], domain.predicates)
    pattern = _parse_pattern_task(form[3], domain)
    preferred = _parse_id_section(form[4], ":prefer")
    non_preferred = _parse_id_section(form[5], ":avoid")

    for method_id in [*preferred, *non_preferred]:
        method = domain.method_index.get(method_id)
        if method is None:
            raise UnknownMethodIdError(
                f"preference '{pref_id}' names unknown method '{method_id}'"
            )
        if method.task != pattern.name:
            raise TaskMismatchError(
                f"preference '{pref_id}' lists method '{method_id}', "
                f"which decomposes '{method.task}', not '{pattern.name}'"
            )
    overlap = set(preferred) & set(non_preferred)
    if overlap:
        raise OverlapError(
            f"preference '{pref_id}' lists {sorted(overlap)} as both "
            "preferred and non-preferred"
        )
    return Preference(
        id=pref_id,
        conditions=conditions,
        task_pattern=pattern,
        preferred=frozenset(preferred),
        non_preferred=frozenset(non_preferred),
        origin=origin,
    )


def parse_preference(text: str, domain: Domain, origin: str = UPFRONT) -> Preference:
    """Parse a single preference form and validate it against the domain."""
    form = read_one(text, "preference")
    return preference_from_form(form, domain, origin)


def parse_preferences(text: str, domain: Domain, origin: str = UPFRONT) -> list[Preference]:
    """Parse a file of preference forms in order."""
    return [preference_from_form(form, domain, origin) for form in read(text)]


def preference_to_text(preference: Preference) -> str:
    """Print a preference in the grammar; reparsing gives equal content."""
    conds = " ".join(str(a) for a in preference.conditions)
    prefer = " ".join(sorted(preference.preferred))
    avoid = " ".join(sorted(preference.non_preferred))
    return (
        f"(pref {preference.id} ({conds}) {preference.task_pattern} "
        f"(:prefer{' ' + prefer if prefer else ''}) "
        f"(:avoid{' ' + avoid if avoid else ''}))"
    )
