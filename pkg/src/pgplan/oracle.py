"""Expert channels: scripted rules, silence, mailboxes, noise, and
round-tripping of elicited preferences.

A scripted oracle is a rule file:

    rule := (rule (atom*) (NAME term*) PREF [:max-uses N])

When queried, the first rule whose gate (conditions plus task pattern)
matches the query fires and hands back its embedded preference; a rule
with :max-uses stops firing after N answers. No matching rule means the
expert declines.
"""

from __future__ import annotations

import queue
import random
from dataclasses import dataclass

from .errors import SexpSyntaxError
from .model import Atom, Domain, Task
from .preferences import (
    ELICITED,
    Preference,
    PreferenceStore,
    parse_preferences,
    pattern_match,
    preference_from_form,
    preference_to_text,
)
from .parser import parse_conjunction, parse_name, parse_term
from .search import Expert, Query
from .sexpr import SList, Symbol, read


@dataclass
class OracleRule:
    conditions: tuple[Atom, ...]
    pattern: Task
    preference: Preference
    max_uses: int | None = None


def _parse_rule_pattern(form, domain: Domain) -> Task:
    if not isinstance(form, SList) or not form.items:
        raise SexpSyntaxError(
            "expected task pattern (NAME term*)",
            getattr(form, "line", 1),
            getattr(form, "column", 1),
        )
    name = parse_name(form[0], "task name")
    args = tuple(parse_term(item) for item in form.items[1:])
    return Task(name, args, primitive=domain.is_primitive(name))


def rule_from_form(form: SList, domain: Domain) -> OracleRule:
    items = form.items
    if len(items) not in (4, 6) or str(items[0]) != "rule":
        raise SexpSyntaxError(
            "expected (rule (conditions) (task) PREF [:max-uses N])",
            form.line,
            form.column,
        )
    conditions = parse_conjunction(items[1], domain.predicates)
    pattern = _parse_rule_pattern(items[2], domain)
    preference = preference_from_form(items[3], domain, origin=ELICITED)
    max_uses = None
    if len(items) == 6:
        kw = items[4]
        if not isinstance(kw, Symbol) or kw.text != ":max-uses":
            raise SexpSyntaxError(
                "expected :max-uses", getattr(kw, "line", 1), getattr(kw, "column", 1)
            )
        count = items[5]
        if not isinstance(count, Symbol) or not count.text.isdigit():
            raise SexpSyntaxError(
                "expected a count after :max-uses",
                getattr(count, "line", 1),
                getattr(count, "column", 1),
            )
        max_uses = int(count.text)
    return OracleRule(conditions, pattern, preference, max_uses)


def parse_oracle(text: str, domain: Domain) -> list[OracleRule]:
    """Parse a rule file, keeping file order."""
    return [rule_from_form(form, domain) for form in read(text)]


class ScriptedOracle(Expert):
    """Deterministic expert: first matching rule answers each query."""

    def __init__(self, rules: list[OracleRule]):
        self.rules = rules
        self._fired: dict[int, int] = {}

    @classmethod
    def from_file(cls, path: str, domain: Domain) -> "ScriptedOracle":
        with open(path, encoding="utf-8") as handle:
            return cls(parse_oracle(handle.read(), domain))

    def answer(self, query: Query) -> Preference | None:
        for index, rule in enumerate(self.rules):
            used = self._fired.get(index, 0)
            if rule.max_uses is not None and used >= rule.max_uses:
                continue
            if pattern_match(rule.conditions, rule.pattern, query.state, query.task) is None:
                continue
            self._fired[index] = used + 1
            return rule.preference
        return None


class SilentExpert(Expert):
    """Always declines; plans exactly like the no-expert setting."""

    def answer(self, query: Query) -> Preference | None:
        return None


class CallbackExpert(Expert):
    """Adapts a plain function into the expert protocol."""

    def __init__(self, fn):
        self._fn = fn

    def answer(self, query: Query) -> Preference | None:
        return self._fn(query)


class QueueExpert(Expert):
    """Blocking mailbox for a human on the other side of a channel.

    ``answer`` publishes the query through ``on_query`` and waits for
    ``respond``; waiting longer than the timeout counts as a decline,
    reported through ``on_timeout``.
    """

    def __init__(self, on_query=None, on_timeout=None, timeout: float = 120.0):
        self._queue: queue.Queue = queue.Queue()
        self._on_query = on_query
        self._on_timeout = on_timeout
        self.timeout = timeout

    def respond(self, preference: Preference | None) -> None:
        self._queue.put(preference)

    def answer(self, query: Query) -> Preference | None:
        if self._on_query is not None:
            self._on_query(query)
        try:
            return self._queue.get(timeout=self.timeout)
        except queue.Empty:
            if self._on_timeout is not None:
                self._on_timeout(query)
            return None


class NoisyExpert(Expert):
    """Wraps an expert and, with the given probability, swaps the
    preferred and non-preferred sets of each answer."""

    def __init__(self, inner: Expert, flip_prob: float, seed: int = 0):
        self.inner = inner
        self.flip_prob = flip_prob
        self._rng = random.Random(seed)

    def answer(self, query: Query) -> Preference | None:
        answer = self.inner.answer(query)
        if answer is None or self._rng.random() >= self.flip_prob:
            return answer
        return Preference(
            id=answer.id,
            conditions=answer.conditions,
            task_pattern=answer.task_pattern,
            preferred=answer.non_preferred,
            non_preferred=answer.preferred,
            origin=answer.origin,
            depth=answer.depth,
        )


def load_upfront(path: str, domain: Domain) -> list[Preference]:
    """Read a preference file for loading into a store before planning."""
    with open(path, encoding="utf-8") as handle:
        return parse_preferences(handle.read(), domain, origin="upfront")


def log_elicited(store: PreferenceStore, path: str) -> int:
    """Write the store's elicited preferences so a later run can load
    them upfront. Returns how many were written."""
    elicited = [p for p in store if p.origin == ELICITED]
    with open(path, "w", encoding="utf-8") as handle:
        for pref in elicited:
            handle.write(preference_to_text(pref) + "\n")
    return len(elicited)
