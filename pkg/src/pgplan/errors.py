"""Exception types raised by parsing, validation, and planning."""

from __future__ import annotations


class PgplanError(Exception):
    """Base class for all errors raised by this package."""


class SexpSyntaxError(PgplanError):
    """Malformed s-expression input.

    Carries the 1-based line and column of the offending token and a
    short description of what was expected there.
    """

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class DomainError(PgplanError):
    """Structurally valid s-expression that violates domain rules."""


class ArityError(DomainError):
    """Predicate or task used with a different arity than declared."""


class UndeclaredPredicateError(DomainError):
    """Atom references a predicate the domain never declares."""


class UnknownTaskError(DomainError):
    """Task name matches no operator and no method head."""


class UnboundVariableError(DomainError):
    """Variable used outside the scope that could bind it."""


class DuplicateMethodIdError(DomainError):
    """Two methods in one domain share an id."""


class DuplicatePreferenceIdError(PgplanError):
    """A preference id is acquired twice with different content."""


class UnknownMethodIdError(PgplanError):
    """Preference references a method id absent from the domain."""


class UnknownPreferenceIdError(PgplanError):
    """Usage record names a preference the store does not hold."""


class TaskMismatchError(PgplanError):
    """Preference lists a method that does not decompose its task."""


class OverlapError(PgplanError):
    """Preference lists the same method as preferred and non-preferred."""


class SuiteConfigError(PgplanError):
    """Benchmark suite configuration that cannot be run as written."""


class PreconditionFailureError(PgplanError):
    """Operator applied in a state missing some precondition."""

    def __init__(self, operator: str, missing: tuple):
        atoms = ", ".join(str(a) for a in missing)
        super().__init__(f"cannot apply {operator}: missing {atoms}")
        self.operator = operator
        self.missing = missing


class GroundingConflictError(PgplanError):
    """Grounded add and delete lists of one operator instance overlap."""
