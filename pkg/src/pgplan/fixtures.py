"""Access to the bundled fixture kit (domains, problems, oracles)."""

from __future__ import annotations

from importlib import resources

from .model import Domain, Problem
from .parser import parse_domain, parse_problem

DOMAINS = ("blocksworld", "hanoi", "rockets")


def fixture_text(name: str) -> str:
    return (resources.files("pgplan") / "fixtures" / name).read_text(encoding="utf-8")


def fixture_path(name: str) -> str:
    """Filesystem path of a bundled fixture, for CLI-level tests."""
    return str(resources.files("pgplan") / "fixtures" / name)


def load_domain(name: str) -> Domain:
    return parse_domain(fixture_text(f"{name}.dom"))


def load_problem(domain: Domain | str, name: str) -> Problem:
    if isinstance(domain, str):
        domain = load_domain(domain)
    return parse_problem(fixture_text(f"{name}.prob"), domain)


def problem_names(domain_name: str) -> list[str]:
    root = resources.files("pgplan") / "fixtures"
    prefix = {"blocksworld": "bw-", "hanoi": "hanoi-", "rockets": "rockets-"}[domain_name]
    names = [
        entry.name[: -len(".prob")]
        for entry in root.iterdir()
        if entry.name.startswith(prefix) and entry.name.endswith(".prob")
    ]
    return sorted(names)
