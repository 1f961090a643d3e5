"""Interactive HTN planner that asks an expert for decomposition
preferences when its method choice is uncertain."""

from .bruteforce import SpaceTooLargeError, best_plan_length, solvable
from .errors import PgplanError
from .model import (
    Atom,
    Constant,
    Domain,
    Method,
    Operator,
    Plan,
    PlanStep,
    Problem,
    State,
    Task,
    TaskNetwork,
    Variable,
)
from .oracle import (
    CallbackExpert,
    NoisyExpert,
    QueueExpert,
    ScriptedOracle,
    SilentExpert,
    load_upfront,
    log_elicited,
    parse_oracle,
)
from .parser import parse_domain, parse_problem
from .preferences import (
    Preference,
    PreferenceStore,
    UsageRecord,
    parse_preference,
    parse_preferences,
    preference_to_text,
)
from .search import (
    ACTIVE,
    NONE,
    RANDOM,
    STRATEGIES,
    UPFRONT,
    Expert,
    MethodScore,
    NodePolicy,
    Query,
    RunStats,
    SearchObserver,
    SearchParams,
    SearchResult,
    boltzmann,
    entropy,
    eval_node,
    pg_search,
)
from .validator import validate_plan

__version__ = "0.1.0"

__all__ = [
    "ACTIVE",
    "Atom",
    "CallbackExpert",
    "Constant",
    "Domain",
    "Expert",
    "Method",
    "MethodScore",
    "NONE",
    "NodePolicy",
    "NoisyExpert",
    "Operator",
    "PgplanError",
    "Plan",
    "PlanStep",
    "Preference",
    "PreferenceStore",
    "Problem",
    "Query",
    "QueueExpert",
    "RANDOM",
    "RunStats",
    "STRATEGIES",
    "ScriptedOracle",
    "SearchObserver",
    "SearchParams",
    "SearchResult",
    "SilentExpert",
    "SpaceTooLargeError",
    "State",
    "Task",
    "TaskNetwork",
    "UPFRONT",
    "UsageRecord",
    "Variable",
    "best_plan_length",
    "boltzmann",
    "entropy",
    "eval_node",
    "load_upfront",
    "log_elicited",
    "parse_domain",
    "parse_oracle",
    "parse_preference",
    "parse_preferences",
    "parse_problem",
    "pg_search",
    "preference_to_text",
    "solvable",
    "validate_plan",
]
