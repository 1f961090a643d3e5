"""HTTP session service exposing live planning runs to expert consoles.

Each session owns one search. The search runs on its own thread; when it
poses a query the session parks in ``awaiting_expert`` until the console
responds, declines, or the expert timeout converts the silence into a
decline. Progress is published as an ordered event log (pollable with
``?since=N`` or streamed as server-sent events) plus a point-in-time
snapshot. All message bodies carry the protocol version ``v: 1``; floats
are trimmed to nine significant digits.
"""

from __future__ import annotations

import json
import math
import threading
import time
import uuid

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, StreamingResponse
from pydantic import BaseModel

from .errors import PgplanError
from .model import Domain, Problem, State
from .parser import parse_domain, parse_problem
from .preferences import (
    Preference,
    PreferenceStore,
    parse_preference,
    preference_to_text,
)
from .search import (
    ACTIVE,
    STRATEGIES,
    Expert,
    MethodScore,
    Query,
    SearchObserver,
    SearchParams,
    SearchResult,
    entropy,
    pg_search,
)

PROTOCOL = 1

CREATED = "created"
RUNNING = "running"
AWAITING = "awaiting_expert"
FINISHED = "finished"
FAILED = "failed"

_NO_RESPONSE = object()


def _sig9(value: float) -> float:
    """Trim a float to nine significant digits for wire stability."""
    return float(f"{value:.9g}")


def _state_json(state: State) -> list[str]:
    return [str(atom) for atom in state.sorted_atoms()]


def _method_json(score: MethodScore, blind: bool) -> dict:
    if blind:
        return {"id": score.method_id}
    return {
        "id": score.method_id,
        "L": None if math.isinf(score.rollout_cost) else int(score.rollout_cost),
        "D": score.goal_distance,
        "A": score.adherence,
        "score": None if math.isinf(score.score) else _sig9(score.score),
        "p": _sig9(score.probability),
    }


def _query_json(query: Query, blind: bool) -> dict:
    return {
        "node": query.node,
        "state": _state_json(query.state),
        "task": str(query.task),
        "methods": [_method_json(m, blind) for m in query.candidates],
        "entropy": _sig9(entropy([m.probability for m in query.candidates])),
    }


class _SessionExpert(Expert):
    """Mailbox between the search thread and the respond endpoint.

    Everything is serialized on the session condition, so a response and
    a timeout cannot both win: whichever flips the lifecycle first is
    the one the search sees.
    """

    def __init__(self, session: "_Session", timeout: float):
        self.session = session
        self.timeout = timeout

    def answer(self, query: Query) -> Preference | None:
        s = self.session
        with s.changed:
            deadline = time.monotonic() + self.timeout
            while s.response is _NO_RESPONSE and s.lifecycle == AWAITING:
                remaining = deadline - time.monotonic()
                if remaining <= 0:
                    break
                s.changed.wait(remaining)
            if s.response is not _NO_RESPONSE:
                answer = s.response
                s.response = _NO_RESPONSE
                return answer
            # silence past the deadline counts as a decline
            s.pending = None
            s.lifecycle = RUNNING
            s.events.append({
                "v": PROTOCOL,
                "type": "expert_timeout",
                "node": query.node,
                "timeout_s": _sig9(self.timeout),
            })
            s.changed.notify_all()
            return None


class _Session:
    def __init__(
        self,
        sid: str,
        domain: Domain,
        problem: Problem,
        params: SearchParams,
        strategy: str,
        expert_timeout: float,
        blind: bool,
    ):
        self.id = sid
        self.domain = domain
        self.problem = problem
        self.params = params
        self.strategy = strategy
        self.blind = blind
        self.store = PreferenceStore()
        self.changed = threading.Condition()
        self.lifecycle = CREATED
        self.events: list[dict] = []
        self.pending: Query | None = None
        self.response: object = _NO_RESPONSE
        self.expert = _SessionExpert(self, expert_timeout)
        self.thread: threading.Thread | None = None
        self.node: int | None = None
        self.state: State = problem.initial_state
        self.plan: list[str] = []
        self.plan_nodes: list[int] = []
        self.frontier: dict | None = None
        self.result: dict | None = None
        self.nodes_expanded = 0

    def terminal(self) -> bool:
        return self.lifecycle in (FINISHED, FAILED)


class _ServiceObserver(SearchObserver):
    """Publishes search progress into the session under its lock."""

    def __init__(self, session: _Session):
        self.session = session

    def node_expanded(self, node, task, depth, state, plan, frontier_size):
        s = self.session
        with s.changed:
            s.node = node
            s.state = state
            s.frontier = {"task": str(task), "depth": depth, "size": frontier_size}
            s.nodes_expanded += 1
            s.events.append({
                "v": PROTOCOL,
                "type": "node_expanded",
                "node": node,
                "task": str(task),
                "depth": depth,
            })
            s.changed.notify_all()

    def step_applied(self, node, step, state, plan):
        s = self.session
        with s.changed:
            s.state = state
            s.plan = [str(p) for p in plan]
            # backtracking shortens the plan; keep node ids aligned
            s.plan_nodes = s.plan_nodes[: len(plan) - 1] + [node]
            s.changed.notify_all()

    def query_posed(self, query: Query):
        s = self.session
        with s.changed:
            s.pending = query
            s.lifecycle = AWAITING
            event = {"v": PROTOCOL, "type": "query_posed"}
            event.update(_query_json(query, s.blind))
            s.events.append(event)
            s.changed.notify_all()

    def response_received(self, node, preference):
        s = self.session
        with s.changed:
            s.events.append({
                "v": PROTOCOL,
                "type": "preference_received",
                "node": node,
                "preference": None if preference is None
                else preference_to_text(preference),
            })
            s.changed.notify_all()

    def finished(self, result: SearchResult):
        s = self.session
        stats = result.stats
        with s.changed:
            s.result = {
                "solved": stats.solved,
                "plan": [str(step) for step in result.plan.steps]
                if result.plan else [],
                "plan_len": stats.plan_len,
                "reason": result.reason,
                "queries": stats.queries_issued,
                "prefs": stats.prefs_acquired,
                "nodes": stats.nodes_expanded,
                "wall_ms": _sig9(stats.wall_ms),
            }
            if result.plan is not None:
                s.lifecycle = FINISHED
                s.events.append({
                    "v": PROTOCOL,
                    "type": "plan_found",
                    "plan": [
                        {
                            "step": str(step),
                            "lineage": result.network.lineage(node),
                        }
                        for step, node in zip(result.plan.steps, s.plan_nodes)
                    ],
                    "plan_len": stats.plan_len,
                    "queries": stats.queries_issued,
                })
            else:
                s.lifecycle = FAILED
                s.events.append({
                    "v": PROTOCOL,
                    "type": "failed",
                    "reason": result.reason,
                })
            s.changed.notify_all()


def _run_session(session: _Session) -> None:
    try:
        pg_search(
            session.domain,
            session.problem,
            session.expert,
            session.store,
            session.params,
            session.strategy,
            observer=_ServiceObserver(session),
        )
    except Exception as exc:  # surface engine crashes as a failed session
        with session.changed:
            if not session.terminal():
                session.lifecycle = FAILED
                session.events.append({
                    "v": PROTOCOL,
                    "type": "failed",
                    "reason": f"{type(exc).__name__}: {exc}",
                })
                session.changed.notify_all()


class CreateSessionBody(BaseModel):
    domain: str
    problem: str
    strategy: str = ACTIVE
    entropy_threshold: float = 0.5
    rollout_depth: int = 3
    temperature: float = 1.0
    seed: int = 0
    time_limit: float = 600.0
    random_query_prob: float = 0.1
    max_queries: int | None = None
    expert_timeout: float = 120.0


class RespondBody(BaseModel):
    preference: str | None = None
    decline: bool = False


def _error(status: int, message: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"v": PROTOCOL, "error": message})


def create_app(blind: bool = False, static_dir: str | None = None) -> FastAPI:
    """Build the service; ``blind`` hides method scores from queries so
    the expert sees only candidate identities."""
    app = FastAPI(title="pgplan elicitation service")
    sessions: dict[str, _Session] = {}
    registry = threading.Lock()

    def lookup(sid: str) -> _Session | None:
        with registry:
            return sessions.get(sid)

    @app.post("/sessions")
    def create_session(body: CreateSessionBody):
        if body.strategy not in STRATEGIES:
            return _error(400, f"unknown strategy '{body.strategy}'")
        try:
            domain = parse_domain(body.domain)
            problem = parse_problem(body.problem, domain)
        except PgplanError as exc:
            return _error(400, str(exc))
        params = SearchParams(
            rollout_depth=body.rollout_depth,
            entropy_threshold=body.entropy_threshold,
            temperature=body.temperature,
            time_budget=body.time_limit,
            rng_seed=body.seed,
            random_query_prob=body.random_query_prob,
            max_queries=body.max_queries,
        )
        sid = uuid.uuid4().hex[:12]
        session = _Session(
            sid, domain, problem, params, body.strategy,
            body.expert_timeout, blind,
        )
        with registry:
            sessions[sid] = session
        return {"v": PROTOCOL, "id": sid, "lifecycle": CREATED}

    @app.post("/sessions/{sid}/start")
    def start_session(sid: str):
        session = lookup(sid)
        if session is None:
            return _error(404, "unknown session")
        with session.changed:
            if session.lifecycle != CREATED:
                return _error(409, "session already started")
            session.lifecycle = RUNNING
        session.thread = threading.Thread(
            target=_run_session, args=(session,), daemon=True
        )
        session.thread.start()
        return {"v": PROTOCOL, "id": sid, "lifecycle": RUNNING}

    @app.get("/sessions/{sid}/snapshot")
    def snapshot(sid: str):
        session = lookup(sid)
        if session is None:
            return _error(404, "unknown session")
        with session.changed:
            return {
                "v": PROTOCOL,
                "id": sid,
                "lifecycle": session.lifecycle,
                "node": session.node,
                "state": _state_json(session.state),
                "plan": list(session.plan),
                "frontier": session.frontier,
                "query": _query_json(session.pending, session.blind)
                if session.pending else None,
                "result": session.result,
                "nodes_expanded": session.nodes_expanded,
            }

    @app.get("/sessions/{sid}/events")
    def events(sid: str, request: Request, since: int = 0):
        session = lookup(sid)
        if session is None:
            return _error(404, "unknown session")
        if "text/event-stream" in request.headers.get("accept", ""):
            def stream():
                index = max(0, since)
                while True:
                    with session.changed:
                        while index >= len(session.events) and not session.terminal():
                            session.changed.wait(0.5)
                        chunk = session.events[index:]
                        index += len(chunk)
                        done = session.terminal()
                    for event in chunk:
                        yield f"data: {json.dumps(event)}\n\n"
                    if done and not chunk:
                        return
            return StreamingResponse(stream(), media_type="text/event-stream")
        with session.changed:
            chunk = session.events[max(0, since):]
            return {
                "v": PROTOCOL,
                "events": chunk,
                "next": len(session.events),
                "lifecycle": session.lifecycle,
            }

    @app.post("/sessions/{sid}/respond")
    def respond(sid: str, body: RespondBody):
        session = lookup(sid)
        if session is None:
            return _error(404, "unknown session")
        if body.decline == (body.preference is not None):
            return _error(400, "send exactly one of preference or decline")
        with session.changed:
            if session.lifecycle != AWAITING:
                return _error(409, "session is not awaiting the expert")
            if body.decline:
                answer = None
            else:
                try:
                    answer = parse_preference(body.preference, session.domain)
                except PgplanError as exc:
                    return _error(400, str(exc))  # still awaiting
                held = session.store.get(answer.id)
                if held is not None and not held.same_content(answer):
                    return _error(
                        400,
                        f"preference id '{answer.id}' already holds "
                        "different content",
                    )
            session.response = answer
            session.pending = None
            session.lifecycle = RUNNING
            session.changed.notify_all()
        return {
            "v": PROTOCOL,
            "id": sid,
            "lifecycle": RUNNING,
            "accepted": answer is not None,
        }

    if static_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=static_dir, html=True), name="console")

    return app
