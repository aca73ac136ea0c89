"""HTTP/JSON service over sessions, runs, ledgers, diffs, and retrieval.

One worker pool executes runs (one at a time per session, enforced by the
store lock plus a running flag -> 409 on concurrent runs). All mutating
state lives in the store; the in-memory session map is a cache that is
rebuilt from disk after a restart.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from ..errors import (ContradictionError, GroundLoopError, InvariantViolation,
                      NotFoundError, QueryError, SpecParseError, StoreError)
from ..modelspec.resolver import AUTONOMOUS, Interactive
from ..orchestration.planner import ExternalPlanner, RulePlanner
from ..orchestration.retrieval import build_default_index, keyword_search
from ..orchestration.session import CLARIFY, DONE, FAILED, Session
from ..reconstruction.diffing import diff_bundles
from .artifacts import load_run_bundle, save_run_dir
from .store import SessionStore

API_VERSION = "groundloop-api v1"


class LiveSession:
    def __init__(self, record, session: Session):
        self.record = record
        self.session = session
        self.running = False


def _error(code: str, message: str, detail=None, status: int = 400) -> JSONResponse:
    return JSONResponse({"code": code, "message": message, "detail": detail},
                        status_code=status)


def create_app(store: SessionStore, planner_url: str | None = None,
               ui_dir: str | None = None, max_workers: int = 4) -> FastAPI:
    app = FastAPI(title="groundloop", version=API_VERSION)
    app.state.store = store
    app.state.live: dict[str, LiveSession] = {}
    app.state.executor = ThreadPoolExecutor(max_workers=max_workers)
    app.state.index = build_default_index()
    app.state.planner_url = planner_url

    def make_planner():
        if planner_url:
            return ExternalPlanner(planner_url)
        return RulePlanner()

    def sink_for(session_id: str):
        return lambda record: store.append_event(session_id, record)

    def revive(session_id: str) -> LiveSession:
        """Rebuild an in-memory session from the store after a restart."""
        record = store.load(session_id)
        events = store.read_events(session_id)
        policy = Interactive(None) if record.policy == "interactive" else AUTONOMOUS
        session = Session(record.spec, policy=policy, planner=make_planner(),
                          event_sink=sink_for(session_id),
                          resume_event_count=len(events))
        session.interpret()
        for ev in events:
            if ev["kind"] == "answer":
                session.provide_answers(ev["payload"]["answers"])
        live = LiveSession(record, session)
        app.state.live[session_id] = live
        return live

    def get_live(session_id: str) -> LiveSession:
        live = app.state.live.get(session_id)
        if live is None:
            live = revive(session_id)
        return live

    # --- error mapping -----------------------------------------------------------

    @app.exception_handler(NotFoundError)
    async def _nf(request: Request, exc: NotFoundError):
        return _error("not_found", str(exc), status=404)

    @app.exception_handler(InvariantViolation)
    async def _inv(request: Request, exc: InvariantViolation):
        return _error("invariant_violation", str(exc),
                      detail={"invariant": exc.invariant}, status=422)

    @app.exception_handler(ContradictionError)
    async def _contra(request: Request, exc: ContradictionError):
        return _error("contradiction", str(exc),
                      detail={"fields": list(exc.fields)}, status=422)

    @app.exception_handler(SpecParseError)
    async def _parse(request: Request, exc: SpecParseError):
        return _error("spec_parse_error", str(exc),
                      detail={"location": exc.location}, status=422)

    @app.exception_handler(QueryError)
    async def _query(request: Request, exc: QueryError):
        return _error("query_error", str(exc), status=400)

    @app.exception_handler(StoreError)
    async def _store_err(request: Request, exc: StoreError):
        return _error("store_error", str(exc), status=500)

    @app.exception_handler(GroundLoopError)
    async def _domain(request: Request, exc: GroundLoopError):
        return _error("domain_error", str(exc), status=409)

    # --- sessions ------------------------------------------------------------------

    @app.post("/sessions", status_code=201)
    def create_session(body: dict):
        if "spec" not in body:
            raise SpecParseError("request body needs a 'spec' document", "body")
        policy_name = body.get("policy", "interactive")
        if policy_name not in ("interactive", "autonomous"):
            raise SpecParseError(f"unknown policy {policy_name!r}", "body.policy")
        record = store.create(body["spec"], policy=policy_name)
        policy = Interactive(None) if policy_name == "interactive" else AUTONOMOUS
        session = Session(body["spec"], policy=policy, planner=make_planner(),
                          event_sink=sink_for(record.session_id))
        session.interpret()
        store.update_status(record.session_id, session.state.phase)
        app.state.live[record.session_id] = LiveSession(record, session)
        return {"id": record.session_id, "phase": session.state.phase}

    @app.get("/sessions")
    def list_sessions():
        return {"sessions": [r.to_dict() for r in store.list_sessions()]}

    def _status(live: LiveSession) -> dict:
        s = live.session.state
        return {
            "id": live.record.session_id,
            "phase": s.phase,
            "revision": s.revision,
            "running": live.running,
            "pending_count": len(s.pending),
            "config_hash": s.config.content_hash if s.config else None,
            "certificate": s.certificate,
            "failure": s.failure,
        }

    @app.get("/sessions/{session_id}")
    def session_status(session_id: str):
        return _status(get_live(session_id))

    @app.get("/sessions/{session_id}/ambiguities")
    def ambiguities(session_id: str):
        live = get_live(session_id)
        return {"items": live.session.state.pending}

    @app.post("/sessions/{session_id}/answers")
    def post_answers(session_id: str, body: dict):
        live = get_live(session_id)
        answers = body.get("answers", body)
        if live.running:
            raise GroundLoopError("run in progress")
        session = live.session
        pending_keys = {i["key"] for i in session.state.pending}
        not_pending = set(answers) - pending_keys
        if not_pending:
            raise InvariantViolation(
                "answer_key_not_pending",
                f"no pending decision for {sorted(not_pending)}; the specification "
                "already determines these keys")
        snapshot = (dict(session._answers), list(session.state.pending),
                    session.state.phase)

        def rollback():
            session._answers, session.state.pending, session.state.phase = \
                dict(snapshot[0]), list(snapshot[1]), snapshot[2]

        session.provide_answers(answers)
        try:
            session.act()  # validates the merged answers end to end
        except Exception:
            rollback()
            raise
        # act() reports invariant violations as findings; surface them as 422
        resolve_findings = [f for f in
                            (session.log.last_of("static-check").payload.get("findings", []))
                            if f["severity"] == "error"]
        bad = [f for f in resolve_findings if f["key"] in answers]
        if bad:
            rollback()
            raise InvariantViolation(bad[0]["message"], bad[0]["message"])
        # act() treats unanswered items as resolved-by-default; keep them
        # pending here so the user can keep answering until the run starts
        remaining = [i for i in snapshot[1] if i["key"] not in session._answers]
        session.state.pending = remaining
        if remaining:
            session.state.phase = CLARIFY
        store.update_status(session_id, session.state.phase)
        return {"remaining": [i["key"] for i in remaining]}

    @app.post("/sessions/{session_id}/run", status_code=202)
    def start_run(session_id: str):
        live = get_live(session_id)
        if live.running:
            return _error("run_in_progress", "a run is already in progress",
                          status=409)
        if live.session.state.phase in (DONE, FAILED):
            return _error("already_terminal",
                          f"session is {live.session.state.phase}", status=409)
        live.running = True

        def job():
            lock = store.lock(session_id)
            with lock:
                try:
                    live.session.proceed_with_defaults()
                    state = live.session.run_to_terminal()
                    store.update_status(session_id, state.phase)
                    if state.phase == DONE:
                        save_run_dir(store.session_dir(session_id), state.bundle, state.ledger)
                finally:
                    live.running = False

        app.state.executor.submit(job)
        return {"status": "running"}

    @app.get("/sessions/{session_id}/diagnostics")
    def diagnostics(session_id: str, since: int = -1):
        events = store.read_events(session_id, since=since)
        next_id = events[-1]["event_id"] if events else since
        return {"events": events, "next": next_id}

    @app.get("/sessions/{session_id}/ledger")
    def ledger(session_id: str):
        live = get_live(session_id)
        if live.session.state.ledger is not None:
            return {"entries": live.session.state.ledger.to_records()}
        return {"entries": []}

    @app.get("/sessions/{session_id}/results/rates")
    def rates(session_id: str):
        live = get_live(session_id)
        bundle = live.session.state.bundle
        if bundle is None or bundle.result is None:
            raise NotFoundError("no results yet")
        res = bundle.result
        pvi = (res.cumulative_injection / bundle.pore_volume).tolist()
        return {
            "well_names": res.well_names,
            "times": res.step_times.tolist(),
            "pvi": pvi,
            "rates_water": res.step_rates_water.tolist(),
            "rates_oil": res.step_rates_oil.tolist(),
            "bhp": res.step_bhp.tolist(),
            "cumulative_injection": res.cumulative_injection.tolist(),
            "pore_volume": bundle.pore_volume,
            "avg_pressure": res.avg_pressure,
            "report_times": res.report_times,
        }

    @app.get("/sessions/{session_id}/results/snapshots")
    def snapshots(session_id: str, index: int | None = None):
        live = get_live(session_id)
        bundle = live.session.state.bundle
        if bundle is None or bundle.result is None:
            raise NotFoundError("no results yet")
        res = bundle.result
        if index is None:
            return {"count": len(res.report_times), "report_times": res.report_times}
        if not (0 <= index < len(res.report_times)):
            raise NotFoundError(f"no report step {index}")
        return {
            "index": index,
            "time": res.report_times[index],
            "dims": bundle.config.values["mesh_dims"],
            "pressure": res.report_pressure[index].tolist(),
            "saturation": res.report_saturation[index].tolist(),
        }

    # --- diffs and search ---------------------------------------------------------

    def _bundle_for(ref) -> object:
        if isinstance(ref, dict) and "session" in ref:
            session_id = ref["session"]
            live = get_live(session_id)
            state = live.session.state
            if state.phase == DONE and state.bundle is not None:
                from ..reconstruction.diffing import RunBundle
                return RunBundle.from_simulation(state.bundle, state.ledger)
            return load_run_bundle(store.session_dir(session_id))
        if isinstance(ref, dict) and "dir" in ref:
            return load_run_bundle(ref["dir"])
        raise SpecParseError("diff endpoint takes {'session': id} or {'dir': path}",
                             "body")

    @app.post("/diffs")
    def diffs(body: dict):
        ref = _bundle_for(body["ref"])
        cand = _bundle_for(body["cand"])
        fractions = body.get("pvi_fractions", [0.25, 0.5, 0.75])
        report = diff_bundles(ref, cand, fractions)
        return report.to_dict()

    @app.get("/search")
    def search(q: str, k: int = 10):
        return {"results": keyword_search(app.state.index, q, k=k)}

    @app.get("/healthz")
    def health():
        return {"status": "ok", "version": API_VERSION}

    if ui_dir and os.path.isdir(ui_dir):
        app.mount("/ui", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
