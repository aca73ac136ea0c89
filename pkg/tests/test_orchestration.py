import http.server
import json
import threading

import pytest

from fixtures import (convergence_failure_doc, report_dome_doc,
                      waterflood_doc)
from groundloop.errors import PlannerError, RunFailure, TamperError
from groundloop.modelspec import AUTONOMOUS, Interactive, parse_spec, resolve
from groundloop.orchestration import (ExternalPlanner, PlannerDirective,
                                      RulePlanner, Session, classify_diagnostics,
                                      read_event_log, replay, run_loop,
                                      static_check, verify_event_log)
from groundloop.orchestration.classify import (CONVERGENCE_FAILURE,
                                               NONPHYSICAL_STATE, SUCCESS)
from groundloop.orchestration.events import SessionEvent
from groundloop.sim.driver import Diagnostics, StepAttempt


def small_waterflood_doc():
    doc = waterflood_doc()
    doc["mesh"]["nx"] = 40
    doc["wells"]["producers"]["placement"] = [[39, 0]]
    doc["schedule"]["n_report_steps"] = 8
    return doc


class TestStaticCheck:
    def test_known_good_config_passes(self):
        config, _ = resolve(parse_spec(small_waterflood_doc()), AUTONOMOUS)
        findings = static_check(config)
        assert not [f for f in findings if f.severity == "error"]

    def test_permeability_unit_anomaly_warns(self):
        doc = small_waterflood_doc()
        doc["layers"][0]["permeability"]["mean"] = "150 D"
        config, _ = resolve(parse_spec(doc), AUTONOMOUS)
        warnings = [f for f in static_check(config) if f.severity == "warning"]
        assert any("100 D" in f.message for f in warnings)

    def test_initial_dt_beyond_horizon_warns(self):
        doc = small_waterflood_doc()
        two_horizons = 2 * 200 * 86400.0
        doc["solver"]["initial_dt"] = two_horizons
        doc["solver"]["max_dt"] = two_horizons
        config, _ = resolve(parse_spec(doc), AUTONOMOUS)
        warnings = [f.key for f in static_check(config) if f.severity == "warning"]
        assert "solver_controls" in warnings


class TestClassify:
    def test_certificate_true_is_success(self):
        doc = small_waterflood_doc()
        from groundloop.modelspec import run_config
        config, _ = resolve(parse_spec(doc), AUTONOMOUS)
        bundle = run_config(config)
        c = classify_diagnostics(bundle.result)
        assert c.category == SUCCESS

    def test_run_failure_convergence(self):
        diag = Diagnostics(attempts=[StepAttempt(0.0, 1e5, 4, False,
                                                 failure_kind="max_iters")])
        failure = RunFailure("step failed", diagnostics=diag, step_index=3)
        c = classify_diagnostics(failure)
        assert c.category == CONVERGENCE_FAILURE
        assert c.culprits["step_index"] == 3
        assert c.suggested_directive == "adjust_solver"

    def test_nonphysical_classification(self):
        from groundloop.errors import NonphysicalStateError
        cause = NonphysicalStateError("bad density", cell=17, phase="oil")
        diag = Diagnostics(attempts=[StepAttempt(0.0, 1e5, 2, False,
                                                 failure_kind="nonphysical")])
        failure = RunFailure("x", diagnostics=diag, step_index=0, cause=cause)
        c = classify_diagnostics(failure)
        assert c.category == NONPHYSICAL_STATE
        assert c.culprits["cell"] == 17 and c.culprits["phase"] == "oil"
        assert c.suggested_directive == "revise_config"


class TestRulePlanner:
    def test_static_rule_one_attempt_then_abort(self):
        p = RulePlanner()
        ctx = {"phase": "act", "findings": [{"key": "porosity_spec", "severity": "error"}]}
        d1 = p.decide(ctx)
        assert d1.kind == "revise_config" and "porosity_spec" in d1.edits
        d2 = p.decide(ctx)
        assert d2.kind == "abort"

    def test_convergence_rule_three_halvings(self):
        p = RulePlanner()
        ctx = {"phase": "validate",
               "classification": {"category": "convergence_failure"},
               "solver_controls": {"initial_dt": 800.0, "min_dt": 1.0}}
        dts = []
        for _ in range(3):
            d = p.decide(ctx)
            assert d.kind == "adjust_solver"
            dts.append(d.edits["solver_controls"]["initial_dt"])
            ctx["solver_controls"] = d.edits["solver_controls"]
        assert dts == [400.0, 200.0, 100.0]
        assert p.decide(ctx).kind == "abort"

    def test_nonphysical_rule(self):
        p = RulePlanner()
        ctx = {"phase": "validate",
               "classification": {"category": "nonphysical_state"},
               "solver_controls": {}}
        d = p.decide(ctx)
        assert d.kind == "revise_config" and d.edits == {"initial_state": None}
        assert p.decide(ctx).kind == "abort"


class TestRunLoop:
    def test_complete_spec_done_in_one_pass(self):
        state, session = run_loop(small_waterflood_doc(), AUTONOMOUS)
        assert state.phase == "done"
        assert state.revision == 0
        assert state.certificate
        kinds = [e.kind for e in session.log.events]
        assert kinds[0] == "spec-received" and kinds[-1] == "done"

    def test_negative_porosity_fails_with_invariant_named(self):
        doc = small_waterflood_doc()
        doc["layers"][0]["porosity"]["mean"] = -0.2
        state, session = run_loop(doc, AUTONOMOUS)
        assert state.phase == "failed"
        assert state.revision == 1  # one revision attempt, then abort
        assert state.failure["reason"] == "static_validation_error"
        assert "porosity" in json.dumps(state.failure["detail"])

    def test_forced_convergence_failure_recovers(self):
        state, session = run_loop(convergence_failure_doc(), AUTONOMOUS)
        assert state.phase == "done"
        directives = session.log.of_kind("directive")
        kinds = [d.payload["kind"] for d in directives]
        assert set(kinds) == {"adjust_solver"}
        assert 1 <= len(kinds) <= 3
        assert state.certificate

    def test_done_requires_certificate_and_no_pending(self):
        state, _ = run_loop(small_waterflood_doc(), AUTONOMOUS)
        assert state.phase == "done"
        assert state.certificate and not state.pending

    def test_interactive_without_answers_pauses_in_clarify(self):
        state, session = run_loop(report_dome_doc(), Interactive(None))
        assert state.phase == "clarify"
        assert any(i["key"] == "density_closure" for i in state.pending)

    def test_revision_limit(self):
        class StubbornPlanner:
            def decide(self, context):
                return PlannerDirective("revise_config", "try defaults again",
                                        edits={"porosity_spec": None})

        doc = small_waterflood_doc()
        doc["layers"][0]["porosity"]["mean"] = -0.2
        state, _ = run_loop(doc, AUTONOMOUS, planner=StubbornPlanner(),
                            revision_limit=3)
        assert state.phase == "failed"
        assert state.failure["reason"] == "revision_limit"


class TestReplay:
    def test_replay_reproduces_terminal_hash(self):
        state, session = run_loop(small_waterflood_doc(), AUTONOMOUS)
        state2, _ = replay(session.log.events)
        assert state2.config.content_hash == state.config.content_hash

    def test_replay_of_revision_session(self):
        state, session = run_loop(convergence_failure_doc(), AUTONOMOUS)
        state2, _ = replay(session.log.events)
        assert state2.phase == "done"
        assert state2.config.content_hash == state.config.content_hash

    def test_replay_interactive_preserves_provenance_sequence(self):
        doc = report_dome_doc(open_porosity=True)
        session = Session(doc, policy=Interactive(None))
        session.interpret()
        session.provide_answers({"porosity_spec": {"means": [0.18, 0.2, 0.22],
                                                   "stds": [0.0, 0.0, 0.0]}})
        state = session.run_to_terminal()
        assert state.phase == "done"
        state2, session2 = replay(session.log.events)
        seq1 = [(e.key, e.provenance) for e in state.ledger.entries]
        seq2 = [(e.key, e.provenance) for e in state2.ledger.entries]
        assert seq1 == seq2

    def test_tampered_payload_detected_at_event(self):
        _, session = run_loop(small_waterflood_doc(), AUTONOMOUS)
        events = list(session.log.events)
        victim = events[3]
        events[3] = SessionEvent(victim.event_id, victim.kind,
                                 {**victim.payload, "injected": True},
                                 victim.payload_hash, victim.timestamp)
        with pytest.raises(TamperError) as ei:
            replay(events)
        assert ei.value.event_id == 3

    def test_gap_detected(self):
        _, session = run_loop(small_waterflood_doc(), AUTONOMOUS)
        events = session.log.events[:2] + session.log.events[3:]
        from groundloop.errors import CorruptLogError
        with pytest.raises(CorruptLogError):
            verify_event_log(events)

    def test_ndjson_round_trip(self):
        _, session = run_loop(small_waterflood_doc(), AUTONOMOUS)
        text = session.log.to_ndjson()
        events = read_event_log(text)
        verify_event_log(events)
        assert len(events) == len(session.log.events)


class _PlannerStub(http.server.BaseHTTPRequestHandler):
    requests_seen = []

    def do_POST(self):
        length = int(self.headers["Content-Length"])
        body = json.loads(self.rfile.read(length))
        type(self).requests_seen.append(body)
        response = {"directive": {"kind": "abort", "justification": "stub says stop"},
                    "version": body.get("version")}
        data = json.dumps(response).encode()
        self.send_response(200)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(data)))
        self.end_headers()
        self.wfile.write(data)

    def log_message(self, *args):
        pass


class TestExternalPlanner:
    def test_wire_schema_round_trip(self):
        server = http.server.HTTPServer(("127.0.0.1", 0), _PlannerStub)
        thread = threading.Thread(target=server.serve_forever, daemon=True)
        thread.start()
        try:
            url = f"http://127.0.0.1:{server.server_port}/"
            planner = ExternalPlanner(url, timeout=5.0)
            directive = planner.decide({
                "phase": "validate", "spec_digest": "abc",
                "classification": {"category": "convergence_failure"},
                "ledger_excerpt": [], "budget": {"revision": 1},
            })
            assert directive.kind == "abort"
            seen = _PlannerStub.requests_seen[-1]
            assert seen["version"].startswith("groundloop-planner")
            assert set(seen) == {"version", "phase", "spec_digest", "findings",
                                 "classification", "ledger_excerpt", "budget"}
            assert planner.transcript  # exchange recorded verbatim
        finally:
            server.shutdown()

    def test_unreachable_raises(self):
        planner = ExternalPlanner("http://127.0.0.1:9/", timeout=0.2)
        with pytest.raises(PlannerError):
            planner.decide({"phase": "validate"})

    def test_rule_planner_needs_no_network(self):
        # hermetic: the full loop works with requests disabled
        import groundloop.orchestration.planner as planner_mod

        class Boom:
            def post(self, *a, **k):
                raise AssertionError("network touched")

        orig = planner_mod.requests
        planner_mod.requests = Boom()
        try:
            state, _ = run_loop(convergence_failure_doc(), AUTONOMOUS)
            assert state.phase == "done"
        finally:
            planner_mod.requests = orig
