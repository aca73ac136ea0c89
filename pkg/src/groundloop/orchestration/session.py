"""The interpret-act-validate session.

One session drives one specification to a terminal state:

    interpret -> (clarify) -> act -> validate -> done | failed
                     ^___________________|  (revision directives)

Act resolves the specification (with any revision overrides) and lints the
configuration; Validate simulates and classifies the outcome. Failures go
to the planner, whose directive either revises the configuration, adjusts
solver controls, or aborts. ``done`` is reachable only with a true run
certificate and no pending clarification. Every transition appends one
event to a hash-chained log, and ``replay`` re-executes a log to the same
terminal configuration hash.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import (ContradictionError, GroundLoopError, InvariantViolation,
                      RunFailure, SpecParseError)
from ..hashing import content_hash
from ..modelspec.build import SimulationBundle, run_config
from ..modelspec.checklist import CANONICAL_CHECKLIST, MISSING
from ..modelspec.resolver import (AGENT_DEFAULT, AUTONOMOUS, AssumptionEntry,
                                  AssumptionLedger, Interactive, USER_EXPLICIT,
                                  _normalize, detect_ambiguities)
from ..modelspec.schema import ModelSpec, parse_spec, spec_to_document
from ..modelspec.serialize import ExecutableConfig
from .classify import (STATIC_VALIDATION_ERROR, SUCCESS,
                       DiagnosticClassification, classify_diagnostics)
from .events import EventLog, SessionEvent, verify_event_log
from .lint import ERROR, Finding, static_check
from .planner import ABORT, PlannerDirective, ReplayPlanner, RulePlanner

INTERPRET, CLARIFY, ACT, VALIDATE, DONE, FAILED = (
    "interpret", "clarify", "act", "validate", "done", "failed")

DEFAULT_REVISION_LIMIT = 8

# override markers used by revision directives
_WEAK_DEFAULT = "weak_default"     # re-default unless the spec determines it
_FORCE_DEFAULT = "force_default"   # checklist default, even over the spec
_FORCE_VALUE = "force_value"


@dataclass
class SessionState:
    phase: str
    revision: int
    pending: list[dict] = field(default_factory=list)
    config: ExecutableConfig | None = None
    ledger: AssumptionLedger | None = None
    bundle: SimulationBundle | None = None
    failure: dict | None = None

    @property
    def certificate(self) -> bool:
        return bool(self.bundle and self.bundle.result and self.bundle.result.certificate)


def _resolve_with_overrides(spec: ModelSpec, answers: dict, overrides: dict,
                            checklist=CANONICAL_CHECKLIST):
    """Checklist resolution honoring revision overrides. Returns
    (config, ledger); raises InvariantViolation (with .key set) or
    ContradictionError on inadmissible values."""
    import time as _time
    draft: dict = {}
    notes = []
    for item in checklist:
        mode, payload = overrides.get(item.key, (None, None))
        determined = item.determined(spec)
        if mode == _FORCE_VALUE:
            value, provenance, rationale = payload, AGENT_DEFAULT, "revision directive"
        elif mode == _FORCE_DEFAULT or (mode == _WEAK_DEFAULT and determined is MISSING):
            value, rationale = item.default(spec, draft)
            provenance = AGENT_DEFAULT
            rationale = f"revision directive: {rationale}"
        elif determined is not MISSING:
            value, provenance, rationale = determined, USER_EXPLICIT, "stated in the specification"
        elif item.key in answers:
            value, provenance, rationale = (answers[item.key], USER_EXPLICIT,
                                            "user answer to a clarification query")
        else:
            value, rationale = item.default(spec, draft)
            provenance = AGENT_DEFAULT
        value = _normalize(item.key, value, draft)
        try:
            item.validate(value, draft)
        except InvariantViolation as exc:
            err = InvariantViolation(exc.invariant, f"{item.key}: {exc.invariant}")
            err.key = item.key
            raise err from None
        draft[item.key] = value
        notes.append((item.key, provenance, rationale))
    config = ExecutableConfig.from_values(draft, title=spec.title)
    ledger = AssumptionLedger(config_hash=config.content_hash)
    now = _time.time()
    for key, provenance, rationale in notes:
        ledger.entries.append(AssumptionEntry(key, draft[key], provenance, rationale, now))
    return config, ledger


class Session:
    """Stateful driver used both by run_loop and the HTTP service."""

    def __init__(self, document, policy=AUTONOMOUS, planner=None,
                 revision_limit: int = DEFAULT_REVISION_LIMIT,
                 event_sink=None, checklist=CANONICAL_CHECKLIST,
                 resume_event_count: int | None = None):
        self.log = EventLog(sink=event_sink, start_id=resume_event_count or 0)
        self.policy = policy
        self.planner = planner or RulePlanner()
        self.revision_limit = revision_limit
        self.checklist = checklist
        self._answers: dict = {}
        self._overrides: dict = {}
        self.state = SessionState(phase=INTERPRET, revision=0)

        if isinstance(document, ModelSpec):
            document = spec_to_document(document)
        self.document = document
        self.spec = parse_spec(document)
        if resume_event_count is None:
            self.log.append("spec-received", {
                "document": document,
                "level": self.spec.level,
                "policy": "interactive" if isinstance(policy, Interactive) else "autonomous",
                "spec_digest": content_hash(document),
            })

    # --- phases ---------------------------------------------------------------

    def interpret(self) -> list[dict]:
        pending = detect_ambiguities(self.spec, self.checklist)
        self.state.pending = pending
        self.log.append("ambiguities", {"items": pending})
        interactive = isinstance(self.policy, Interactive)
        if interactive and pending and not (self.policy.answers or self._answers):
            self.state.phase = CLARIFY
            self.log.append("clarification", {"items": pending})
        else:
            if interactive and self.policy.answers:
                self.provide_answers(self.policy.answers)
            self.state.phase = ACT
        return pending

    def provide_answers(self, answers: dict) -> list[dict]:
        """Record clarification answers; returns the still-pending items."""
        unknown = set(answers) - {i.key for i in self.checklist}
        if unknown:
            raise SpecParseError(f"answers for unknown checklist keys {sorted(unknown)}")
        self._answers.update(answers)
        self.log.append("answer", {"answers": answers})
        self.state.pending = [i for i in self.state.pending
                              if i["key"] not in self._answers]
        if self.state.phase == CLARIFY:
            self.state.phase = ACT
        return self.state.pending

    def act(self):
        """Resolve and lint. Returns the findings list (possibly empty);
        phase moves to validate when no error findings remain."""
        try:
            config, ledger = _resolve_with_overrides(
                self.spec, self._answers, self._overrides, self.checklist)
        except (InvariantViolation, ContradictionError) as exc:
            key = getattr(exc, "key", None) or \
                (exc.fields[0] if isinstance(exc, ContradictionError) else "spec")
            findings = [Finding(ERROR, key, str(exc))]
            self.log.append("static-check", {
                "findings": [f.to_dict() for f in findings],
                "resolve_error": getattr(exc, "invariant", str(exc)),
            })
            return findings

        self.state.config = config
        self.state.ledger = ledger
        # resolution decides every checklist item (answers or defaults), so
        # no ambiguity remains outstanding
        self.state.pending = []
        self.log.append("resolve", {
            "config_hash": config.content_hash,
            "ledger": [{"key": e.key, "provenance": e.provenance} for e in ledger.entries],
        })
        findings = static_check(config)
        self.log.append("static-check", {"findings": [f.to_dict() for f in findings]})
        if not any(f.severity == ERROR for f in findings):
            self.state.phase = VALIDATE
        return findings

    def validate_run(self) -> DiagnosticClassification:
        config = self.state.config
        self.log.append("run-started", {
            "config_hash": config.content_hash,
            "controls": config.values["solver_controls"],
        })

        def on_step(event):
            self.log.append("diagnostics", event)

        try:
            bundle = run_config(config, on_step=on_step)
            outcome = bundle.result
            self.state.bundle = bundle
        except RunFailure as exc:
            outcome = exc
        except GroundLoopError as exc:
            outcome = exc
        classification = classify_diagnostics(outcome)
        self.log.append("classification", classification.to_dict())
        return classification

    # --- loop -----------------------------------------------------------------

    def _planner_context(self, phase: str, findings=None, classification=None) -> dict:
        ledger = self.state.ledger
        return {
            "phase": phase,
            "spec_digest": content_hash(self.document),
            "findings": [f.to_dict() for f in (findings or [])],
            "classification": classification.to_dict() if classification else {},
            "ledger_excerpt": ([{"key": e.key, "provenance": e.provenance}
                                for e in ledger.entries] if ledger else []),
            "solver_controls": (self.state.config.values["solver_controls"]
                                if self.state.config else {}),
            "budget": {"revision": self.state.revision,
                       "revision_limit": self.revision_limit},
        }

    def _apply_directive(self, directive: PlannerDirective, weak: bool) -> None:
        self.log.append("directive", directive.to_dict())
        for key, value in directive.edits.items():
            if value is None:
                self._overrides[key] = ((_WEAK_DEFAULT if weak else _FORCE_DEFAULT), None)
            elif value == {"$reset": True}:
                self._overrides[key] = (_FORCE_DEFAULT, None)
            else:
                self._overrides[key] = (_FORCE_VALUE, value)
        self.state.revision += 1

    def _fail(self, reason: str, detail) -> SessionState:
        self.state.phase = FAILED
        self.state.failure = {"reason": reason, "detail": detail}
        self.log.append("failed", self.state.failure)
        return self.state

    def _finish(self) -> SessionState:
        assert self.state.certificate and not self.state.pending
        self.state.phase = DONE
        self.log.append("done", {
            "config_hash": self.state.config.content_hash,
            "certificate": True,
        })
        return self.state

    def proceed_with_defaults(self) -> None:
        """Leave an open clarification: unanswered items fall back to agent
        defaults when resolution runs."""
        if self.state.phase == CLARIFY:
            self.state.phase = ACT

    def run_to_terminal(self) -> SessionState:
        if self.state.phase == INTERPRET:
            self.interpret()
        if self.state.phase == CLARIFY:
            return self.state  # waiting on the user; the service resumes later

        while True:
            if self.state.revision > self.revision_limit:
                return self._fail("revision_limit",
                                  f"exceeded {self.revision_limit} revisions")
            if self.state.phase == ACT:
                findings = self.act()
                errors = [f for f in findings if f.severity == ERROR]
                if self.state.phase != VALIDATE:
                    directive = self.planner.decide(
                        self._planner_context(ACT, findings=errors))
                    if directive.kind == ABORT:
                        return self._fail(STATIC_VALIDATION_ERROR,
                                          [f.to_dict() for f in errors])
                    self._apply_directive(directive, weak=True)
                    continue

            classification = self.validate_run()
            if classification.category == SUCCESS:
                return self._finish()
            directive = self.planner.decide(
                self._planner_context(VALIDATE, classification=classification))
            if directive.kind == ABORT:
                return self._fail(classification.category, classification.detail)
            self._apply_directive(directive, weak=False)
            self.state.phase = ACT


def run_loop(document, policy=AUTONOMOUS, planner=None,
             revision_limit: int = DEFAULT_REVISION_LIMIT,
             event_sink=None) -> tuple[SessionState, Session]:
    """Drive a specification to a terminal state (or to a pending
    clarification under an interactive policy with no answers)."""
    session = Session(document, policy=policy, planner=planner,
                      revision_limit=revision_limit, event_sink=event_sink)
    state = session.run_to_terminal()
    return state, session


def replay(events: list[SessionEvent]) -> tuple[SessionState, Session]:
    """Re-execute a session log: deterministic steps are recomputed, logged
    planner directives and user answers are substituted for interactive
    ones, and the terminal configuration hash must match the original."""
    verify_event_log(events)
    if not events or events[0].kind != "spec-received":
        raise GroundLoopError("log does not start with spec-received")
    head = events[0].payload
    answers_events = [ev.payload["answers"] for ev in events if ev.kind == "answer"]
    directives = [ev.payload for ev in events if ev.kind == "directive"]

    policy = Interactive(None) if head["policy"] == "interactive" else AUTONOMOUS
    session = Session(head["document"], policy=policy,
                      planner=ReplayPlanner(directives))
    session.interpret()
    for answers in answers_events:
        session.provide_answers(answers)
    state = session.run_to_terminal()

    terminal = events[-1]
    if terminal.kind == "done":
        recorded = terminal.payload["config_hash"]
        if state.phase != DONE or state.config.content_hash != recorded:
            raise GroundLoopError(
                f"replay diverged: recorded config {recorded[:12]}..., "
                f"got phase={state.phase} config="
                f"{state.config.content_hash[:12] if state.config else None}...")
    return state, session
