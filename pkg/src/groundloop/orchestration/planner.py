"""Planner directives and the three planner implementations.

A planner is a single decision point: given the phase, the findings or
classification, and the ledger so far, it returns one directive. The rule
planner is a fixed table (hermetic, no network); the external planner
forwards the same context to an HTTP endpoint with a strict schema and
hard timeout; the replay planner feeds back directives recorded in an
event log.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import requests

from ..errors import PlannerError

PROPOSE_DEFAULTS = "propose_defaults"
ASK_USER = "ask_user"
REVISE_CONFIG = "revise_config"
ADJUST_SOLVER = "adjust_solver"
ABORT = "abort"

WIRE_VERSION = "groundloop-planner v1"


@dataclass(frozen=True)
class PlannerDirective:
    kind: str
    justification: str
    edits: dict = field(default_factory=dict)   # checklist key -> new value ({} = use defaults)

    def __post_init__(self):
        if self.kind not in (PROPOSE_DEFAULTS, ASK_USER, REVISE_CONFIG, ADJUST_SOLVER, ABORT):
            raise PlannerError(f"unknown directive kind {self.kind!r}")
        if not self.justification:
            raise PlannerError("directive justification must be non-empty")

    def to_dict(self) -> dict:
        return {"kind": self.kind, "justification": self.justification,
                "edits": self.edits}

    @classmethod
    def from_dict(cls, d: dict) -> "PlannerDirective":
        return cls(kind=d["kind"], justification=d["justification"],
                   edits=d.get("edits", {}))


class RulePlanner:
    """Deterministic rule table.

    static findings: one revision from checklist defaults, then abort.
    convergence failure: halve initial_dt, at most three times, then abort.
    nonphysical state: reset the initial state to defaults once, then abort.
    """

    def __init__(self):
        self._static_attempts = 0
        self._solver_attempts = 0
        self._state_attempts = 0

    def decide(self, context: dict) -> PlannerDirective:
        phase = context["phase"]
        if phase == "act":
            if self._static_attempts >= 1:
                return PlannerDirective(ABORT, "static findings persist after one default revision")
            self._static_attempts += 1
            keys = sorted({f["key"] for f in context.get("findings", [])
                           if f["severity"] == "error"})
            return PlannerDirective(
                REVISE_CONFIG,
                f"replace {', '.join(keys) or 'failing fields'} with checklist defaults",
                edits={k: None for k in keys})

        category = context.get("classification", {}).get("category")
        if category == "convergence_failure":
            if self._solver_attempts >= 3:
                return PlannerDirective(ABORT, "convergence failure persists after three timestep halvings")
            self._solver_attempts += 1
            current = context["solver_controls"]
            new_dt = current["initial_dt"] / 2.0
            edits = {"solver_controls": {**current,
                                         "initial_dt": new_dt,
                                         "min_dt": min(current["min_dt"], new_dt)}}
            return PlannerDirective(ADJUST_SOLVER,
                                    f"halve initial_dt to {new_dt:.6g} s and retry",
                                    edits=edits)
        if category == "nonphysical_state":
            if self._state_attempts >= 1:
                return PlannerDirective(ABORT, "nonphysical state persists after resetting the initial state")
            self._state_attempts += 1
            return PlannerDirective(REVISE_CONFIG,
                                    "reset the initial state to checklist defaults",
                                    edits={"initial_state": None})
        return PlannerDirective(ABORT, f"no rule for category {category!r}")


class ReplayPlanner:
    """Feeds back the directives recorded in an event log, in order."""

    def __init__(self, directives: list[dict]):
        self._directives = list(directives)
        self._cursor = 0

    def decide(self, context: dict) -> PlannerDirective:
        if self._cursor >= len(self._directives):
            raise PlannerError("replay exhausted: live session issued more directives than the log")
        d = self._directives[self._cursor]
        self._cursor += 1
        return PlannerDirective.from_dict(d)


class ExternalPlanner:
    """HTTP planner client. Request/response are versioned JSON with a hard
    timeout; the transcript of each exchange is kept for the event log."""

    def __init__(self, url: str, timeout: float = 30.0):
        self.url = url
        self.timeout = timeout
        self.transcript: list[dict] = []

    def decide(self, context: dict) -> PlannerDirective:
        request = {
            "version": WIRE_VERSION,
            "phase": context["phase"],
            "spec_digest": context.get("spec_digest", ""),
            "findings": context.get("findings", []),
            "classification": context.get("classification", {}),
            "ledger_excerpt": context.get("ledger_excerpt", []),
            "budget": context.get("budget", {}),
        }
        try:
            resp = requests.post(self.url, json=request, timeout=self.timeout)
            resp.raise_for_status()
            payload = resp.json()
        except requests.RequestException as exc:
            raise PlannerError(f"external planner unreachable: {exc}") from exc
        self.transcript.append({"request": request, "response": payload})
        try:
            directive = PlannerDirective.from_dict(payload["directive"]
                                                   if "directive" in payload else payload)
        except (KeyError, TypeError) as exc:
            raise PlannerError(f"invalid planner response: {payload!r}") from exc
        return directive
