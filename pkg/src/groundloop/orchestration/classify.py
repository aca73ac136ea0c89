"""Structured interpretation of run outcomes.

Maps a run result or failure onto a fixed category set with culprit hints
and a suggested directive, so the loop reacts to solver evidence instead
of message strings.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import RunFailure
from ..sim import RunResult

SUCCESS = "success"
CONSTRUCTION_ERROR = "construction_error"
STATIC_VALIDATION_ERROR = "static_validation_error"
CONVERGENCE_FAILURE = "convergence_failure"
NONPHYSICAL_STATE = "nonphysical_state"

# category -> suggested directive kind
_SUGGESTION = {
    CONVERGENCE_FAILURE: "adjust_solver",
    NONPHYSICAL_STATE: "revise_config",
    STATIC_VALIDATION_ERROR: "revise_config",
    CONSTRUCTION_ERROR: "revise_config",
    SUCCESS: None,
}


@dataclass(frozen=True)
class DiagnosticClassification:
    category: str
    detail: str = ""
    culprits: dict = field(default_factory=dict)   # field keys, step index, cell/phase
    suggested_directive: str | None = None

    def to_dict(self) -> dict:
        return {"category": self.category, "detail": self.detail,
                "culprits": self.culprits,
                "suggested_directive": self.suggested_directive}


def classify_diagnostics(outcome) -> DiagnosticClassification:
    """Classify a RunResult or RunFailure. Success iff the certificate is
    set; convergence failures carry the failing step index and the last
    residual trace; nonphysical states carry the offending cell/phase."""
    if isinstance(outcome, RunResult):
        if outcome.certificate:
            return DiagnosticClassification(SUCCESS, "schedule completed; all step tolerances met",
                                            suggested_directive=None)
        return DiagnosticClassification(
            CONVERGENCE_FAILURE, "run result without certificate",
            suggested_directive=_SUGGESTION[CONVERGENCE_FAILURE])

    if isinstance(outcome, RunFailure):
        last = outcome.diagnostics.attempts[-1] if outcome.diagnostics and outcome.diagnostics.attempts else None
        if last is not None and last.failure_kind == "nonphysical":
            cause = outcome.cause
            culprits = {
                "step_index": outcome.step_index,
                "cell": getattr(cause, "cell", None),
                "phase": getattr(cause, "phase", None),
                "fields": ["density_closure", "initial_state"],
            }
            return DiagnosticClassification(
                NONPHYSICAL_STATE, str(outcome), culprits,
                _SUGGESTION[NONPHYSICAL_STATE])
        culprits = {
            "step_index": outcome.step_index,
            "last_dt": last.dt if last else None,
            "residual_trace": last.residual_trace[-3:] if last else [],
            "fields": ["solver_controls"],
        }
        return DiagnosticClassification(
            CONVERGENCE_FAILURE, str(outcome), culprits,
            _SUGGESTION[CONVERGENCE_FAILURE])

    if isinstance(outcome, Exception):
        return DiagnosticClassification(
            CONSTRUCTION_ERROR, f"{type(outcome).__name__}: {outcome}",
            suggested_directive=_SUGGESTION[CONSTRUCTION_ERROR])

    raise TypeError(f"cannot classify {type(outcome).__name__}")
