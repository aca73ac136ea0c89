from .retrieval import (DocIndex, build_default_index, docstring_lookup,
                        example_search, keyword_search)
from .lint import Finding, static_check
from .classify import DiagnosticClassification, classify_diagnostics
from .planner import (ExternalPlanner, PlannerDirective, ReplayPlanner,
                      RulePlanner)
from .events import EventLog, SessionEvent, read_event_log, verify_event_log
from .session import Session, SessionState, replay, run_loop

__all__ = [
    "DocIndex", "build_default_index", "keyword_search", "docstring_lookup",
    "example_search", "Finding", "static_check", "DiagnosticClassification",
    "classify_diagnostics", "PlannerDirective", "RulePlanner", "ReplayPlanner",
    "ExternalPlanner", "SessionEvent", "EventLog", "read_event_log",
    "verify_event_log", "Session", "SessionState", "run_loop", "replay",
]
