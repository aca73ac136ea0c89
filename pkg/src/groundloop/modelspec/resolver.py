"""Ambiguity detection, resolution policies, and the assumption ledger.

Resolution walks the checklist in order. A value the specification
determines is logged ``user_explicit``; anything else is either answered
interactively (``user_explicit``, with the answer as value) or filled from
the item's default generator (``agent_default``). The result is always a
complete configuration plus a ledger with exactly one entry per key.

The audit handles the remaining gap: configurations assembled outside the
resolver can inherit values from simulator-level defaults without any
ledger entry. ``defaults_audit`` finds those keys, tags them
``simulator_default``, and appends them, making the tacit choices visible.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from ..errors import InvariantViolation, StaleLedgerError
from ..fluids import SIMULATOR_DEFAULT_DENSITY
from .checklist import CANONICAL_CHECKLIST, MISSING, NORMALIZERS, ChecklistItem
from .schema import ModelSpec
from .serialize import ExecutableConfig

USER_EXPLICIT = "user_explicit"
AGENT_DEFAULT = "agent_default"
SIMULATOR_DEFAULT = "simulator_default"


class _Autonomous:
    def __repr__(self):
        return "AUTONOMOUS"


AUTONOMOUS = _Autonomous()


@dataclass(frozen=True)
class Interactive:
    """Interactive policy: with no answers, resolution pauses and returns a
    ClarificationRequest; with answers, answered items become user-explicit
    and the remainder fall back to agent defaults."""

    answers: dict | None = None


@dataclass
class AssumptionEntry:
    key: str
    value: object
    provenance: str
    rationale: str
    timestamp: float = 0.0
    event_id: int | None = None

    def to_dict(self) -> dict:
        return {"key": self.key, "value": self.value, "provenance": self.provenance,
                "rationale": self.rationale, "timestamp": self.timestamp,
                "event_id": self.event_id}


@dataclass
class AssumptionLedger:
    entries: list[AssumptionEntry] = field(default_factory=list)
    config_hash: str = ""

    def by_key(self, key: str) -> AssumptionEntry | None:
        for e in self.entries:
            if e.key == key:
                return e
        return None

    def keys(self) -> set[str]:
        return {e.key for e in self.entries}

    def covers(self, checklist=CANONICAL_CHECKLIST) -> bool:
        keys = self.keys()
        return all(item.key in keys for item in checklist)

    def to_records(self) -> list[dict]:
        return [e.to_dict() for e in self.entries]

    @classmethod
    def from_records(cls, records: list[dict], config_hash: str = "") -> "AssumptionLedger":
        return cls([AssumptionEntry(**r) for r in records], config_hash)


@dataclass(frozen=True)
class ClarificationRequest:
    """Pending decisions, each with a proposed default and its one-line
    justification, batched into a single request."""

    items: tuple[dict, ...]

    def keys(self) -> list[str]:
        return [i["key"] for i in self.items]


@dataclass(frozen=True)
class TacitAssumptionReport:
    config_hash: str
    entries: tuple[AssumptionEntry, ...]

    @property
    def empty(self) -> bool:
        return not self.entries

    def keys(self) -> list[str]:
        return [e.key for e in self.entries]


def detect_ambiguities(spec: ModelSpec, checklist=CANONICAL_CHECKLIST) -> list[dict]:
    """Checklist items the specification does not determine, in checklist
    order, each carrying a proposed default and rationale."""
    draft: dict = {}
    pending: list[dict] = []
    for item in checklist:
        value = item.determined(spec)
        if value is MISSING:
            proposal, rationale = item.default(spec, draft)
            pending.append({
                "key": item.key,
                "description": item.description,
                "severity": item.severity,
                "divergence_prone": item.divergence_prone,
                "proposed_default": proposal,
                "rationale": rationale,
            })
            draft[item.key] = _normalize(item.key, proposal, draft)
        else:
            draft[item.key] = _normalize(item.key, value, draft)
    return pending


def _normalize(key: str, value, draft: dict):
    normalizer = NORMALIZERS.get(key)
    return normalizer(value, draft) if normalizer else value


def _resolve_values(spec: ModelSpec, checklist, answers: dict | None):
    """(values, provenance notes) in checklist order; validates each value."""
    answers = answers or {}
    draft: dict = {}
    notes: list[tuple[str, str, str]] = []  # key, provenance, rationale
    for item in checklist:
        value = item.determined(spec)
        if value is not MISSING:
            provenance, rationale = USER_EXPLICIT, "stated in the specification"
        elif item.key in answers:
            value = answers[item.key]
            provenance, rationale = USER_EXPLICIT, "user answer to a clarification query"
        else:
            value, rationale = item.default(spec, draft)
            provenance = AGENT_DEFAULT
        value = _normalize(item.key, value, draft)
        try:
            item.validate(value, draft)
        except InvariantViolation as exc:
            raise InvariantViolation(exc.invariant,
                                     f"{item.key}: {exc.invariant}") from None
        draft[item.key] = value
        notes.append((item.key, provenance, rationale))
    return draft, notes


def resolve(spec: ModelSpec, policy=AUTONOMOUS, checklist=CANONICAL_CHECKLIST,
            event_id: int | None = None):
    """Resolve a specification into (ExecutableConfig, AssumptionLedger),
    or return a ClarificationRequest under an interactive policy with no
    answers supplied."""
    if isinstance(policy, Interactive) and policy.answers is None:
        pending = detect_ambiguities(spec, checklist)
        if pending:
            return ClarificationRequest(tuple(pending))
        answers = {}
    elif isinstance(policy, Interactive):
        answers = policy.answers
    else:
        answers = {}

    values, notes = _resolve_values(spec, checklist, answers)
    config = ExecutableConfig.from_values(values, title=spec.title)
    now = time.time()
    ledger = AssumptionLedger(config_hash=config.content_hash)
    for key, provenance, rationale in notes:
        ledger.entries.append(AssumptionEntry(
            key=key, value=values[key], provenance=provenance,
            rationale=rationale, timestamp=now, event_id=event_id))
    return config, ledger


# Simulator-level defaults: what a configuration inherits when assembled
# without going through the resolver. Identical to the agent defaults
# except for the density closure, which is the simulator constructor's own
# (compressible, surface-referenced) fallback.
def _simulator_default(item: ChecklistItem, spec: ModelSpec, draft: dict):
    if item.key == "density_closure":
        d = SIMULATOR_DEFAULT_DENSITY
        return {"kind": d.kind,
                "reference_pressure": d.reference_pressure,
                "compressibility": {"water": d.c_w, "oil": d.c_n}}
    value, _ = item.default(spec, draft)
    return value


def assemble_unaudited(spec: ModelSpec, checklist=CANONICAL_CHECKLIST):
    """Legacy assembly path: specification-determined values are logged,
    but everything else silently inherits simulator defaults with no
    ledger entry. Exists to exercise (and demonstrate) the defaults audit."""
    draft: dict = {}
    logged: list[str] = []
    for item in checklist:
        value = item.determined(spec)
        if value is not MISSING:
            logged.append(item.key)
        else:
            value = _simulator_default(item, spec, draft)
        value = _normalize(item.key, value, draft)
        item.validate(value, draft)
        draft[item.key] = value
    config = ExecutableConfig.from_values(draft, title=spec.title)
    now = time.time()
    ledger = AssumptionLedger(config_hash=config.content_hash)
    for key in logged:
        ledger.entries.append(AssumptionEntry(
            key=key, value=draft[key], provenance=USER_EXPLICIT,
            rationale="stated in the specification", timestamp=now))
    return config, ledger


def defaults_audit(config: ExecutableConfig, ledger: AssumptionLedger,
                   checklist=CANONICAL_CHECKLIST) -> TacitAssumptionReport:
    """Find configuration values with no ledger entry, tag them
    ``simulator_default``, and append them to the ledger. Idempotent; a
    ledger produced by ``resolve`` yields an empty report."""
    if ledger.config_hash != config.content_hash:
        raise StaleLedgerError(
            f"ledger certifies {ledger.config_hash[:12]}..., "
            f"config hash is {config.content_hash[:12]}...")
    known = ledger.keys()
    found: list[AssumptionEntry] = []
    now = time.time()
    for item in checklist:
        if item.key in known:
            continue
        entry = AssumptionEntry(
            key=item.key, value=config.values[item.key],
            provenance=SIMULATOR_DEFAULT,
            rationale="value reachable only through a simulator-level default; "
                      "never decided explicitly",
            timestamp=now)
        ledger.entries.append(entry)
        found.append(entry)
    return TacitAssumptionReport(config_hash=config.content_hash, entries=tuple(found))
