"""Append-only session events with verifiable payload hashes.

One event per state transition: gapless monotone ids, a kind, a JSON
payload, and the payload's content hash. The log serializes to
newline-delimited JSON; verification recomputes every hash and checks id
continuity, so tampering or truncation is detected at a specific event.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from ..errors import CorruptLogError, TamperError
from ..hashing import canonical_json, content_hash

EVENT_KINDS = (
    "spec-received", "ambiguities", "clarification", "answer", "resolve",
    "static-check", "run-started", "diagnostics", "classification",
    "directive", "done", "failed",
)


@dataclass(frozen=True)
class SessionEvent:
    event_id: int
    kind: str
    payload: dict
    payload_hash: str
    timestamp: float

    def to_record(self) -> dict:
        return {"event_id": self.event_id, "kind": self.kind,
                "payload": self.payload, "payload_hash": self.payload_hash,
                "timestamp": self.timestamp}


@dataclass
class EventLog:
    events: list[SessionEvent] = field(default_factory=list)
    sink: object = None   # optional callable(record dict) invoked per append
    start_id: int = 0     # id offset when resuming an existing log

    def append(self, kind: str, payload: dict) -> SessionEvent:
        if kind not in EVENT_KINDS:
            raise ValueError(f"unknown event kind {kind!r}")
        event = SessionEvent(
            event_id=self.start_id + len(self.events), kind=kind, payload=payload,
            payload_hash=content_hash(payload), timestamp=time.time())
        self.events.append(event)
        if self.sink is not None:
            self.sink(event.to_record())
        return event

    def last_of(self, kind: str) -> SessionEvent | None:
        for ev in reversed(self.events):
            if ev.kind == kind:
                return ev
        return None

    def of_kind(self, kind: str) -> list[SessionEvent]:
        return [ev for ev in self.events if ev.kind == kind]

    def to_ndjson(self) -> str:
        return "".join(canonical_json(ev.to_record()) + "\n" for ev in self.events)


def read_event_log(text: str) -> list[SessionEvent]:
    import json
    events = []
    for i, line in enumerate(text.splitlines()):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
            events.append(SessionEvent(
                event_id=rec["event_id"], kind=rec["kind"], payload=rec["payload"],
                payload_hash=rec["payload_hash"], timestamp=rec.get("timestamp", 0.0)))
        except (json.JSONDecodeError, KeyError) as exc:
            raise CorruptLogError(f"undecodable event record at line {i}: {exc}") from None
    return events


def verify_event_log(events: list[SessionEvent]) -> None:
    """Gapless ids from zero and intact payload hashes; raises at the
    first offending event."""
    for expected, ev in enumerate(events):
        if ev.event_id != expected:
            raise CorruptLogError(f"gap in event ids: expected {expected}, got {ev.event_id}")
        digest = content_hash(ev.payload)
        if digest != ev.payload_hash:
            raise TamperError(f"payload hash mismatch at event {ev.event_id}",
                              event_id=ev.event_id)
