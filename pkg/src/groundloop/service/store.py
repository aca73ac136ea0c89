"""On-disk session store.

Layout: <root>/<id>/{record.json, spec.json, events.ndjson, config.json,
ledger.json, results/, diffs/}. Every JSON artifact is written
temp-then-rename, so a crash leaves either the previous or the new
version. Event records append as single writes of complete lines; a
torn trailing line (crash mid-append) is quarantined on reopen rather
than poisoning the record.
"""

from __future__ import annotations

import json
import os
import threading
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import NotFoundError, StoreError
from ..hashing import canonical_json

STORE_VERSION = "groundloop-store v1"


@dataclass
class SessionRecord:
    session_id: str
    created: float
    status: str
    spec: dict
    policy: str
    quarantined: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"version": STORE_VERSION, "session_id": self.session_id,
                "created": self.created, "status": self.status,
                "policy": self.policy}


def _atomic_write(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + f".tmp{os.getpid()}")
    tmp.write_text(text, encoding="utf-8")
    tmp.replace(path)


class SessionStore:
    """Single-writer-per-session persistence with atomic artifact writes."""

    def __init__(self, root):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._locks: dict[str, threading.Lock] = {}
        self._registry_lock = threading.Lock()

    # --- locking ---------------------------------------------------------------

    def lock(self, session_id: str) -> threading.Lock:
        with self._registry_lock:
            return self._locks.setdefault(session_id, threading.Lock())

    # --- lifecycle ---------------------------------------------------------------

    def _dir(self, session_id: str) -> Path:
        return self.root / session_id

    def create(self, spec: dict, policy: str = "interactive") -> SessionRecord:
        session_id = uuid.uuid4().hex[:12]
        d = self._dir(session_id)
        (d / "results").mkdir(parents=True)
        (d / "diffs").mkdir()
        record = SessionRecord(session_id=session_id, created=time.time(),
                               status="interpret", spec=spec, policy=policy)
        _atomic_write(d / "spec.json", canonical_json(spec))
        _atomic_write(d / "record.json", canonical_json(record.to_dict()))
        (d / "events.ndjson").touch()
        return record

    def update_status(self, session_id: str, status: str) -> None:
        record = self.load(session_id)
        record.status = status
        _atomic_write(self._dir(session_id) / "record.json",
                      canonical_json(record.to_dict()))

    def load(self, session_id: str) -> SessionRecord:
        d = self._dir(session_id)
        if not d.exists():
            raise NotFoundError(f"no session {session_id!r}")
        try:
            rec = json.loads((d / "record.json").read_text())
            spec = json.loads((d / "spec.json").read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise StoreError(f"corrupt session record {session_id}: {exc}") from exc
        return SessionRecord(session_id=rec["session_id"], created=rec["created"],
                             status=rec["status"], spec=spec, policy=rec["policy"])

    def list_sessions(self) -> list[SessionRecord]:
        out = []
        for d in sorted(self.root.iterdir()):
            if not d.is_dir():
                continue
            try:
                out.append(self.load(d.name))
            except StoreError:
                continue  # quarantined: unreadable record stays on disk, store stays usable
        return out

    # --- events ------------------------------------------------------------------

    def append_event(self, session_id: str, record: dict) -> None:
        line = canonical_json(record) + "\n"
        path = self._dir(session_id) / "events.ndjson"
        with open(path, "a", encoding="utf-8") as fh:
            fh.write(line)
            fh.flush()
            os.fsync(fh.fileno())

    def read_events(self, session_id: str, since: int = -1) -> list[dict]:
        """Events with id > since; a torn trailing line is dropped (crash
        recovery), anything else undecodable raises."""
        path = self._dir(session_id) / "events.ndjson"
        if not path.exists():
            raise NotFoundError(f"no session {session_id!r}")
        out = []
        lines = path.read_text(encoding="utf-8").splitlines()
        for i, line in enumerate(lines):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError:
                if i == len(lines) - 1:
                    break  # torn tail from a crash mid-append
                raise StoreError(f"corrupt event line {i} in session {session_id}")
            if rec["event_id"] > since:
                out.append(rec)
        return out

    # --- artifacts -----------------------------------------------------------------

    def save_json(self, session_id: str, name: str, payload) -> None:
        _atomic_write(self._dir(session_id) / name, canonical_json(payload))

    def load_json(self, session_id: str, name: str):
        path = self._dir(session_id) / name
        if not path.exists():
            raise NotFoundError(f"session {session_id} has no {name}")
        return json.loads(path.read_text())

    def session_dir(self, session_id: str) -> Path:
        return self._dir(session_id)

    def run_dir(self, session_id: str) -> Path:
        return self._dir(session_id) / "results"

    def diff_dir(self, session_id: str) -> Path:
        return self._dir(session_id) / "diffs"
