"""Canonical JSON serialization and content hashing.

The byte-stable form is: UTF-8 JSON, keys sorted, compact separators,
floats rendered by Python's shortest round-trip repr, NaN/Inf rejected.
Every content hash in the workbench is the SHA-256 hex digest of that form.
"""

from __future__ import annotations

import hashlib
import json


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=False)


def canonical_bytes(obj) -> bytes:
    return canonical_json(obj).encode("utf-8")


def content_hash(obj) -> str:
    """SHA-256 hex digest of the canonical serialization of ``obj``."""
    return hashlib.sha256(canonical_bytes(obj)).hexdigest()


def hash_bytes(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()
