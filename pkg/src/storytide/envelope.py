"""The ingestion unit: one intercepted HTTP response plus its capture metadata."""
from __future__ import annotations

import json
from dataclasses import dataclass
from urllib.parse import urlparse

_REQUIRED = ("envelope_id", "source_url", "method", "status", "captured_at", "body")


@dataclass(frozen=True)
class Envelope:
    envelope_id: str
    source_url: str
    method: str
    status: int
    captured_at: int
    body: str
    session_id: str | None = None

    def to_dict(self) -> dict:
        return {
            "envelope_id": self.envelope_id,
            "source_url": self.source_url,
            "method": self.method,
            "status": self.status,
            "captured_at": self.captured_at,
            "session_id": self.session_id,
            "body": self.body,
        }

    def to_json_line(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False, sort_keys=True)


def envelope_from_dict(doc) -> Envelope:
    """Validate one envelope document; raises ValueError naming the bad field."""
    if not isinstance(doc, dict):
        raise ValueError("envelope must be a JSON object")
    for key in _REQUIRED:
        if key not in doc:
            raise ValueError(f"envelope missing field: {key}")

    envelope_id = doc["envelope_id"]
    if not isinstance(envelope_id, str) or not envelope_id:
        raise ValueError("envelope_id must be a non-empty string")

    source_url = doc["source_url"]
    parsed = urlparse(source_url) if isinstance(source_url, str) else None
    if parsed is None or not parsed.scheme or not parsed.netloc:
        raise ValueError("source_url must be an absolute URL")

    method = doc["method"]
    if not isinstance(method, str) or not method:
        raise ValueError("method must be a non-empty string")

    status = doc["status"]
    if isinstance(status, bool) or not isinstance(status, int):
        raise ValueError("status must be an integer")

    captured_at = doc["captured_at"]
    if isinstance(captured_at, bool) or not isinstance(captured_at, int) or captured_at <= 0:
        raise ValueError("captured_at must be a positive integer")

    body = doc["body"]
    if not isinstance(body, str):
        raise ValueError("body must be a string")

    session_id = doc.get("session_id")
    if session_id is not None and not isinstance(session_id, str):
        raise ValueError("session_id must be a string or null")

    return Envelope(
        envelope_id=envelope_id,
        source_url=source_url,
        method=method,
        status=status,
        captured_at=captured_at,
        body=body,
        session_id=session_id,
    )


def envelope_from_json_line(line: str) -> Envelope:
    return envelope_from_dict(json.loads(line))
