"""Routing captured payloads into the archive.

Raw-first discipline: every story-related envelope body is written to disk
verbatim before parsing, so a parser bug can never lose an unrepeatable
capture. Bodies that fail to parse are quarantined under ``rejected/``, never
dropped silently, and never abort a replay.
"""
from __future__ import annotations

import base64
import hashlib
import json
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

from .archive import Archive
from .envelope import Envelope, envelope_from_dict
from .errors import FormatError, ParseError
from .parse import parse_highlight_payload, parse_reel_payload, parse_tray_payload
from .patterns import EndpointKind, PatternTable, classify_endpoint


@dataclass(frozen=True)
class IngestReceipt:
    envelope_id: str
    kind: EndpointKind
    items_parsed: int
    items_new: int

    def to_dict(self) -> dict:
        return {
            "envelope_id": self.envelope_id,
            "kind": self.kind.value,
            "items_parsed": self.items_parsed,
            "items_new": self.items_new,
        }


@dataclass
class IngestSummary:
    envelopes: int = 0
    parsed: int = 0
    new: int = 0
    rejected: int = 0
    skipped: int = 0

    def to_dict(self) -> dict:
        return {
            "envelopes": self.envelopes,
            "parsed": self.parsed,
            "new": self.new,
            "rejected": self.rejected,
            "skipped": self.skipped,
        }


def ingest_envelope(env: Envelope, table: PatternTable, archive: Archive) -> IngestReceipt:
    """Classify, persist, parse, and record one envelope.

    Unrelated envelopes are counted and discarded. Raises :class:`ParseError`
    after quarantining when a story-related body is not a well-formed payload.
    """
    kind = classify_endpoint(env.source_url, table)
    if kind is EndpointKind.UNRELATED:
        return IngestReceipt(env.envelope_id, kind, items_parsed=0, items_new=0)

    archive.write_envelope_raw(env)

    try:
        if kind is EndpointKind.REEL_MEDIA:
            items = parse_reel_payload(env.body, env.captured_at)
        elif kind is EndpointKind.HIGHLIGHT:
            items = parse_highlight_payload(env.body, env.captured_at)
        else:
            entries = parse_tray_payload(env.body)
            session_id = archive.resolve_session(env.session_id, env.captured_at)
            archive.record_tray(entries, session_id, env.captured_at)
            return IngestReceipt(env.envelope_id, kind, items_parsed=0, items_new=0)
    except ParseError as exc:
        archive.write_rejected(env, error=str(exc), kind=kind.value)
        raise

    session_id = archive.resolve_session(env.session_id, env.captured_at)
    new = 0
    for item in items:
        if archive.record_observation(item, session_id, env.envelope_id, env.captured_at):
            new += 1
    return IngestReceipt(env.envelope_id, kind, items_parsed=len(items), items_new=new)


def ingest_envelopes(envelopes, table: PatternTable, archive: Archive) -> IngestSummary:
    """Process an iterable of (line, envelope-or-error) pairs in order."""
    summary = IngestSummary()
    for line, env, error in envelopes:
        summary.envelopes += 1
        if env is None:
            summary.rejected += 1
            archive.write_rejected_line(line, error)
            continue
        try:
            receipt = ingest_envelope(env, table, archive)
        except ParseError:
            summary.rejected += 1
            continue
        summary.parsed += receipt.items_parsed
        summary.new += receipt.items_new
    return summary


def _iter_ndjson(path: Path):
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            try:
                yield line, envelope_from_dict(json.loads(line)), None
            except (json.JSONDecodeError, ValueError) as exc:
                yield line, None, str(exc)


def ingest_ndjson(path, table: PatternTable, archive: Archive) -> IngestSummary:
    """Replay an envelope NDJSON file; malformed lines are rejected, not fatal."""
    return ingest_envelopes(_iter_ndjson(Path(path)), table, archive)


def _har_timestamp(started: str) -> int:
    stamp = datetime.fromisoformat(started.replace("Z", "+00:00"))
    if stamp.tzinfo is None:
        stamp = stamp.replace(tzinfo=timezone.utc)
    return int(stamp.timestamp())


def har_entry_to_envelope(entry: dict, session_id: str | None = None) -> Envelope | None:
    """One HAR entry as an envelope, or None when it has no usable text body."""
    content = entry.get("response", {}).get("content", {})
    text = content.get("text")
    if text is None or text == "":
        return None
    if content.get("encoding") == "base64":
        try:
            text = base64.b64decode(text).decode("utf-8")
        except (ValueError, UnicodeDecodeError):
            return None  # binary body
    url = entry["request"]["url"]
    started = entry["startedDateTime"]
    captured_at = _har_timestamp(started)
    digest = hashlib.sha256(f"{started}|{url}|{text}".encode("utf-8")).hexdigest()[:24]
    return Envelope(
        envelope_id=f"har-{digest}",
        source_url=url,
        method=entry["request"].get("method", "GET"),
        status=entry.get("response", {}).get("status", 0),
        captured_at=captured_at,
        body=text,
        session_id=session_id,
    )


def ingest_har(path, table: PatternTable, archive: Archive,
               session_id: str | None = None) -> IngestSummary:
    """Import a HAR 1.2 capture; entries without text bodies are skipped."""
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
        entries = doc["log"]["entries"]
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise FormatError(f"not a HAR 1.2 document: {exc}") from exc
    if not isinstance(entries, list):
        raise FormatError("not a HAR 1.2 document: log.entries is not a list")

    summary = IngestSummary()
    for entry in entries:
        try:
            env = har_entry_to_envelope(entry, session_id)
        except (KeyError, TypeError, ValueError) as exc:
            summary.rejected += 1
            archive.write_rejected_line(json.dumps(entry), f"bad HAR entry: {exc}")
            continue
        if env is None:
            summary.skipped += 1
            continue
        summary.envelopes += 1
        try:
            receipt = ingest_envelope(env, table, archive)
        except ParseError:
            summary.rejected += 1
            continue
        summary.parsed += receipt.items_parsed
        summary.new += receipt.items_new
    return summary
