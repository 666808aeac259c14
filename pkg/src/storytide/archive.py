"""The local append-only archive: sessions, observations, dedup, media queue.

Storage is plain NDJSON logs plus an in-memory index that is exactly
reconstructible by replaying them. Logs are the provenance artifact;
everything else (stats, canonical items, the CSV) is derived. All mutations
funnel through one lock so concurrent ingestion never interleaves records.

Layout under the archive root:

    archive.meta      version stamp
    sessions.ndjson   capture sessions, one per line
    items.ndjson      observations (item sightings), one per line
    tray.ndjson       tray telemetry (who had active stories), one per line
    media.ndjson      media asset status transitions, one per line
    envelopes/        raw payload bodies, verbatim, one file per envelope
    rejected/         quarantined envelopes that failed parsing
    media/            downloaded media files
    export/           CSV and figure output
"""
from __future__ import annotations

import dataclasses
import hashlib
import json
import logging
import re
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path

from .errors import IncompatibleVersion, InitRefused, UnknownItem, UnknownSession
from .items import StoryItem, TrayEntry, item_from_dict, media_targets

logger = logging.getLogger(__name__)

ARCHIVE_VERSION = 1
META_NAME = "archive.meta"
_LOG_NAMES = ("sessions.ndjson", "items.ndjson", "tray.ndjson", "media.ndjson")
_DIR_NAMES = ("envelopes", "rejected", "media", "export")

PENDING = "pending"
FETCHED = "fetched"
FAILED = "failed"


@dataclass(frozen=True)
class Session:
    session_id: str
    label: str
    started_at: int
    clock_skew: bool = False

    def to_dict(self) -> dict:
        return {
            "session_id": self.session_id,
            "label": self.label,
            "started_at": self.started_at,
            "clock_skew": self.clock_skew,
        }


@dataclass(frozen=True)
class Observation:
    item_id: str
    session_id: str
    envelope_id: str
    observed_at: int
    item: StoryItem


@dataclass
class MediaAsset:
    item_id: str
    url: str
    k: int  # ordinal within the item, part of the media filename
    role: str
    status: str = PENDING
    attempts: int = 0
    last_error: str | None = None
    local_path: str | None = None  # relative to archive root
    content_hash: str | None = None
    bytes: int | None = None
    fetched_at: int | None = None
    queued_at: int = 0

    @property
    def key(self) -> tuple[str, str]:
        return (self.item_id, self.url)

    def to_dict(self) -> dict:
        return {
            "item_id": self.item_id,
            "url": self.url,
            "k": self.k,
            "role": self.role,
            "status": self.status,
            "attempts": self.attempts,
            "last_error": self.last_error,
            "local_path": self.local_path,
            "content_hash": self.content_hash,
            "bytes": self.bytes,
            "fetched_at": self.fetched_at,
            "queued_at": self.queued_at,
        }


@dataclass
class _ItemRecord:
    first_seen_at: int
    canonical: StoryItem
    canonical_key: tuple[int, int]  # (observed_at, log seq): latest wins, ties by log order
    observations: list[Observation] = field(default_factory=list)


def _dump(record: dict) -> str:
    return json.dumps(record, ensure_ascii=False, sort_keys=True)


def _safe_name(identifier: str) -> str:
    return re.sub(r"[^A-Za-z0-9._-]", "_", identifier)


def _valid_prefix(data: bytes) -> tuple[int, list[dict]]:
    """Longest prefix of complete, parseable NDJSON records, with the records."""
    records = []
    consumed = 0
    start = 0
    while True:
        end = data.find(b"\n", start)
        if end < 0:
            break  # torn tail without newline
        line = data[start:end]
        try:
            records.append(json.loads(line.decode("utf-8")))
        except (UnicodeDecodeError, json.JSONDecodeError):
            break
        consumed = end + 1
        start = end + 1
    return consumed, records


class Archive:
    """Handle to one archive directory. Use :func:`init_archive` to obtain one."""

    def __init__(self, root: Path):
        self.root = Path(root)
        self._lock = threading.RLock()
        self._sessions: list[Session] = []
        self._session_ids: set[str] = set()
        self._items: dict[str, _ItemRecord] = {}
        self._obs_keys: set[tuple[str, str, str]] = set()
        self._obs_count = 0
        self._assets: dict[tuple[str, str], MediaAsset] = {}
        self._in_flight: set[tuple[str, str]] = set()
        self._last_ingest_at: int | None = None
        self._handles = {}

    # -- lifecycle ---------------------------------------------------------

    def _path(self, name: str) -> Path:
        return self.root / name

    def _create_layout(self) -> None:
        self.root.mkdir(parents=True, exist_ok=True)
        for name in _DIR_NAMES:
            self._path(name).mkdir(exist_ok=True)
        (self._path("media") / ".tmp").mkdir(exist_ok=True)
        for name in _LOG_NAMES:
            self._path(name).touch()
        meta = {"version": ARCHIVE_VERSION, "created_at": int(time.time())}
        self._path(META_NAME).write_text(_dump(meta) + "\n", encoding="utf-8")

    def _check_meta(self) -> None:
        meta = json.loads(self._path(META_NAME).read_text(encoding="utf-8"))
        if meta.get("version") != ARCHIVE_VERSION:
            raise IncompatibleVersion(
                f"archive version {meta.get('version')!r}, expected {ARCHIVE_VERSION}"
            )

    def _recover_log(self, name: str) -> list[dict]:
        """Replay one log, truncating a torn tail left by a crash."""
        path = self._path(name)
        if not path.exists():
            path.touch()
            return []
        data = path.read_bytes()
        consumed, records = _valid_prefix(data)
        if consumed < len(data):
            logger.warning(
                "%s: dropping %d bytes of torn tail", path, len(data) - consumed
            )
            with open(path, "r+b") as fh:
                fh.truncate(consumed)
        return records

    def _load(self) -> None:
        self._check_meta()
        for record in self._recover_log("sessions.ndjson"):
            session = Session(
                session_id=record["session_id"],
                label=record["label"],
                started_at=record["started_at"],
                clock_skew=record.get("clock_skew", False),
            )
            self._sessions.append(session)
            self._session_ids.add(session.session_id)
        for seq, record in enumerate(self._recover_log("items.ndjson")):
            self._apply_observation(
                Observation(
                    item_id=record["item_id"],
                    session_id=record["session_id"],
                    envelope_id=record["envelope_id"],
                    observed_at=record["observed_at"],
                    item=item_from_dict(record["item"]),
                ),
                seq,
            )
        for record in self._recover_log("tray.ndjson"):
            self._bump_last_ingest(record["observed_at"])
        for record in self._recover_log("media.ndjson"):
            asset = MediaAsset(
                item_id=record["item_id"],
                url=record["url"],
                k=record["k"],
                role=record["role"],
                status=record["status"],
                attempts=record["attempts"],
                last_error=record.get("last_error"),
                local_path=record.get("local_path"),
                content_hash=record.get("content_hash"),
                bytes=record.get("bytes"),
                fetched_at=record.get("fetched_at"),
                queued_at=record.get("queued_at", 0),
            )
            self._assets[asset.key] = asset

    def _append(self, name: str, record: dict) -> None:
        handle = self._handles.get(name)
        if handle is None:
            handle = open(self._path(name), "a", encoding="utf-8")
            self._handles[name] = handle
        handle.write(_dump(record) + "\n")
        handle.flush()

    def close(self) -> None:
        with self._lock:
            for handle in self._handles.values():
                handle.close()
            self._handles.clear()

    def __enter__(self) -> "Archive":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    # -- sessions ----------------------------------------------------------

    def begin_session(self, label: str, started_at: int) -> Session:
        with self._lock:
            return self._begin_session(label, started_at, session_id=None)

    def _begin_session(self, label: str, started_at: int, session_id: str | None) -> Session:
        clock_skew = bool(self._sessions) and started_at < self._sessions[-1].started_at
        if clock_skew:
            logger.warning(
                "session %r starts before the previous session; recording anyway", label
            )
        if session_id is None:
            session_id = f"s{len(self._sessions) + 1:04d}"
        session = Session(session_id, label, started_at, clock_skew)
        self._append("sessions.ndjson", session.to_dict())
        self._sessions.append(session)
        self._session_ids.add(session.session_id)
        return session

    def resolve_session(self, session_id: str | None, at: int) -> str:
        """Session for an incoming observation: the envelope's own session id
        (registered on first sight), else the most recent session, else a new
        auto session. Keeps unattended captures flowing."""
        with self._lock:
            if session_id is not None:
                if session_id not in self._session_ids:
                    self._begin_session(label=session_id, started_at=at, session_id=session_id)
                return session_id
            if self._sessions:
                return self._sessions[-1].session_id
            return self._begin_session(label="auto", started_at=at, session_id=None).session_id

    @property
    def sessions(self) -> list[Session]:
        with self._lock:
            return list(self._sessions)

    # -- observations ------------------------------------------------------

    def _bump_last_ingest(self, observed_at: int) -> None:
        if self._last_ingest_at is None or observed_at > self._last_ingest_at:
            self._last_ingest_at = observed_at

    def _apply_observation(self, obs: Observation, seq: int) -> bool:
        key = (obs.item_id, obs.session_id, obs.envelope_id)
        self._obs_keys.add(key)
        self._obs_count += 1
        self._bump_last_ingest(obs.observed_at)
        record = self._items.get(obs.item_id)
        is_new = record is None
        if is_new:
            self._items[obs.item_id] = _ItemRecord(
                first_seen_at=obs.observed_at,
                canonical=obs.item,
                canonical_key=(obs.observed_at, seq),
                observations=[obs],
            )
        else:
            record.observations.append(obs)
            if (obs.observed_at, seq) >= record.canonical_key:
                record.canonical = obs.item
                record.canonical_key = (obs.observed_at, seq)
        return is_new

    def record_observation(
        self, item: StoryItem, session_id: str, envelope_id: str, observed_at: int
    ) -> bool:
        """Append one sighting; returns True iff the item was never seen before.

        A repeat of the exact (item, session, envelope) triple is a no-op.
        """
        with self._lock:
            if session_id not in self._session_ids:
                raise UnknownSession(f"session {session_id!r} was never begun")
            if (item.item_id, session_id, envelope_id) in self._obs_keys:
                return False
            record = {
                "item_id": item.item_id,
                "session_id": session_id,
                "envelope_id": envelope_id,
                "observed_at": observed_at,
                "item": item.to_dict(),
            }
            self._append("items.ndjson", record)
            is_new = self._apply_observation(
                Observation(item.item_id, session_id, envelope_id, observed_at, item),
                self._obs_count,  # seq: ties in observed_at resolve by log order
            )
            if is_new:
                self._enqueue_media(item, queued_at=observed_at)
            return is_new

    def record_tray(self, entries: list[TrayEntry], session_id: str, observed_at: int) -> None:
        with self._lock:
            record = {
                "session_id": session_id,
                "observed_at": observed_at,
                "entries": [entry.to_dict() for entry in entries],
            }
            self._append("tray.ndjson", record)
            self._bump_last_ingest(observed_at)

    def get_item(self, item_id: str) -> tuple[StoryItem, list[Observation]]:
        """Canonical snapshot plus full observation history, oldest first."""
        with self._lock:
            record = self._items.get(item_id)
            if record is None:
                raise UnknownItem(item_id)
            return record.canonical, list(record.observations)

    def list_items(
        self,
        session_id: str | None = None,
        author: str | None = None,
        origin: str | None = None,
        since: int | None = None,
        until: int | None = None,
    ) -> list[StoryItem]:
        """Canonical items ordered by (taken_at, item_id); filters are conjunctive.

        ``since`` is inclusive, ``until`` exclusive, both on taken_at.
        """
        with self._lock:
            out = []
            for record in self._items.values():
                item = record.canonical
                if session_id is not None and not any(
                    obs.session_id == session_id for obs in record.observations
                ):
                    continue
                if author is not None and author not in (item.author_id, item.author_username):
                    continue
                if origin is not None and item.origin != origin:
                    continue
                if since is not None and item.taken_at < since:
                    continue
                if until is not None and item.taken_at >= until:
                    continue
                out.append(item)
        out.sort(key=lambda item: (item.taken_at, item.item_id))
        return out

    # -- raw payload custody -------------------------------------------------

    def write_envelope_raw(self, envelope) -> None:
        """Persist the envelope verbatim before any parsing touches it."""
        path = self._path("envelopes") / f"{_safe_name(envelope.envelope_id)}.json"
        path.write_text(envelope.to_json_line() + "\n", encoding="utf-8")

    def write_rejected(self, envelope, error: str, kind: str) -> None:
        record = {"envelope": envelope.to_dict(), "error": error, "kind": kind}
        path = self._path("rejected") / f"{_safe_name(envelope.envelope_id)}.json"
        path.write_text(_dump(record) + "\n", encoding="utf-8")

    def write_rejected_line(self, line: str, error: str) -> None:
        """Quarantine a raw input line that never became an envelope."""
        digest = hashlib.sha256(line.encode("utf-8")).hexdigest()[:16]
        record = {"line": line, "error": error}
        path = self._path("rejected") / f"line-{digest}.json"
        path.write_text(_dump(record) + "\n", encoding="utf-8")

    # -- media queue ---------------------------------------------------------

    def _enqueue_media(self, item: StoryItem, queued_at: int) -> int:
        queued = 0
        per_item = sum(1 for key in self._assets if key[0] == item.item_id)
        for ref in media_targets(item):
            key = (item.item_id, ref.url)
            if key in self._assets:
                continue
            asset = MediaAsset(
                item_id=item.item_id,
                url=ref.url,
                k=per_item,
                role=ref.role,
                queued_at=queued_at,
            )
            self._append("media.ndjson", asset.to_dict())
            self._assets[key] = asset
            per_item += 1
            queued += 1
        return queued

    def enqueue_media(self, item: StoryItem, queued_at: int = 0) -> int:
        """Queue downloads for an item; idempotent per (item_id, url)."""
        with self._lock:
            return self._enqueue_media(item, queued_at)

    def assets(self) -> list[MediaAsset]:
        with self._lock:
            return list(self._assets.values())

    def claim_pending(self) -> list[MediaAsset]:
        """Atomically claim every pending asset not already being fetched.

        Returns private copies; the index only changes when the result comes
        back through :meth:`record_asset_result`.
        """
        with self._lock:
            claimed = []
            for asset in self._assets.values():
                if asset.status == PENDING and asset.key not in self._in_flight:
                    self._in_flight.add(asset.key)
                    claimed.append(dataclasses.replace(asset))
            return claimed

    def record_asset_result(self, asset: MediaAsset) -> None:
        with self._lock:
            self._append("media.ndjson", asset.to_dict())
            self._assets[asset.key] = asset
            self._in_flight.discard(asset.key)

    def snapshot(self) -> tuple[list[StoryItem], list[MediaAsset]]:
        """Canonical items plus assets from one consistent point in time."""
        with self._lock:
            items = [record.canonical for record in self._items.values()]
            assets = list(self._assets.values())
        items.sort(key=lambda item: (item.taken_at, item.item_id))
        return items, assets

    # -- stats ---------------------------------------------------------------

    def stats(self) -> dict:
        with self._lock:
            pending = sum(1 for asset in self._assets.values() if asset.status == PENDING)
            return {
                "items": len(self._items),
                "observations": self._obs_count,
                "sessions": len(self._sessions),
                "pending_media": pending,
                "last_ingest_at": self._last_ingest_at,
            }


def init_archive(root) -> Archive:
    """Create a fresh archive, or open and index an existing one.

    Refuses a non-empty directory that is not already an archive, so a typo
    never sprays log files into someone's home directory.
    """
    root = Path(root)
    archive = Archive(root)
    if root.exists() and not root.is_dir():
        raise InitRefused(f"{root} exists and is not a directory")
    if root.is_dir() and (root / META_NAME).exists():
        archive._load()
        return archive
    if root.is_dir() and any(root.iterdir()):
        raise InitRefused(f"{root} is not empty and not an archive")
    archive._create_layout()
    return archive
