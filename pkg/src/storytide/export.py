"""Analysis-ready CSV export with optional keyed pseudonymization.

The CSV covers canonical items only; the observation history stays in the
NDJSON logs. Column order is fixed and versioned in ``docs/export-csv.md`` so
downstream pipelines can pin it. Output is RFC 4180: UTF-8, CRLF line
endings, header always present, quotes doubled inside quoted fields.
"""
from __future__ import annotations

import csv
import hashlib
import hmac
import json
from dataclasses import dataclass, replace
from datetime import datetime, timezone

from .archive import FETCHED, Archive
from .errors import MissingKey
from .items import Hashtag, Link, Mention, Poll, StoryItem, sticker_to_dict

CSV_SCHEMA_VERSION = 1

CSV_COLUMNS = (
    "item_id",
    "author_id",
    "author_username",
    "taken_at_iso8601",
    "expiring_at_iso8601",
    "media_kind",
    "media_local_path",
    "media_url",
    "width",
    "height",
    "duration_s",
    "origin",
    "highlight_id",
    "caption",
    "sticker_count",
    "poll_question",
    "poll_options",
    "mention_usernames",
    "hashtags",
    "link_url",
    "stickers_json",
)

MIN_KEY_BYTES = 16


@dataclass(frozen=True)
class ExportConfig:
    pseudonymize: bool = False
    pseudonym_key: bytes | None = None

    def validate(self) -> None:
        if not self.pseudonymize:
            return
        if self.pseudonym_key is None:
            raise MissingKey("pseudonymization requested but no key configured")
        if len(self.pseudonym_key) < MIN_KEY_BYTES:
            raise MissingKey(f"pseudonym key must be at least {MIN_KEY_BYTES} bytes")


def pseudonymize_username(username: str, key: bytes) -> str:
    """Stable keyed token for a username; case-insensitive, reversible only
    by whoever holds the key and a mapping."""
    mac = hmac.new(key, username.lower().encode("utf-8"), hashlib.sha256)
    return "u_" + mac.hexdigest()[:16]


def _iso8601(epoch_s: int) -> str:
    return datetime.fromtimestamp(epoch_s, tz=timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def _apply_pseudonyms(item: StoryItem, key: bytes) -> StoryItem:
    stickers = tuple(
        replace(s, username=pseudonymize_username(s.username, key))
        if isinstance(s, Mention)
        else s
        for s in item.stickers
    )
    return replace(
        item,
        author_username=pseudonymize_username(item.author_username, key),
        stickers=stickers,
    )


def _row_for(item: StoryItem, media_local_path: str) -> list[str]:
    best = item.best_media
    polls = [s for s in item.stickers if isinstance(s, Poll)]
    mentions = [s.username for s in item.stickers if isinstance(s, Mention)]
    hashtags = [s.tag for s in item.stickers if isinstance(s, Hashtag)]
    links = [s.url for s in item.stickers if isinstance(s, Link)]
    stickers_json = json.dumps(
        [sticker_to_dict(s) for s in item.stickers],
        ensure_ascii=False,
        sort_keys=True,
        separators=(",", ":"),
    )
    return [
        item.item_id,
        item.author_id,
        item.author_username,
        _iso8601(item.taken_at),
        _iso8601(item.expiring_at),
        item.media_kind,
        media_local_path,
        best.url,
        str(best.width),
        str(best.height),
        format(item.duration_s, "g"),
        item.origin,
        item.highlight_id or "",
        item.caption or "",
        str(len(item.stickers)),
        polls[0].question if polls else "",
        ";".join(o.text for o in polls[0].options) if polls else "",
        ";".join(mentions),
        ";".join(hashtags),
        ";".join(links[:1]),
        stickers_json,
    ]


def export_csv(archive: Archive, config: ExportConfig, out) -> int:
    """Write one row per canonical item to ``out``; returns the row count.

    ``out`` must be a text sink opened with ``newline=""`` when it is a file,
    so the CRLF terminators survive untranslated.
    """
    config.validate()
    items, assets = archive.snapshot()
    fetched_paths = {
        (asset.item_id, asset.url): asset.local_path
        for asset in assets
        if asset.status == FETCHED and asset.local_path
    }
    writer = csv.writer(out, lineterminator="\r\n", quoting=csv.QUOTE_MINIMAL)
    writer.writerow(CSV_COLUMNS)
    rows = 0
    for item in items:
        local = fetched_paths.get((item.item_id, item.best_media.url), "")
        if config.pseudonymize:
            item = _apply_pseudonyms(item, config.pseudonym_key)
        writer.writerow(_row_for(item, local))
        rows += 1
    return rows
