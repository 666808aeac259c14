"""Downloading story media: bounded-parallel, retrying, content-verified.

Story CDN URLs expire quickly, so failures are recorded with full metadata
rather than retried forever; the metadata record survives even when the
bytes are gone. Files are downloaded to ``media/.tmp/`` and renamed into
place only after the hash is known, so a crash never leaves a half file
where a whole one should be.
"""
from __future__ import annotations

import hashlib
import random
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import requests

from .archive import FAILED, FETCHED, Archive, MediaAsset

_EXT_BY_CONTENT_TYPE = {
    "image/jpeg": "jpg",
    "image/jpg": "jpg",
    "image/png": "png",
    "image/webp": "webp",
    "video/mp4": "mp4",
}

BACKOFF_BASE_S = 0.5
BACKOFF_FACTOR = 2.0
BACKOFF_JITTER = 0.2
DEFAULT_TIMEOUT_S = 30.0


@dataclass(frozen=True)
class FetchReport:
    fetched: int = 0
    failed: int = 0
    skipped: int = 0

    def to_dict(self) -> dict:
        return {"fetched": self.fetched, "failed": self.failed, "skipped": self.skipped}


@dataclass(frozen=True)
class Discrepancy:
    item_id: str
    url: str
    local_path: str
    problem: str  # missing | size_mismatch | hash_mismatch

    def to_dict(self) -> dict:
        return {
            "item_id": self.item_id,
            "url": self.url,
            "local_path": self.local_path,
            "problem": self.problem,
        }


def enqueue_media(archive: Archive, item, queued_at: int = 0) -> int:
    """Queue the best primary ref, plus the poster for videos; idempotent."""
    return archive.enqueue_media(item, queued_at)


def _extension_for(content_type: str | None) -> str:
    if not content_type:
        return "bin"
    return _EXT_BY_CONTENT_TYPE.get(content_type.split(";")[0].strip().lower(), "bin")


def _backoff_sleep(attempt: int, base_s: float) -> None:
    delay = base_s * BACKOFF_FACTOR ** (attempt - 1)
    delay *= random.uniform(1 - BACKOFF_JITTER, 1 + BACKOFF_JITTER)
    time.sleep(delay)


def _fetch_one(
    archive: Archive,
    asset: MediaAsset,
    max_retries: int,
    timeout_s: float,
    backoff_base_s: float,
) -> MediaAsset:
    media_dir = archive.root / "media"
    tmp_dir = media_dir / ".tmp"
    tmp_dir.mkdir(parents=True, exist_ok=True)
    last_error = "unknown"
    attempts = 0
    for attempt in range(1, max_retries + 2):
        attempts = attempt
        try:
            response = requests.get(asset.url, timeout=timeout_s, stream=True)
            if response.status_code == 200:
                ext = _extension_for(response.headers.get("Content-Type"))
                name = f"{asset.item_id}_{asset.k}.{ext}"
                tmp_path = tmp_dir / name
                digest = hashlib.sha256()
                size = 0
                with open(tmp_path, "wb") as fh:
                    for chunk in response.iter_content(chunk_size=65536):
                        fh.write(chunk)
                        digest.update(chunk)
                        size += len(chunk)
                final_path = media_dir / name
                tmp_path.rename(final_path)
                asset.status = FETCHED
                asset.attempts = attempts
                asset.last_error = None
                asset.local_path = str(Path("media") / name)
                asset.content_hash = digest.hexdigest()
                asset.bytes = size
                asset.fetched_at = int(time.time())
                return asset
            last_error = f"http {response.status_code}"
        except requests.RequestException as exc:
            last_error = str(exc)
        if attempt <= max_retries:
            _backoff_sleep(attempt, backoff_base_s)
    asset.status = FAILED
    asset.attempts = attempts
    asset.last_error = last_error
    return asset


def fetch_pending(
    archive: Archive,
    concurrency: int = 4,
    max_retries: int = 2,
    timeout_s: float = DEFAULT_TIMEOUT_S,
    backoff_base_s: float = BACKOFF_BASE_S,
) -> FetchReport:
    """Attempt every pending asset up to 1 + max_retries times.

    Partial failure is normal: failures land in asset status, the batch
    always completes. Honors HTTP(S)_PROXY via the requests defaults.
    """
    if concurrency < 1:
        raise ValueError("concurrency must be at least 1")
    considered = len(archive.assets())
    claimed = archive.claim_pending()
    skipped = considered - len(claimed)
    fetched = failed = 0
    with ThreadPoolExecutor(max_workers=concurrency) as pool:
        futures = [
            pool.submit(_fetch_one, archive, asset, max_retries, timeout_s, backoff_base_s)
            for asset in claimed
        ]
        for future in futures:
            asset = future.result()
            archive.record_asset_result(asset)
            if asset.status == FETCHED:
                fetched += 1
            else:
                failed += 1
    return FetchReport(fetched=fetched, failed=failed, skipped=skipped)


def verify_media(archive: Archive) -> list[Discrepancy]:
    """Re-hash fetched files; reports missing, truncated, or corrupt assets."""
    discrepancies = []
    for asset in archive.assets():
        if asset.status != FETCHED or not asset.local_path:
            continue
        path = archive.root / asset.local_path
        if not path.exists():
            discrepancies.append(
                Discrepancy(asset.item_id, asset.url, asset.local_path, "missing")
            )
            continue
        data = path.read_bytes()
        if len(data) != asset.bytes:
            discrepancies.append(
                Discrepancy(asset.item_id, asset.url, asset.local_path, "size_mismatch")
            )
            continue
        if hashlib.sha256(data).hexdigest() != asset.content_hash:
            discrepancies.append(
                Discrepancy(asset.item_id, asset.url, asset.local_path, "hash_mismatch")
            )
    return discrepancies
