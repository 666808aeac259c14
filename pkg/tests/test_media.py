"""Media fetching against a local fault-injecting HTTP server."""
import hashlib
import json
import threading

from storytide.archive import FAILED, FETCHED, PENDING
from storytide.items import IMAGE, VIDEO, MediaRef, StoryItem
from storytide.media import enqueue_media, fetch_pending, verify_media

JPEG_BYTES = b"\xff\xd8\xff\xe0" + b"fixture-image-payload" * 40
MP4_BYTES = b"\x00\x00\x00\x18ftypmp42" + b"fixture-video-payload" * 60

FAST = {"backoff_base_s": 0.01}


def _image_item(item_id: str, url: str) -> StoryItem:
    return StoryItem(
        item_id=item_id,
        author_id="1",
        author_username="tester",
        taken_at=1717230000,
        expiring_at=1717316400,
        media_kind=IMAGE,
        media=(MediaRef(url=url, width=1080, height=1920, best=True),),
    )


def _video_item(item_id: str, video_url: str, poster_url: str) -> StoryItem:
    return StoryItem(
        item_id=item_id,
        author_id="1",
        author_username="tester",
        taken_at=1717230000,
        expiring_at=1717316400,
        media_kind=VIDEO,
        duration_s=7.5,
        media=(
            MediaRef(url=video_url, width=720, height=1280, best=True),
            MediaRef(url=poster_url, width=720, height=1280, role="poster"),
        ),
    )


# -- enqueue -------------------------------------------------------------------


def test_enqueue_image_item_queues_one(archive):
    n = enqueue_media(archive, _image_item("i1", "https://cdn.test/i1.jpg"))
    assert n == 1
    assert archive.stats()["pending_media"] == 1


def test_enqueue_video_item_queues_video_and_poster(archive):
    n = enqueue_media(archive, _video_item("v1", "https://cdn.test/v1.mp4", "https://cdn.test/v1.jpg"))
    assert n == 2


def test_reenqueue_is_idempotent(archive):
    item = _image_item("i1", "https://cdn.test/i1.jpg")
    assert enqueue_media(archive, item) == 1
    assert enqueue_media(archive, item) == 0


def test_record_observation_enqueues_new_items_only(archive):
    item = _image_item("i1", "https://cdn.test/i1.jpg")
    sid = archive.resolve_session("s", 1717230000)
    archive.record_observation(item, sid, "env-1", 1717230001)
    assert archive.stats()["pending_media"] == 1
    archive.record_observation(item, sid, "env-2", 1717230002)
    assert archive.stats()["pending_media"] == 1


# -- fetch ---------------------------------------------------------------------


def test_fetch_healthy_assets(archive, media_server):
    urls = [media_server.add(f"/m{i}.jpg", JPEG_BYTES) for i in range(3)]
    for i, url in enumerate(urls):
        enqueue_media(archive, _image_item(f"item{i}", url))
    report = fetch_pending(archive, concurrency=3, max_retries=2, **FAST)
    assert report.to_dict() == {"fetched": 3, "failed": 0, "skipped": 0}
    for asset in archive.assets():
        assert asset.status == FETCHED
        path = archive.root / asset.local_path
        assert path.exists() and path.suffix == ".jpg"
        assert asset.bytes == len(JPEG_BYTES)
        assert asset.content_hash == hashlib.sha256(JPEG_BYTES).hexdigest()
    assert not list((archive.root / "media" / ".tmp").iterdir())


def test_fetch_retries_through_two_failures(archive, media_server):
    url = media_server.add("/flaky.jpg", JPEG_BYTES, fail_times=2)
    enqueue_media(archive, _image_item("flaky", url))
    report = fetch_pending(archive, concurrency=1, max_retries=2, **FAST)
    assert report.fetched == 1 and report.failed == 0
    (asset,) = archive.assets()
    assert asset.attempts == 3


def test_fetch_gives_up_without_retries(archive, media_server):
    enqueue_media(archive, _image_item("gone", media_server.base_url + "/missing.jpg"))
    report = fetch_pending(archive, concurrency=1, max_retries=0, **FAST)
    assert report.failed == 1
    (asset,) = archive.assets()
    assert asset.status == FAILED
    assert asset.attempts == 1
    assert "404" in asset.last_error


def test_fetch_skips_already_fetched(archive, media_server):
    url = media_server.add("/a.jpg", JPEG_BYTES)
    enqueue_media(archive, _image_item("a", url))
    fetch_pending(archive, concurrency=1, max_retries=0, **FAST)
    report = fetch_pending(archive, concurrency=1, max_retries=0, **FAST)
    assert report.to_dict() == {"fetched": 0, "failed": 0, "skipped": 1}


def test_fetch_video_and_poster_extensions(archive, media_server):
    video_url = media_server.add("/v1", MP4_BYTES, content_type="video/mp4")
    poster_url = media_server.add("/p1", JPEG_BYTES, content_type="image/jpeg")
    enqueue_media(archive, _video_item("vid", video_url, poster_url))
    report = fetch_pending(archive, concurrency=2, max_retries=0, **FAST)
    assert report.fetched == 2
    suffixes = sorted((archive.root / asset.local_path).suffix for asset in archive.assets())
    assert suffixes == [".jpg", ".mp4"]


def test_fetch_unknown_content_type_gets_bin(archive, media_server):
    url = media_server.add("/odd", b"odd-bytes", content_type="application/x-thing")
    enqueue_media(archive, _image_item("odd", url))
    fetch_pending(archive, concurrency=1, max_retries=0, **FAST)
    (asset,) = archive.assets()
    assert asset.local_path.endswith(".bin")


def test_report_conservation(archive, media_server):
    ok = media_server.add("/ok.jpg", JPEG_BYTES)
    enqueue_media(archive, _image_item("ok", ok))
    enqueue_media(archive, _image_item("bad", media_server.base_url + "/missing.jpg"))
    report = fetch_pending(archive, concurrency=2, max_retries=0, **FAST)
    assert report.fetched + report.failed + report.skipped == len(archive.assets())
    assert report.fetched == 1 and report.failed == 1


def test_concurrent_fetch_runs_fetch_each_asset_once(archive, media_server):
    urls = [media_server.add(f"/c{i}.jpg", JPEG_BYTES) for i in range(6)]
    for i, url in enumerate(urls):
        enqueue_media(archive, _image_item(f"c{i}", url))

    reports = []

    def run():
        reports.append(fetch_pending(archive, concurrency=2, max_retries=0, **FAST))

    threads = [threading.Thread(target=run) for _ in range(2)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()

    total_fetched = sum(r.fetched for r in reports)
    assert total_fetched == 6
    files = [p for p in (archive.root / "media").iterdir() if p.is_file()]
    assert len(files) == 6
    assert not list((archive.root / "media" / ".tmp").iterdir())
    # media log holds one pending + one final record per asset
    lines = (archive.root / "media.ndjson").read_text().splitlines()
    finals = [json.loads(l) for l in lines if json.loads(l)["status"] != PENDING]
    assert len(finals) == 6


def test_failed_asset_keeps_metadata_after_reopen(tmp_path, media_server):
    from storytide.archive import init_archive

    arc = init_archive(tmp_path / "arc")
    enqueue_media(arc, _image_item("gone", media_server.base_url + "/missing.jpg"))
    fetch_pending(arc, concurrency=1, max_retries=1, **FAST)
    arc.close()
    arc2 = init_archive(tmp_path / "arc")
    (asset,) = arc2.assets()
    assert asset.status == FAILED and asset.attempts == 2
    arc2.close()


# -- verify --------------------------------------------------------------------


def _fetched_archive(archive, media_server):
    urls = [media_server.add(f"/m{i}.jpg", JPEG_BYTES) for i in range(3)]
    for i, url in enumerate(urls):
        enqueue_media(archive, _image_item(f"item{i}", url))
    fetch_pending(archive, concurrency=3, max_retries=0, **FAST)
    return archive


def test_verify_untouched_archive_is_clean(archive, media_server):
    _fetched_archive(archive, media_server)
    assert verify_media(archive) == []


def test_verify_detects_truncation_as_size_mismatch(archive, media_server):
    _fetched_archive(archive, media_server)
    victim = archive.root / archive.assets()[0].local_path
    victim.write_bytes(victim.read_bytes()[:-5])
    (problem,) = verify_media(archive)
    assert problem.problem == "size_mismatch"


def test_verify_detects_bit_flip_as_hash_mismatch(archive, media_server):
    _fetched_archive(archive, media_server)
    victim = archive.root / archive.assets()[0].local_path
    data = bytearray(victim.read_bytes())
    data[10] ^= 0xFF
    victim.write_bytes(bytes(data))
    (problem,) = verify_media(archive)
    assert problem.problem == "hash_mismatch"


def test_verify_detects_missing_file(archive, media_server):
    _fetched_archive(archive, media_server)
    (archive.root / archive.assets()[0].local_path).unlink()
    (problem,) = verify_media(archive)
    assert problem.problem == "missing"
