"""Shared fixtures: corpus paths, frozen counts, archives, a fault-injecting
media server, and the acceptance summary hook."""
from __future__ import annotations

import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

import pytest

from storytide.archive import init_archive
from storytide.envelope import Envelope
from storytide.patterns import PatternTable

REPO = Path(__file__).resolve().parents[1]
FIXTURES = REPO / "fixtures"

# Frozen corpus counts, fixed when the fixtures were authored and re-checked
# by scripts/count_fixtures.py (a parser-independent walker).
REELS_USERS = 3
REELS_ITEMS = 7
REELS_STICKER_NODES = 9
REELS_POLLS = 1
REELS_MENTIONS = 1
REELS_HASHTAGS = 1
VIDEO_ITEMS = 1
HIGHLIGHT_ITEMS = 3
TRAY_USERS = 5
STREAM_ENVELOPES = 6
STREAM_ITEMS = REELS_ITEMS + VIDEO_ITEMS + HIGHLIGHT_ITEMS  # 11
STREAM_REJECTED = 1
# best primary per item + one poster per video (reels: 2 videos, video fixture: 1,
# highlight: 1) = 11 + 4
STREAM_MEDIA_ASSETS = 15


def fixture_text(name: str) -> str:
    return (FIXTURES / name).read_text(encoding="utf-8")


def make_envelope(
    body: str,
    url: str = "https://i.example-api.test/api/v1/feed/reels_media/?reel_ids=1",
    envelope_id: str = "env-test-0001",
    captured_at: int = 1717260000,
    session_id: str | None = "t-session",
    status: int = 200,
    method: str = "GET",
) -> Envelope:
    return Envelope(
        envelope_id=envelope_id,
        source_url=url,
        method=method,
        status=status,
        captured_at=captured_at,
        body=body,
        session_id=session_id,
    )


@pytest.fixture()
def table() -> PatternTable:
    return PatternTable.default()


@pytest.fixture()
def archive(tmp_path):
    arc = init_archive(tmp_path / "archive")
    yield arc
    arc.close()


class _MediaHandler(BaseHTTPRequestHandler):
    def do_GET(self):
        server = self.server
        with server.state_lock:
            route = server.routes.get(self.path)
            if route is None:
                self.send_response(404)
                self.end_headers()
                return
            if route.get("fail", 0) > 0:
                route["fail"] -= 1
                self.send_response(500)
                self.end_headers()
                return
            body = route["data"]
            content_type = route.get("content_type", "application/octet-stream")
        self.send_response(200)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def log_message(self, *args):  # keep pytest output clean
        pass


class MediaServer:
    """Local HTTP server with per-path failure injection for download tests."""

    def __init__(self):
        self.server = ThreadingHTTPServer(("127.0.0.1", 0), _MediaHandler)
        self.server.routes = {}
        self.server.state_lock = threading.Lock()
        self.thread = threading.Thread(target=self.server.serve_forever, daemon=True)
        self.thread.start()

    @property
    def base_url(self) -> str:
        host, port = self.server.server_address
        return f"http://{host}:{port}"

    def add(self, path: str, data: bytes, content_type="image/jpeg", fail_times=0) -> str:
        with self.server.state_lock:
            self.server.routes[path] = {
                "data": data,
                "content_type": content_type,
                "fail": fail_times,
            }
        return self.base_url + path

    def stop(self):
        self.server.shutdown()
        self.server.server_close()


@pytest.fixture()
def media_server():
    server = MediaServer()
    yield server
    server.stop()


def load_stream_envelopes() -> list[Envelope]:
    from storytide.envelope import envelope_from_json_line

    lines = fixture_text("fx_stream.ndjson").splitlines()
    out = []
    for line in lines:
        try:
            out.append(envelope_from_json_line(line))
        except ValueError:
            pass
    return out


# -- acceptance reporting ----------------------------------------------------

_acceptance_results: list[tuple[str, str]] = []


def pytest_runtest_logreport(report):
    if report.when != "call" or "test_acceptance" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    _acceptance_results.append((name, "PASS" if report.passed else "FAIL"))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance_results:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for name, outcome in _acceptance_results:
        terminalreporter.write_line(f"[{outcome}] {name}")
