#!/usr/bin/env python3
"""Regenerate the envelope-stream fixtures (NDJSON + HAR) from the payload
fixtures. Deterministic: running it twice produces identical bytes. The
wrapped files are committed; run this only after editing a payload fixture.

Usage: python scripts/build_stream_fixtures.py
"""
import json
from pathlib import Path

FIXTURES = Path(__file__).resolve().parents[1] / "fixtures"

SESSION = "fx-am"
API = "https://i.example-api.test/api/v1"


def envelope(envelope_id, url, captured_at, body, status=200, method="GET"):
    return {
        "envelope_id": envelope_id,
        "source_url": url,
        "method": method,
        "status": status,
        "captured_at": captured_at,
        "session_id": SESSION,
        "body": body,
    }


def main():
    reels = (FIXTURES / "fx_reels_3users.json").read_text(encoding="utf-8")
    video = (FIXTURES / "fx_video_item.json").read_text(encoding="utf-8")
    highlight = (FIXTURES / "fx_highlight_tray.json").read_text(encoding="utf-8")
    tray = (FIXTURES / "fx_tray.json").read_text(encoding="utf-8")
    malformed = (FIXTURES / "fx_malformed.json").read_text(encoding="utf-8")

    envelopes = [
        envelope(
            "env-reels-0001",
            f"{API}/feed/reels_media/?reel_ids=8021%2C8022%2C8023",
            1717252000,
            reels,
        ),
        envelope(
            "env-video-0002",
            f"{API}/feed/reels_media/?reel_ids=8031",
            1717255500,
            video,
        ),
        envelope(
            "env-highlight-0003",
            f"{API}/highlights/8021/highlights_tray/",
            1717256000,
            highlight,
        ),
        envelope(
            "env-tray-0004",
            f"{API}/feed/reels_tray/",
            1717256100,
            tray,
        ),
        envelope(
            "env-unrelated-0005",
            f"{API}/accounts/current_user/",
            1717256200,
            "{}",
        ),
        envelope(
            "env-badbody-0006",
            f"{API}/feed/reels_media/?reel_ids=9999",
            1717256300,
            malformed,
        ),
    ]

    def dump_lines(path, items):
        text = "".join(json.dumps(e, ensure_ascii=False, sort_keys=True) + "\n" for e in items)
        path.write_text(text, encoding="utf-8")
        print(f"wrote {path} ({len(items)} envelopes)")

    dump_lines(FIXTURES / "fx_stream.ndjson", envelopes)
    dump_lines(FIXTURES / "fx_reels_3users.ndjson", envelopes[:1])

    har = {
        "log": {
            "version": "1.2",
            "creator": {"name": "storytide-fixtures", "version": "1"},
            "entries": [
                {
                    "startedDateTime": "2024-06-01T14:26:40.000Z",
                    "request": {
                        "method": "GET",
                        "url": f"{API}/feed/reels_media/?reel_ids=8021%2C8022%2C8023",
                    },
                    "response": {
                        "status": 200,
                        "content": {"mimeType": "application/json", "text": reels},
                    },
                },
                {
                    "startedDateTime": "2024-06-01T14:26:45.000Z",
                    "request": {"method": "GET", "url": f"{API}/feed/reels_media/?reel_ids=9998"},
                    "response": {"status": 204, "content": {}},
                },
                {
                    "startedDateTime": "2024-06-01T14:26:50.000Z",
                    "request": {"method": "GET", "url": "https://static.example.test/app.js"},
                    "response": {
                        "status": 200,
                        "content": {"mimeType": "text/javascript", "text": "console.log(1);"},
                    },
                },
            ],
        }
    }
    out = FIXTURES / "fx_capture.har"
    out.write_text(json.dumps(har, ensure_ascii=False, indent=2) + "\n", encoding="utf-8")
    print(f"wrote {out} ({len(har['log']['entries'])} entries)")


if __name__ == "__main__":
    main()
