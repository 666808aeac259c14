#!/usr/bin/env python3
"""Independent fixture counter: walks the payload fixtures structurally and
prints item/sticker counts as JSON. Deliberately shares no code with the
package parser, so the two can check each other.

Usage: python scripts/count_fixtures.py
"""
import json
from pathlib import Path

FIXTURES = Path(__file__).resolve().parents[1] / "fixtures"


def sticker_arrays(item):
    for key, value in item.items():
        if (key == "reel_mentions" or key.startswith("story_")) and isinstance(value, list):
            yield key, value


def count_items_doc(doc, container_key):
    users = doc[container_key]
    items = [item for entry in users for item in entry["items"]]
    stickers = {}
    for item in items:
        for key, nodes in sticker_arrays(item):
            stickers[key] = stickers.get(key, 0) + len(nodes)
    return {
        "entries": len(users),
        "items": len(items),
        "sticker_nodes": sum(stickers.values()),
        "stickers_by_key": dict(sorted(stickers.items())),
    }


def main():
    counts = {}
    for name, key in (
        ("fx_reels_3users.json", "reels_media"),
        ("fx_video_item.json", "reels_media"),
        ("fx_highlight_tray.json", "tray"),
    ):
        doc = json.loads((FIXTURES / name).read_text(encoding="utf-8"))
        counts[name] = count_items_doc(doc, key)
    tray = json.loads((FIXTURES / "fx_tray.json").read_text(encoding="utf-8"))
    counts["fx_tray.json"] = {
        "entries": len(tray["tray"]),
        "without_count_hint": sum(1 for e in tray["tray"] if "media_count" not in e),
    }
    print(json.dumps(counts, indent=2, sort_keys=True))


if __name__ == "__main__":
    main()
