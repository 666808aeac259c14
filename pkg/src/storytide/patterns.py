"""Endpoint classification: deciding which captured URLs carry story payloads.

Classification is table-driven so deployments can follow endpoint drift by
editing a config file instead of patching code. The default table below is a
reconstruction of the platform's story endpoints, not an authoritative list.
"""
from __future__ import annotations

import enum
import json
import re
from dataclasses import dataclass
from pathlib import Path


class EndpointKind(enum.Enum):
    STORY_TRAY = "story_tray"
    REEL_MEDIA = "reel_media"
    HIGHLIGHT = "highlight"
    UNRELATED = "unrelated"


DEFAULT_PATTERNS = (
    (r"^https://[^/]+/api/v1/feed/reels_tray/", EndpointKind.STORY_TRAY),
    (r"^https://[^/]+/api/v1/feed/reels_media/", EndpointKind.REEL_MEDIA),
    (r"^https://[^/]+/api/v1/highlights/.*", EndpointKind.HIGHLIGHT),
)


@dataclass(frozen=True)
class PatternTable:
    """Ordered (anchored regex, kind) pairs; the first matching pattern wins."""

    rules: tuple[tuple[re.Pattern, EndpointKind], ...]

    @classmethod
    def from_pairs(cls, pairs) -> "PatternTable":
        table = cls(tuple((re.compile(pattern), kind) for pattern, kind in pairs))
        table.validate()
        return table

    @classmethod
    def default(cls) -> "PatternTable":
        return cls.from_pairs(DEFAULT_PATTERNS)

    @classmethod
    def from_file(cls, path) -> "PatternTable":
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
        pairs = [(rule["pattern"], EndpointKind(rule["kind"])) for rule in doc["patterns"]]
        return cls.from_pairs(pairs)

    def validate(self) -> None:
        """Every non-unrelated kind needs at least one pattern."""
        covered = {kind for _, kind in self.rules}
        missing = (set(EndpointKind) - {EndpointKind.UNRELATED}) - covered
        if missing:
            names = ", ".join(sorted(kind.value for kind in missing))
            raise ValueError(f"pattern table lacks rules for: {names}")

    def classify(self, url: str) -> EndpointKind:
        for pattern, kind in self.rules:
            if pattern.match(url):
                return kind
        return EndpointKind.UNRELATED


def classify_endpoint(url: str, table: PatternTable) -> EndpointKind:
    """Map a URL to its endpoint kind; anything unmatched is UNRELATED, never an error."""
    return table.classify(url)
