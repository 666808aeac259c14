"""Story items, their media variants, and interactive sticker overlays.

Stickers are a tagged union; kinds the parser does not recognise are kept
verbatim in ``StoryItem.unknown_stickers`` so schema drift never loses data.
"""
from __future__ import annotations

from dataclasses import dataclass, fields

IMAGE = "image"
VIDEO = "video"
LIVE = "live"
HIGHLIGHT = "highlight"
PRIMARY = "primary"
POSTER = "poster"

STORY_LIFETIME_S = 86400  # typical lifespan of a live story


@dataclass(frozen=True)
class MediaRef:
    url: str
    width: int
    height: int
    role: str = PRIMARY
    best: bool = False

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise ValueError("media dimensions must be positive")

    @property
    def area(self) -> int:
        return self.width * self.height

    def to_dict(self) -> dict:
        return {
            "url": self.url,
            "width": self.width,
            "height": self.height,
            "role": self.role,
            "best": self.best,
        }


@dataclass(frozen=True)
class PollOption:
    text: str
    count: int | None = None  # live payloads may omit tallies pre-vote


@dataclass(frozen=True)
class Poll:
    question: str
    options: tuple[PollOption, ...]

    def __post_init__(self):
        if len(self.options) < 2:
            raise ValueError("poll needs at least two options")


@dataclass(frozen=True)
class Question:
    prompt: str


@dataclass(frozen=True)
class Mention:
    username: str


@dataclass(frozen=True)
class Hashtag:
    tag: str  # stored without the leading '#'

    def __post_init__(self):
        if self.tag.startswith("#"):
            raise ValueError("hashtag must be stored without the leading '#'")


@dataclass(frozen=True)
class Link:
    url: str
    title: str | None = None


@dataclass(frozen=True)
class Location:
    name: str
    location_id: str


@dataclass(frozen=True)
class Slider:
    question: str
    emoji: str


@dataclass(frozen=True)
class Countdown:
    text: str
    end_time: int


@dataclass(frozen=True)
class Music:
    artist: str
    title: str


Sticker = Poll | Question | Mention | Hashtag | Link | Location | Slider | Countdown | Music

_KIND_BY_CLASS = {
    Poll: "poll",
    Question: "question",
    Mention: "mention",
    Hashtag: "hashtag",
    Link: "link",
    Location: "location",
    Slider: "slider",
    Countdown: "countdown",
    Music: "music",
}
_CLASS_BY_KIND = {kind: cls for cls, kind in _KIND_BY_CLASS.items()}


def sticker_kind(sticker: Sticker) -> str:
    return _KIND_BY_CLASS[type(sticker)]


def sticker_to_dict(sticker: Sticker) -> dict:
    doc = {"kind": sticker_kind(sticker)}
    if isinstance(sticker, Poll):
        doc["question"] = sticker.question
        doc["options"] = [{"text": o.text, "count": o.count} for o in sticker.options]
    else:
        for f in fields(sticker):
            doc[f.name] = getattr(sticker, f.name)
    return doc


def sticker_from_dict(doc: dict) -> Sticker:
    kind = doc["kind"]
    cls = _CLASS_BY_KIND[kind]
    if cls is Poll:
        options = tuple(PollOption(o["text"], o.get("count")) for o in doc["options"])
        return Poll(question=doc["question"], options=options)
    kwargs = {f.name: doc[f.name] for f in fields(cls)}
    return cls(**kwargs)


@dataclass(frozen=True)
class StoryItem:
    item_id: str
    author_id: str
    author_username: str
    taken_at: int
    expiring_at: int
    media_kind: str  # IMAGE | VIDEO
    media: tuple[MediaRef, ...]
    duration_s: float = 0.0
    caption: str | None = None
    stickers: tuple[Sticker, ...] = ()
    origin: str = LIVE  # LIVE | HIGHLIGHT
    highlight_id: str | None = None
    unknown_stickers: tuple[dict, ...] = ()

    def __post_init__(self):
        if self.expiring_at <= self.taken_at:
            raise ValueError("expiring_at must be after taken_at")
        if (self.origin == HIGHLIGHT) != (self.highlight_id is not None):
            raise ValueError("highlight origin and highlight_id must come together")
        if not self.media:
            raise ValueError("item needs at least one media ref")
        if sum(1 for ref in self.media if ref.best) != 1:
            raise ValueError("exactly one media ref must be flagged best")
        if self.media_kind == VIDEO and self.duration_s <= 0:
            raise ValueError("video items need a positive duration")

    @property
    def best_media(self) -> MediaRef:
        return next(ref for ref in self.media if ref.best)

    @property
    def poster(self) -> MediaRef | None:
        return next((ref for ref in self.media if ref.role == POSTER), None)

    def to_dict(self) -> dict:
        return {
            "item_id": self.item_id,
            "author_id": self.author_id,
            "author_username": self.author_username,
            "taken_at": self.taken_at,
            "expiring_at": self.expiring_at,
            "media_kind": self.media_kind,
            "media": [ref.to_dict() for ref in self.media],
            "duration_s": self.duration_s,
            "caption": self.caption,
            "stickers": [sticker_to_dict(s) for s in self.stickers],
            "origin": self.origin,
            "highlight_id": self.highlight_id,
            "unknown_stickers": list(self.unknown_stickers),
        }


def item_from_dict(doc: dict) -> StoryItem:
    media = tuple(
        MediaRef(m["url"], m["width"], m["height"], m["role"], m["best"])
        for m in doc["media"]
    )
    return StoryItem(
        item_id=doc["item_id"],
        author_id=doc["author_id"],
        author_username=doc["author_username"],
        taken_at=doc["taken_at"],
        expiring_at=doc["expiring_at"],
        media_kind=doc["media_kind"],
        media=media,
        duration_s=doc["duration_s"],
        caption=doc.get("caption"),
        stickers=tuple(sticker_from_dict(s) for s in doc["stickers"]),
        origin=doc["origin"],
        highlight_id=doc.get("highlight_id"),
        unknown_stickers=tuple(doc.get("unknown_stickers", ())),
    )


def media_targets(item: StoryItem) -> list[MediaRef]:
    """Refs worth downloading: the best primary, plus the poster for videos."""
    targets = [item.best_media]
    poster = item.poster
    if poster is not None and item.media_kind == VIDEO:
        targets.append(poster)
    return targets


@dataclass(frozen=True)
class TrayEntry:
    """One account announced by a tray payload as having active stories."""

    author_id: str
    author_username: str
    latest_item_taken_at: int
    item_count_hint: int | None = None

    def __post_init__(self):
        if not self.author_id:
            raise ValueError("tray entry needs an author_id")

    def to_dict(self) -> dict:
        return {
            "author_id": self.author_id,
            "author_username": self.author_username,
            "latest_item_taken_at": self.latest_item_taken_at,
            "item_count_hint": self.item_count_hint,
        }
