"""Turns classified payload documents into story items.

The canonical payload shape is "story payload schema v1", documented in
``docs/payload-schema.md`` and exercised by the fixture corpus. Parsing is
strict: a document that deviates raises :class:`ParseError` naming the first
offending node, and the caller quarantines the whole envelope.
"""
from __future__ import annotations

import json
from dataclasses import replace

from .errors import EmptyCandidates, ParseError
from .items import (
    HIGHLIGHT,
    IMAGE,
    LIVE,
    POSTER,
    PRIMARY,
    STORY_LIFETIME_S,
    VIDEO,
    Countdown,
    Hashtag,
    Link,
    Location,
    MediaRef,
    Mention,
    Music,
    Poll,
    PollOption,
    Question,
    Slider,
    StoryItem,
    TrayEntry,
)

# Item keys holding sticker arrays, and how to decode one node from each.
# Any other list-valued item key named "story_*" or "reel_mentions" is an
# unknown sticker array and is preserved raw instead of being dropped.
_STICKER_KEYS = (
    "story_polls",
    "story_questions",
    "reel_mentions",
    "story_hashtags",
    "story_link_stickers",
    "story_locations",
    "story_sliders",
    "story_countdowns",
    "story_music_stickers",
)


def _load_document(body) -> dict:
    if isinstance(body, dict):
        return body
    try:
        doc = json.loads(body)
    except (json.JSONDecodeError, TypeError) as exc:
        raise ParseError(f"body is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ParseError("payload document must be a JSON object")
    return doc


def _get(node: dict, key: str, path: str):
    if not isinstance(node, dict) or key not in node:
        raise ParseError("missing field", f"{path}.{key}")
    return node[key]


def _get_str(node: dict, key: str, path: str) -> str:
    value = _get(node, key, path)
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return str(value)
    if not isinstance(value, str) or not value:
        raise ParseError("expected a non-empty string", f"{path}.{key}")
    return value


def _get_int(node: dict, key: str, path: str) -> int:
    value = _get(node, key, path)
    if isinstance(value, bool) or not isinstance(value, int):
        raise ParseError("expected an integer", f"{path}.{key}")
    return value


def _get_list(node: dict, key: str, path: str) -> list:
    value = _get(node, key, path)
    if not isinstance(value, list):
        raise ParseError("expected a list", f"{path}.{key}")
    return value


def select_best_media(candidates: list[MediaRef]) -> MediaRef:
    """Pick the candidate maximizing pixel area; first occurrence wins ties."""
    if not candidates:
        raise EmptyCandidates("no media candidates to choose from")
    best = max(candidates, key=lambda ref: ref.area)  # max() keeps the first tie
    return replace(best, best=True)


def _media_candidates(nodes: list, path: str, role: str) -> list[MediaRef]:
    refs = []
    for i, node in enumerate(nodes):
        node_path = f"{path}[{i}]"
        url = _get_str(node, "url", node_path)
        width = _get_int(node, "width", node_path)
        height = _get_int(node, "height", node_path)
        try:
            refs.append(MediaRef(url=url, width=width, height=height, role=role))
        except ValueError as exc:
            raise ParseError(str(exc), node_path) from exc
    return refs


def _parse_poll(node: dict, path: str) -> Poll:
    sticker = _get(node, "poll_sticker", path)
    question = _get_str(sticker, "question", f"{path}.poll_sticker")
    tallies = _get_list(sticker, "tallies", f"{path}.poll_sticker")
    options = []
    for i, tally in enumerate(tallies):
        tally_path = f"{path}.poll_sticker.tallies[{i}]"
        text = _get_str(tally, "text", tally_path)
        count = tally.get("count")
        if count is not None and (isinstance(count, bool) or not isinstance(count, int)):
            raise ParseError("expected an integer", f"{tally_path}.count")
        options.append(PollOption(text=text, count=count))
    try:
        return Poll(question=question, options=tuple(options))
    except ValueError as exc:
        raise ParseError(str(exc), path) from exc


def _parse_sticker(key: str, node: dict, path: str):
    if key == "story_polls":
        return _parse_poll(node, path)
    if key == "story_questions":
        sticker = _get(node, "question_sticker", path)
        return Question(prompt=_get_str(sticker, "question", f"{path}.question_sticker"))
    if key == "reel_mentions":
        user = _get(node, "user", path)
        return Mention(username=_get_str(user, "username", f"{path}.user"))
    if key == "story_hashtags":
        tag = _get_str(_get(node, "hashtag", path), "name", f"{path}.hashtag")
        return Hashtag(tag=tag.lstrip("#"))
    if key == "story_link_stickers":
        sticker = _get(node, "link_sticker", path)
        title = sticker.get("link_title")
        return Link(url=_get_str(sticker, "url", f"{path}.link_sticker"), title=title)
    if key == "story_locations":
        location = _get(node, "location", path)
        return Location(
            name=_get_str(location, "name", f"{path}.location"),
            location_id=_get_str(location, "pk", f"{path}.location"),
        )
    if key == "story_sliders":
        sticker = _get(node, "slider_sticker", path)
        return Slider(
            question=_get_str(sticker, "question", f"{path}.slider_sticker"),
            emoji=_get_str(sticker, "emoji", f"{path}.slider_sticker"),
        )
    if key == "story_countdowns":
        sticker = _get(node, "countdown_sticker", path)
        return Countdown(
            text=_get_str(sticker, "text", f"{path}.countdown_sticker"),
            end_time=_get_int(sticker, "end_ts", f"{path}.countdown_sticker"),
        )
    if key == "story_music_stickers":
        sticker = _get(node, "music_sticker", path)
        return Music(
            artist=_get_str(sticker, "artist", f"{path}.music_sticker"),
            title=_get_str(sticker, "title", f"{path}.music_sticker"),
        )
    raise ParseError(f"no decoder for sticker key {key!r}", path)


def _extract_stickers(item_node: dict, path: str):
    stickers = []
    unknown = []
    for key, value in item_node.items():
        is_sticker_array = key == "reel_mentions" or key.startswith("story_")
        if not is_sticker_array or not isinstance(value, list):
            continue
        for i, node in enumerate(value):
            node_path = f"{path}.{key}[{i}]"
            if key in _STICKER_KEYS:
                stickers.append(_parse_sticker(key, node, node_path))
            else:
                unknown.append({"key": key, "node": node})
    return tuple(stickers), tuple(unknown)


def _parse_item(
    item_node: dict,
    author_id: str,
    author_username: str,
    path: str,
    origin: str = LIVE,
    highlight_id: str | None = None,
) -> StoryItem:
    item_id = _get_str(item_node, "pk", path)
    taken_at = _get_int(item_node, "taken_at", path)
    if taken_at <= 0:
        raise ParseError("taken_at must be positive", f"{path}.taken_at")

    if origin == HIGHLIGHT:
        # Highlights outlive the 24 h story window; keep lifecycle semantics by
        # pinning expiry to one lifetime after posting, whatever the payload says.
        expiring_at = taken_at + STORY_LIFETIME_S
    elif "expiring_at" in item_node:
        expiring_at = _get_int(item_node, "expiring_at", path)
    else:
        expiring_at = taken_at + STORY_LIFETIME_S

    media_type = _get_int(item_node, "media_type", path)
    if media_type == 1:
        media_kind = IMAGE
    elif media_type == 2:
        media_kind = VIDEO
    else:
        raise ParseError(f"unknown media_type {media_type}", f"{path}.media_type")

    image_candidates: list[MediaRef] = []
    if "image_versions2" in item_node:
        image_nodes = _get_list(
            _get(item_node, "image_versions2", path), "candidates", f"{path}.image_versions2"
        )
        role = PRIMARY if media_kind == IMAGE else POSTER
        image_candidates = _media_candidates(
            image_nodes, f"{path}.image_versions2.candidates", role
        )

    duration_s = 0.0
    if media_kind == IMAGE:
        if not image_candidates:
            raise ParseError("image item has no image candidates", path)
        primaries = image_candidates
        media = tuple(primaries)
    else:
        video_nodes = _get_list(item_node, "video_versions", path)
        primaries = _media_candidates(video_nodes, f"{path}.video_versions", PRIMARY)
        if not primaries:
            raise ParseError("video item has no video versions", f"{path}.video_versions")
        duration = _get(item_node, "video_duration", path)
        if isinstance(duration, bool) or not isinstance(duration, (int, float)) or duration <= 0:
            raise ParseError("video_duration must be a positive number", f"{path}.video_duration")
        duration_s = float(duration)
        media = tuple(primaries)
        if image_candidates:
            # Keep a single poster: the largest still variant.
            poster = select_best_media(image_candidates)
            media = media + (replace(poster, best=False),)

    # Flag exactly one best ref: the first primary with maximal area.
    best = select_best_media(primaries)
    flagged = []
    marked = False
    for ref in media:
        if not marked and ref == replace(best, best=False):
            flagged.append(replace(ref, best=True))
            marked = True
        else:
            flagged.append(ref)

    caption_node = item_node.get("caption")
    caption = None
    if caption_node is not None:
        caption = _get_str(caption_node, "text", f"{path}.caption")

    stickers, unknown = _extract_stickers(item_node, path)

    try:
        return StoryItem(
            item_id=item_id,
            author_id=author_id,
            author_username=author_username,
            taken_at=taken_at,
            expiring_at=expiring_at,
            media_kind=media_kind,
            media=tuple(flagged),
            duration_s=duration_s,
            caption=caption,
            stickers=stickers,
            origin=origin,
            highlight_id=highlight_id,
            unknown_stickers=unknown,
        )
    except ValueError as exc:
        raise ParseError(str(exc), path) from exc


def _parse_user(node: dict, path: str) -> tuple[str, str]:
    user = _get(node, "user", path)
    return _get_str(user, "pk", f"{path}.user"), _get_str(user, "username", f"{path}.user")


def parse_reel_payload(body, captured_at: int) -> list[StoryItem]:
    """Parse a reel-media response into live story items, one per reel item."""
    doc = _load_document(body)
    reels = _get_list(doc, "reels_media", "$")
    items = []
    for r, reel in enumerate(reels):
        reel_path = f"reels_media[{r}]"
        author_id, author_username = _parse_user(reel, reel_path)
        for i, node in enumerate(_get_list(reel, "items", reel_path)):
            items.append(
                _parse_item(node, author_id, author_username, f"{reel_path}.items[{i}]")
            )
    return items


def parse_highlight_payload(body, captured_at: int) -> list[StoryItem]:
    """Parse a highlight-tray response into highlight-origin story items."""
    doc = _load_document(body)
    tray = _get_list(doc, "tray", "$")
    items = []
    for h, entry in enumerate(tray):
        entry_path = f"tray[{h}]"
        highlight_id = _get_str(entry, "id", entry_path)
        author_id, author_username = _parse_user(entry, entry_path)
        for i, node in enumerate(_get_list(entry, "items", entry_path)):
            items.append(
                _parse_item(
                    node,
                    author_id,
                    author_username,
                    f"{entry_path}.items[{i}]",
                    origin=HIGHLIGHT,
                    highlight_id=highlight_id,
                )
            )
    return items


def parse_tray_payload(body) -> list[TrayEntry]:
    """Parse a story-tray response: who currently has active stories."""
    doc = _load_document(body)
    entries = []
    for t, node in enumerate(_get_list(doc, "tray", "$")):
        entry_path = f"tray[{t}]"
        author_id, author_username = _parse_user(node, entry_path)
        latest = _get_int(node, "latest_reel_media", entry_path)
        hint = node.get("media_count")
        if hint is not None and (isinstance(hint, bool) or not isinstance(hint, int)):
            raise ParseError("expected an integer", f"{entry_path}.media_count")
        try:
            entries.append(
                TrayEntry(
                    author_id=author_id,
                    author_username=author_username,
                    latest_item_taken_at=latest,
                    item_count_hint=hint,
                )
            )
        except ValueError as exc:
            raise ParseError(str(exc), entry_path) from exc
    return entries
