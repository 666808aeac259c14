"""Report figures rendered to files next to the delimited output.

Everything here uses the Agg backend; nothing ever opens a window.
"""
from __future__ import annotations

from collections import Counter
from datetime import datetime, timezone
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .archive import Archive  # noqa: E402
from .items import sticker_kind  # noqa: E402
from .tides import SchedulePlan, coverage_report  # noqa: E402


def _ceil_div(a: int, b: int) -> int:
    return -(-a // b)


def coverage_figure(plan: SchedulePlan, lifetime_s: int, path) -> Path:
    """Observation count as a function of posting offset within one interval."""
    report = coverage_report(plan, lifetime_s)
    interval = plan.interval_s
    step = max(1, interval // 4000)
    offsets = list(range(0, interval, step))
    counts = [
        _ceil_div(x + lifetime_s, interval) - _ceil_div(x, interval) for x in offsets
    ]

    fig, ax = plt.subplots(figsize=(8, 4))
    hours = [x / 3600 for x in offsets]
    ax.step(hours, counts, where="post", color="#1f6f8b", linewidth=1.8)
    ax.axhline(report.min_observations, color="#c0392b", linestyle="--", linewidth=1,
               label=f"min = {report.min_observations}")
    ax.axhline(report.max_observations, color="#27ae60", linestyle=":", linewidth=1,
               label=f"max = {report.max_observations}")
    ax.set_xlabel("posting offset after a session (hours)")
    ax.set_ylabel("sessions observing the story")
    ax.set_ylim(bottom=-0.2)
    ax.set_title(
        f"Coverage: interval {interval / 3600:g} h, lifetime {lifetime_s / 3600:g} h, "
        f"margin {report.margin_s / 3600:g} h"
    )
    ax.legend(loc="best", frameon=False)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def archive_figures(archive: Archive, out_dir, stem: str = "stories") -> list[Path]:
    """Summary figures for an export: volume per author, per day, per sticker kind."""
    items = archive.list_items()
    if not items:
        return []
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []

    per_author = Counter(item.author_username for item in items)
    authors, counts = zip(*per_author.most_common(20))
    fig, ax = plt.subplots(figsize=(8, 4))
    ax.barh(range(len(authors)), counts, color="#1f6f8b")
    ax.set_yticks(range(len(authors)))
    ax.set_yticklabels(authors)
    ax.invert_yaxis()
    ax.set_xlabel("story items")
    ax.set_title("Items per author")
    fig.tight_layout()
    path = out_dir / f"{stem}_authors.png"
    fig.savefig(path, dpi=120)
    plt.close(fig)
    written.append(path)

    per_day = Counter(
        datetime.fromtimestamp(item.taken_at, tz=timezone.utc).date() for item in items
    )
    days = sorted(per_day)
    fig, ax = plt.subplots(figsize=(8, 4))
    ax.bar(range(len(days)), [per_day[d] for d in days], color="#1f6f8b")
    ax.set_xticks(range(len(days)))
    ax.set_xticklabels([d.isoformat() for d in days], rotation=45, ha="right")
    ax.set_ylabel("story items")
    ax.set_title("Items per day (posting time, UTC)")
    fig.tight_layout()
    path = out_dir / f"{stem}_timeline.png"
    fig.savefig(path, dpi=120)
    plt.close(fig)
    written.append(path)

    kinds = Counter(sticker_kind(s) for item in items for s in item.stickers)
    if kinds:
        names = sorted(kinds)
        fig, ax = plt.subplots(figsize=(8, 4))
        ax.bar(names, [kinds[n] for n in names], color="#1f6f8b")
        ax.set_ylabel("stickers")
        ax.set_title("Interactive sticker kinds")
        fig.tight_layout()
        path = out_dir / f"{stem}_stickers.png"
        fig.savefig(path, dpi=120)
        plt.close(fig)
        written.append(path)

    return written
