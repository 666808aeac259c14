"""Capture-rhythm arithmetic: session plans, coverage, overlap, and margin.

A story posted at time ``p`` with lifetime ``L`` is observable during the
half-open window ``[p, p + L)``: visible "for 24 hours" means gone at the
expiry instant. Coverage analysis works on the steady-state interior of a
plan (one interval period suffices, by periodicity), which avoids edge
artifacts at the first and last sessions.
"""
from __future__ import annotations

from dataclasses import dataclass

from .errors import InvalidInterval, PlanTooShort

DEFAULT_LIFETIME_S = 86400


@dataclass(frozen=True)
class SchedulePlan:
    anchor: int
    interval_s: int
    horizon_s: int
    sessions: tuple[int, ...]


@dataclass(frozen=True)
class CoverageReport:
    lifetime_s: int
    min_observations: int
    max_observations: int
    margin_s: int
    single_miss_safe: bool

    def to_dict(self) -> dict:
        return {
            "lifetime_s": self.lifetime_s,
            "min_observations": self.min_observations,
            "max_observations": self.max_observations,
            "margin_s": self.margin_s,
            "single_miss_safe": self.single_miss_safe,
        }


def plan_sessions(anchor: int, interval_s: int, horizon_s: int) -> SchedulePlan:
    """Arithmetic session sequence: anchor + k * interval, within the horizon."""
    if interval_s <= 0:
        raise InvalidInterval("interval must be positive")
    if horizon_s < interval_s:
        raise InvalidInterval("horizon must be at least one interval")
    count = horizon_s // interval_s + 1
    sessions = tuple(anchor + k * interval_s for k in range(count))
    return SchedulePlan(anchor=anchor, interval_s=interval_s, horizon_s=horizon_s, sessions=sessions)


def observing_sessions(posting_time: int, lifetime_s: int, plan: SchedulePlan) -> list[int]:
    """Sessions that fall inside the story's live window [post, post + lifetime)."""
    if lifetime_s <= 0:
        raise InvalidInterval("lifetime must be positive")
    return [t for t in plan.sessions if posting_time <= t < posting_time + lifetime_s]


def coverage_report(plan: SchedulePlan, lifetime_s: int = DEFAULT_LIFETIME_S) -> CoverageReport:
    """Exact min/max observation counts over all steady-state posting times.

    With sessions every ``I`` seconds and lifetime ``L``, a posting at offset
    ``x`` past a session sees ``ceil((x + L) / I) - ceil(x / I)`` sessions, so
    counts take only the values ``floor(L / I)`` and ``ceil(L / I)``.
    """
    if len(plan.sessions) < 2:
        raise PlanTooShort("coverage analysis needs at least two sessions")
    if lifetime_s <= 0:
        raise InvalidInterval("lifetime must be positive")
    interval = plan.interval_s
    q, r = divmod(lifetime_s, interval)
    return CoverageReport(
        lifetime_s=lifetime_s,
        min_observations=q,
        max_observations=q if r == 0 else q + 1,
        margin_s=lifetime_s - interval,
        single_miss_safe=2 * interval <= lifetime_s,
    )


def expected_observations(plan: SchedulePlan, lifetime_s: int) -> float:
    """Mean observation count for uniformly distributed posting times."""
    if lifetime_s <= 0:
        raise InvalidInterval("lifetime must be positive")
    return lifetime_s / plan.interval_s
