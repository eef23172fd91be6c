"""Event cluster summaries."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass

import numpy as np

__all__ = ["DROP_REASONS", "EventCluster", "DroppedCluster", "t80_interval"]

DROP_REASONS = (
    "too_few_records",
    "too_few_users",
    "single_user_dominates",
    "blacklisted",
)


def t80_interval(timestamps, coverage=0.8) -> float:
    """Length of the shortest interval covering a share of the timestamps."""
    ts = np.sort(np.asarray(timestamps, dtype=float))
    if ts.size == 0:
        return 0.0
    k = max(1, math.ceil(coverage * ts.size - 1e-9))
    return float(np.min(ts[k - 1 :] - ts[: ts.size - k + 1]))


def top_terms(records, limit=10) -> tuple:
    """Most frequent terms within records; ties broken alphabetically."""
    counts = Counter()
    for rec in records:
        counts.update(rec.tokens or ())
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return tuple(term for term, _ in ranked[:limit])


@dataclass(frozen=True)
class EventCluster:
    """A retained cluster with summary columns."""

    id: int
    record_ids: tuple
    n_users: int
    median_timestamp: float
    t80_interval: float
    centroid: tuple
    top_terms: tuple

    @classmethod
    def summarize(cls, id, records) -> EventCluster:
        ts = [r.timestamp for r in records]
        return cls(
            id=int(id),
            record_ids=tuple(sorted(r.id for r in records)),
            n_users=len({r.user for r in records}),
            median_timestamp=float(np.median(ts)),
            t80_interval=t80_interval(ts),
            centroid=(
                float(np.mean([r.lat for r in records])),
                float(np.mean([r.lon for r in records])),
            ),
            top_terms=top_terms(records),
        )

    @property
    def size(self) -> int:
        return len(self.record_ids)

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "size": self.size,
            "n_users": self.n_users,
            "median_timestamp": self.median_timestamp,
            "t80_interval": self.t80_interval,
            "centroid": list(self.centroid),
            "top_terms": list(self.top_terms),
            "record_ids": list(self.record_ids),
        }


@dataclass(frozen=True)
class DroppedCluster:
    record_ids: tuple
    reason: str

    def __post_init__(self) -> None:
        if self.reason not in DROP_REASONS:
            raise ValueError(f"invalid 'reason': {self.reason!r}")

    def to_dict(self) -> dict:
        return {"reason": self.reason, "record_ids": list(self.record_ids)}
