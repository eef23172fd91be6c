"""Records, bounding boxes and analysis windows."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .._logger import logger
from .base import CorpusError

__all__ = ["Record", "BoundingBox", "TimeWindow", "validate_corpus"]

DAY = 86400.0


@dataclass(frozen=True)
class Record:
    """One geotagged, timestamped short text.

    ``tokens`` is None until the record has been tokenized.
    """

    id: str
    user: str
    timestamp: float
    lat: float
    lon: float
    text: str
    tokens: tuple | None = None

    def with_tokens(self, tokens) -> Record:
        return replace(self, tokens=tuple(tokens))


@dataclass(frozen=True)
class BoundingBox:
    """Geographic box in degrees, or planar box in kilometres.

    With ``planar=True`` the lat and lon fields are the y and x
    coordinates of a Euclidean plane measured in kilometres.
    """

    lat_min: float
    lon_min: float
    lat_max: float
    lon_max: float
    planar: bool = False

    def __post_init__(self) -> None:
        for name in ("lat_min", "lon_min", "lat_max", "lon_max"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValueError(f"invalid '{name}': {value!r}")
        if not self.lat_min < self.lat_max:
            raise ValueError(
                f"invalid 'lat_min': {self.lat_min!r} not below {self.lat_max!r}",
            )
        if not self.lon_min < self.lon_max:
            raise ValueError(
                f"invalid 'lon_min': {self.lon_min!r} not below {self.lon_max!r}",
            )

    def contains(self, lat, lon) -> bool:
        """Closed-interval membership test."""
        return (
            self.lat_min <= lat <= self.lat_max
            and self.lon_min <= lon <= self.lon_max
        )

    @classmethod
    def from_string(cls, value) -> BoundingBox:
        """Parse 'lat_min,lon_min,lat_max,lon_max'."""
        items = [float(x) for x in value.split(",")]
        if len(items) != 4:
            raise ValueError(f"invalid 'bbox': {value!r}")
        return cls(*items)

    def to_list(self) -> list:
        return [self.lat_min, self.lon_min, self.lat_max, self.lon_max]


# New York City area collection box
BoundingBox.NYC = BoundingBox(40.4957, -74.2557, 40.9176, -73.6895)


@dataclass(frozen=True)
class TimeWindow:
    """Half-open analysis interval [start, end) in seconds."""

    start: float
    end: float

    def __post_init__(self) -> None:
        if not self.end > self.start:
            raise ValueError(
                f"invalid 'window': end {self.end!r} not after start {self.start!r}",
            )

    @property
    def length(self) -> float:
        return self.end - self.start

    def contains(self, ts) -> bool:
        return self.start <= ts < self.end

    def n_bins(self, delta_t) -> int:
        """Number of bins of width delta_t seconds covering the window."""
        return max(1, math.ceil(self.length / delta_t - 1e-9))

    @classmethod
    def daily(cls, ts, hours=24.0) -> TimeWindow:
        """Window starting at the UTC midnight on or before ts."""
        start = math.floor(ts / DAY) * DAY
        return cls(start, start + hours * 3600.0)


def validate_corpus(records, box, window) -> list:
    """Keep records inside box and window, preserving order.

    Parameters
    ----------
    records : list of Record
    box : BoundingBox
    window : TimeWindow

    Returns
    -------
    list of Record

    Raises
    ------
    CorpusError
        If two records share an id.

    """
    seen = set()
    keep = []
    for rec in records:
        if rec.id in seen:
            raise CorpusError(f"duplicate record id {rec.id!r}")
        seen.add(rec.id)
        if box.contains(rec.lat, rec.lon) and window.contains(rec.timestamp):
            keep.append(rec)
    dropped = len(records) - len(keep)
    if dropped:
        logger.info("dropped %d of %d records outside box or window",
                    dropped, len(records))
    if not keep:
        logger.warning("corpus is empty after validation")
    return keep
