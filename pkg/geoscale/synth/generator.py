"""Synthetic corpora of events buried in Poisson noise, with ground truth.

Synthetic space is a plane measured in kilometres and synthetic time is
measured in minutes; records store seconds.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from .._logger import logger
from ..detect.record import BoundingBox, Record, TimeWindow

__all__ = [
    "EventBox",
    "SyntheticSpec",
    "GroundTruth",
    "generate",
    "zipf_frequencies",
    "load_noise_frequencies",
    "SCENARIOS",
    "SIGNAL_DRAWS",
]

SCENARIOS = (1, 2, 3, 4, 5)
# "tweet": fresh signal terms for every event record; "event": one set
# per event shared by all its records
SIGNAL_DRAWS = ("tweet", "event")


@dataclass(frozen=True)
class EventBox:
    """Time interval and rectangle spanned by one event."""

    t0: float
    t1: float
    x0: float
    y0: float
    x1: float
    y1: float

    def __post_init__(self) -> None:
        if not (self.t0 < self.t1 and self.x0 < self.x1 and self.y0 < self.y1):
            raise ValueError(f"invalid 'EventBox': {self!r}")


def zipf_frequencies(n_terms=5000, exponent=1.0) -> dict:
    """Zipf weights for a synthetic noise vocabulary."""
    ranks = np.arange(1, n_terms + 1, dtype=float)
    width = len(str(n_terms - 1))
    return {
        f"noise{k:0{width}d}": float(w)
        for k, w in enumerate(ranks**-exponent)
    }


def load_noise_frequencies(fname) -> dict:
    """Read a 'term,count' CSV into term -> weight."""
    frame = pd.read_csv(fname, dtype={"term": str})
    missing = {"term", "count"} - set(frame.columns)
    if missing:
        raise ValueError(f"invalid noise vocabulary: missing {sorted(missing)}")
    frame = frame[frame["count"] > 0]
    logger.info("read %d noise terms from %s", len(frame), fname)
    return dict(zip(frame["term"], frame["count"].astype(float)))


def _range(name, value, lo=0):
    a, b = value
    if not lo <= a <= b:
        raise ValueError(f"invalid '{name}': {value!r}")
    return (a, b)


@dataclass(frozen=True)
class SyntheticSpec:
    """Parameters of one synthetic corpus.

    ``area`` is (xmin, ymin, xmax, ymax) and ``window`` is (start, end).
    Integer ranges are inclusive. Each event record carries
    ``signal_terms_per_tweet`` signal terms, drawn per record or once per
    event according to ``signal_draw``.
    """

    area: tuple = (0.0, 0.0, 10.0, 10.0)
    window: tuple = (0.0, 32.0)
    events: tuple = ()
    tweets_per_event: tuple = (3, 10)
    noise_intensity: float = 0.0
    n_signal_terms: int = 59
    noise_term_frequencies: dict | None = field(default=None, compare=False)
    terms_per_event_tweet: tuple = (5, 10)
    signal_terms_per_tweet: int = 1
    signal_draw: str = "tweet"
    terms_per_noise_tweet: tuple = (3, 10)
    seed: int = 0

    def __post_init__(self) -> None:
        xmin, ymin, xmax, ymax = self.area
        if not (xmin < xmax and ymin < ymax):
            raise ValueError(f"invalid 'area': {self.area!r}")
        if not self.window[0] < self.window[1]:
            raise ValueError(f"invalid 'window': {self.window!r}")
        _range("tweets_per_event", self.tweets_per_event, 1)
        _range("terms_per_event_tweet", self.terms_per_event_tweet, 1)
        _range("terms_per_noise_tweet", self.terms_per_noise_tweet, 1)
        if not self.noise_intensity >= 0:
            raise ValueError(f"invalid 'noise_intensity': {self.noise_intensity!r}")
        if not 1 <= self.signal_terms_per_tweet <= self.n_signal_terms:
            raise ValueError(
                f"invalid 'signal_terms_per_tweet': {self.signal_terms_per_tweet!r}",
            )
        if self.signal_draw not in SIGNAL_DRAWS:
            raise ValueError(f"invalid 'signal_draw': {self.signal_draw!r}")
        for ev in self.events:
            if ev.x1 <= xmin or ev.x0 >= xmax or ev.y1 <= ymin or ev.y0 >= ymax:
                raise ValueError(f"invalid event outside area: {ev!r}")
            if ev.t1 <= self.window[0] or ev.t0 >= self.window[1]:
                raise ValueError(f"invalid event outside window: {ev!r}")

    @property
    def box(self) -> BoundingBox:
        xmin, ymin, xmax, ymax = self.area
        return BoundingBox(ymin, xmin, ymax, xmax, planar=True)

    @property
    def time_window(self) -> TimeWindow:
        return TimeWindow(self.window[0] * 60.0, self.window[1] * 60.0)

    @property
    def area_size(self) -> float:
        xmin, ymin, xmax, ymax = self.area
        return (xmax - xmin) * (ymax - ymin)

    @classmethod
    def scenario(cls, k, seed=0, **overrides) -> SyntheticSpec:
        """Preset corpus of a numbered experiment, with placed events.

        1: 20 events of extent 2 by 2 and duration 2, no noise.
        2: 10 short events spread over 8 to 16 units of space plus 10
           compact events spread over 8 to 16 units of time, no noise.
        3, 4: scenarios 1 and 2 with noise intensity 10.
        5: scenario 4; meant to be varied through the overrides.

        A scalar ``area`` or ``window`` override is a side or length
        starting at zero.
        """
        if k not in SCENARIOS:
            raise ValueError(f"invalid 'scenario': {k!r}")
        area = overrides.pop("area", cls.area)
        if np.isscalar(area):
            area = (0.0, 0.0, float(area), float(area))
        window = overrides.pop("window", cls.window)
        if np.isscalar(window):
            window = (0.0, float(window))
        if k in (1, 3):
            shapes = [((2.0, 2.0), (2.0, 2.0))] * 20
        else:
            shapes = [((1.0, 2.0), (8.0, 16.0))] * 10 + [((8.0, 16.0), (1.0, 2.0))] * 10
        rng = np.random.default_rng([seed, k])
        events = tuple(
            _place_event(rng, duration, extent, area, window)
            for duration, extent in shapes
        )
        values = {
            "area": tuple(float(v) for v in area),
            "window": tuple(float(v) for v in window),
            "events": events,
            "noise_intensity": 10.0 if k >= 3 else 0.0,
            "seed": seed,
        }
        values.update(overrides)
        return cls(**values)


def _place_event(rng, duration, extent, area, window) -> EventBox:
    """Uniform placement of a box of random size, clipped to the area."""
    xmin, ymin, xmax, ymax = area
    dt = rng.uniform(*duration)
    ds = rng.uniform(*extent)

    def place(lo, hi, size):
        start = rng.uniform(lo, max(lo, hi - size))
        return start, min(hi, start + size)

    t0, t1 = place(window[0], window[1], dt)
    x0, x1 = place(xmin, xmax, ds)
    y0, y1 = place(ymin, ymax, ds)
    return EventBox(t0, t1, x0, y0, x1, y1)


class GroundTruth:
    """True cluster label of each record id.

    Event records carry their event index; each noise record is its own
    cluster with a label after the last event.
    """

    def __init__(self, labels, n_events) -> None:
        self.labels = dict(labels)
        self.n_events = int(n_events)

    def __repr__(self) -> str:
        return (
            f"<{self.__class__.__name__}: {len(self.labels)} records, "
            f"{self.n_events} events>"
        )

    def __len__(self) -> int:
        return len(self.labels)

    def labels_for(self, records) -> np.ndarray:
        return np.array([self.labels[r.id] for r in records], dtype=int)

    @property
    def n_noise(self) -> int:
        return sum(1 for v in self.labels.values() if v >= self.n_events)


def generate(spec):
    """Draw a corpus and its ground truth from a spec.

    Returns
    -------
    (list of Record, GroundTruth)

    """
    rng = np.random.default_rng(spec.seed)
    noise_freq = spec.noise_term_frequencies or zipf_frequencies()
    noise_terms = np.array(sorted(noise_freq))
    p = np.array([noise_freq[t] for t in noise_terms], dtype=float)
    p /= p.sum()
    width = len(str(max(spec.n_signal_terms - 1, 1)))
    signal_terms = np.array(
        [f"signal{k:0{width}d}" for k in range(spec.n_signal_terms)],
    )
    records = []
    labels = {}

    def add(label, ts, x, y, terms):
        rid = f"r{len(records):06d}"
        tokens = tuple(str(t) for t in terms)
        records.append(
            Record(
                id=rid,
                user=f"u{len(records):06d}",
                timestamp=float(ts) * 60.0,
                lat=float(y),
                lon=float(x),
                text=" ".join(tokens),
                tokens=tokens,
            ),
        )
        labels[rid] = label

    def draw_signal():
        return rng.choice(signal_terms, spec.signal_terms_per_tweet, replace=False)

    for label, ev in enumerate(spec.events):
        if spec.signal_draw == "event":
            signal = draw_signal()
        n = rng.integers(spec.tweets_per_event[0], spec.tweets_per_event[1],
                         endpoint=True)
        for _ in range(n):
            if spec.signal_draw == "tweet":
                signal = draw_signal()
            n_terms = rng.integers(*spec.terms_per_event_tweet, endpoint=True)
            n_noise = max(0, n_terms - len(signal))
            terms = list(signal) + list(rng.choice(noise_terms, n_noise, p=p))
            add(label, rng.uniform(ev.t0, ev.t1), rng.uniform(ev.x0, ev.x1),
                rng.uniform(ev.y0, ev.y1), terms)
    n_events = len(spec.events)
    xmin, ymin, xmax, ymax = spec.area
    n_noise = rng.poisson(spec.noise_intensity * spec.area_size)
    for k in range(n_noise):
        n_terms = rng.integers(*spec.terms_per_noise_tweet, endpoint=True)
        add(n_events + k, rng.uniform(*spec.window), rng.uniform(xmin, xmax),
            rng.uniform(ymin, ymax), rng.choice(noise_terms, n_terms, p=p))
    logger.debug(
        "generated %d event and %d noise records",
        len(records) - n_noise, n_noise,
    )
    return records, GroundTruth(labels, n_events)
