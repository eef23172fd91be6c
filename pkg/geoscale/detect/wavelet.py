"""Keyword time series and scale-dependent similarity via the Haar DWT."""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass

import numpy as np
import pywt

from .._logger import logger
from .grid import SAME_CELL, spatial_scale_of

__all__ = [
    "KeywordTimeSeries",
    "HaarDecomposition",
    "SeriesStore",
    "next_pow2",
    "build_time_series",
    "haar_dwt",
    "scale_similarity",
    "term_pair_similarity",
]

_wavelet = pywt.Wavelet("haar")


def next_pow2(n) -> int:
    if n < 1:
        raise ValueError(f"invalid 'n': {n!r}")
    return 1 << (int(n) - 1).bit_length()


@dataclass(frozen=True, eq=False)
class KeywordTimeSeries:
    """Per-bin counts of records in one cell containing one term."""

    term: str
    cell: int
    counts: np.ndarray

    @property
    def padded_length(self) -> int:
        return next_pow2(len(self.counts))

    @property
    def padded(self) -> np.ndarray:
        out = np.zeros(self.padded_length, dtype=float)
        out[: len(self.counts)] = self.counts
        return out


class HaarDecomposition:
    """Orthonormal Haar pyramid of a zero-padded series.

    ``approximations[k - 1]`` and ``details[k - 1]`` hold level k, which
    has ``padded_length / 2**k`` coefficients.
    """

    def __init__(self, signal, approximations, details) -> None:
        self.signal = signal
        self.approximations = approximations
        self.details = details

    def __repr__(self) -> str:
        return (
            f"<{self.__class__.__name__}: length={len(self.signal)}, "
            f"levels={self.n_levels}>"
        )

    @property
    def n_levels(self) -> int:
        return len(self.approximations)

    def level(self, k):
        """(approximation, detail) coefficients at level k."""
        if not 1 <= k <= self.n_levels:
            raise ValueError(f"invalid 'level': {k!r}; max is {self.n_levels}")
        return self.approximations[k - 1], self.details[k - 1]

    def energy(self) -> float:
        """Sum of squares of the coarsest approximation and all details."""
        if not self.n_levels:
            return float(np.sum(self.signal**2))
        total = float(np.sum(self.approximations[-1] ** 2))
        for d in self.details:
            total += float(np.sum(d**2))
        return total


def haar_dwt(counts, max_level=None) -> HaarDecomposition:
    """Full Haar pyramid of counts after zero padding to a power of two.

    Parameters
    ----------
    counts : array_like
        Non-empty 1D series.
    max_level : int, optional
        Stop after this level; default is log2 of the padded length.

    Returns
    -------
    HaarDecomposition

    """
    counts = np.asarray(counts, dtype=float).ravel()
    if counts.size == 0:
        raise ValueError("invalid 'counts': empty series")
    signal = np.zeros(next_pow2(counts.size))
    signal[: counts.size] = counts
    n_levels = int(math.log2(signal.size))
    if max_level is not None:
        n_levels = min(n_levels, int(max_level))
    approximations, details = [], []
    a = signal
    for _ in range(n_levels):
        a, d = pywt.dwt(a, _wavelet, mode="periodization")
        approximations.append(a)
        details.append(d)
    return HaarDecomposition(signal, approximations, details)


def _pearson(x, y):
    xc = x - x.mean()
    yc = y - y.mean()
    sx = math.sqrt(float(np.dot(xc, xc)))
    sy = math.sqrt(float(np.dot(yc, yc)))
    scale = max(float(np.abs(x).max()), float(np.abs(y).max()), 1.0)
    flat_x = sx <= 1e-12 * scale
    flat_y = sy <= 1e-12 * scale
    if flat_x or flat_y:
        # both flat at this scale: proportional aggregates
        return 1.0 if flat_x and flat_y else 0.0
    return float(np.dot(xc, yc)) / (sx * sy)


def approximation_similarity(ax, ay) -> float:
    """Pearson correlation of two coefficient vectors, clamped to [0, 1]."""
    ax = np.asarray(ax, dtype=float)
    ay = np.asarray(ay, dtype=float)
    if ax.shape != ay.shape:
        raise ValueError(f"invalid shapes: {ax.shape} != {ay.shape}")
    return min(1.0, max(0.0, _pearson(ax, ay)))


def scale_similarity(x, y, dwt_level) -> float:
    """Similarity of two keyword series at one DWT level.

    Uses the level's approximation coefficients only.
    """
    if x.padded_length != y.padded_length:
        raise ValueError(
            f"invalid series lengths: {x.padded_length} != {y.padded_length}",
        )
    ax = haar_dwt(x.padded, dwt_level).level(dwt_level)[0]
    ay = haar_dwt(y.padded, dwt_level).level(dwt_level)[0]
    return approximation_similarity(ax, ay)


def build_time_series(records, term, grid, delta_t, window, cells=None) -> dict:
    """Series of the term per occupied cell.

    Parameters
    ----------
    records : list of Record
        Tokenized records.
    term : str
    grid : Grid
    delta_t : float
        Bin width in minutes.
    window : TimeWindow
    cells : array_like, optional
        Precomputed flat cell index per record.

    Returns
    -------
    dict
        cell -> KeywordTimeSeries; cells without occurrences are absent.

    """
    store = SeriesStore.build(records, grid, [term], window, delta_t, cells)
    return {cell: store.get(term, cell) for cell in store.cells_of(term)}


class SeriesStore:
    """Keyword series keyed by (term, cell), with memoised DWT levels."""

    def __init__(self, series, n_bins) -> None:
        self._series = series
        self._by_term = defaultdict(list)
        for term, cell in sorted(series):
            self._by_term[term].append(cell)
        self.n_bins = int(n_bins)
        self._approx = {}

    def __repr__(self) -> str:
        return (
            f"<{self.__class__.__name__}: {len(self._series)} series over "
            f"{len(self._by_term)} terms, {self.n_bins} bins>"
        )

    def __len__(self) -> int:
        return len(self._series)

    def __contains__(self, term) -> bool:
        """A term is in the store if it has a series in some cell."""
        return term in self._by_term

    @property
    def padded_length(self) -> int:
        return next_pow2(self.n_bins)

    @property
    def max_level(self) -> int:
        return int(math.log2(self.padded_length))

    @classmethod
    def build(cls, records, grid, terms, window, delta_t, cells=None) -> SeriesStore:
        """Count, per (term, cell, bin), the records containing the term."""
        terms = set(terms)
        dt = float(delta_t) * 60.0
        n_bins = window.n_bins(dt)
        if cells is None:
            cells = grid.assign_cells(
                [r.lat for r in records], [r.lon for r in records],
            )
        series = {}
        for rec, cell in zip(records, cells):
            present = terms.intersection(rec.tokens or ())
            if not present:
                continue
            b = min(int((rec.timestamp - window.start) // dt), n_bins - 1)
            for term in present:
                key = (term, int(cell))
                counts = series.get(key)
                if counts is None:
                    counts = series[key] = np.zeros(n_bins, dtype=int)
                counts[b] += 1
        logger.debug("built %d keyword series for %d terms", len(series), len(terms))
        return cls(
            {k: KeywordTimeSeries(k[0], k[1], v) for k, v in series.items()},
            n_bins,
        )

    def get(self, term, cell):
        return self._series.get((term, int(cell)))

    def terms(self) -> list:
        return sorted(self._by_term)

    def cells_of(self, term) -> list:
        return list(self._by_term.get(term, ()))

    def approximation(self, term, cell, level):
        """Level approximation coefficients, or None when no series exists."""
        key = (term, int(cell), int(level))
        if key not in self._approx:
            ts = self._series.get(key[:2])
            if ts is None:
                return None
            self._approx[key] = haar_dwt(ts.padded, level).level(level)[0]
        return self._approx[key]


def term_pair_similarity(term, cell_a, cell_b, boundaries, grid, series_store):
    """Wavelet similarity of a term between two cells.

    Same cell gives 1.0. Otherwise the DWT level equals the spatial scale
    of the cells' center distance. A missing series gives 0.0.
    """
    if cell_a == cell_b:
        return 1.0
    level = spatial_scale_of(boundaries, float(grid.cell_distance(cell_a, cell_b)))
    if level == SAME_CELL:
        return 1.0
    ax = series_store.approximation(term, cell_a, level)
    ay = series_store.approximation(term, cell_b, level)
    if ax is None or ay is None:
        return 0.0
    return approximation_similarity(ax, ay)
