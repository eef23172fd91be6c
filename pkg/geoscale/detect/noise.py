"""Spatial and temporal noise statistics, and the term filter.

The K-function estimator has no edge correction and counts ordered pairs
with a strict distance inequality.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field

import numpy as np
import pandas as pd
from scipy import stats
from scipy.spatial import distance

from .._logger import logger
from .base import map_workers
from .grid import Projection
from .text import term_support

__all__ = [
    "LFunctionProfile",
    "ripley_l",
    "csr_envelope",
    "chi_squared_uniform",
    "filter_terms",
    "l_profile",
    "term_profiles",
    "temporal_uniformity",
]


@dataclass
class LFunctionProfile:
    """Standardized K-function of one term's point set at probe distances."""

    term: str
    n_points: int
    probes: np.ndarray
    l_values: np.ndarray
    envelope_min: np.ndarray | None = field(default=None)
    envelope_max: np.ndarray | None = field(default=None)

    @property
    def mean_l(self) -> float:
        return float(np.mean(self.l_values))

    def to_frame(self) -> pd.DataFrame:
        n = len(self.probes)
        empty = np.full(n, np.nan)
        return pd.DataFrame(
            {
                "term": [self.term] * n,
                "n": [self.n_points] * n,
                "probe": self.probes,
                "L": self.l_values,
                "env_min": empty if self.envelope_min is None else self.envelope_min,
                "env_max": empty if self.envelope_max is None else self.envelope_max,
            },
        )


def _ordered_pair_counts(points, s):
    """Number of ordered pairs i != j with d_ij < s, per probe."""
    d = np.sort(distance.pdist(points))
    return 2 * np.searchsorted(d, s, side="left")


def ripley_l(points, area, s):
    """K and standardized L estimates.

    Parameters
    ----------
    points : array_like, shape (n, 2)
        Planar coordinates in km.
    area : float
        Area of the study region in km2.
    s : float or array_like
        Probe distance(s) in km.

    Returns
    -------
    (K, L)
        Scalars for a scalar s, else arrays.

    """
    points = np.asarray(points, dtype=float).reshape(-1, 2)
    n = len(points)
    if n < 2:
        raise ValueError(f"invalid 'points': need at least 2, found {n}")
    if not area > 0:
        raise ValueError(f"invalid 'area': {area!r}")
    probes = np.asarray(s, dtype=float)
    K = area * _ordered_pair_counts(points, probes.ravel()) / n**2
    K = K.reshape(probes.shape)
    L = np.sqrt(K / np.pi) - probes
    if probes.ndim == 0:
        return float(K), float(L)
    return K, L


def csr_envelope(n, area_box, probes, n_sims, seed=None):
    """Min and max of L over homogeneous Poisson (CSR) simulations.

    Parameters
    ----------
    n : int
        Points per simulation.
    area_box : tuple
        (xmin, ymin, xmax, ymax) in km.
    probes : array_like
        Distances in km.
    n_sims : int
    seed : int or numpy.random.Generator, optional

    Returns
    -------
    (min, max) arrays, one value per probe

    """
    if n < 2:
        raise ValueError(f"invalid 'n': {n!r}")
    if n_sims < 1:
        raise ValueError(f"invalid 'n_sims': {n_sims!r}")
    xmin, ymin, xmax, ymax = area_box
    area = (xmax - xmin) * (ymax - ymin)
    probes = np.asarray(probes, dtype=float)
    rng = np.random.default_rng(seed)
    sims = np.empty((n_sims, probes.size))
    for k in range(n_sims):
        pts = np.column_stack(
            [rng.uniform(xmin, xmax, n), rng.uniform(ymin, ymax, n)],
        )
        sims[k] = ripley_l(pts, area, probes)[1]
    return sims.min(axis=0), sims.max(axis=0)


def chi_squared_uniform(timestamps, window, n_bins, alpha=0.05):
    """Chi-squared goodness of fit of timestamps to a uniform distribution.

    Bins are merged (evenly re-binned) while the expected count per bin
    is below 5, down to two bins.

    Returns
    -------
    (statistic, reject)

    """
    statistic, _, reject = _chi2_test(timestamps, window, n_bins, alpha)
    return statistic, reject


def _chi2_test(timestamps, window, n_bins, alpha):
    if not window.length > 0:
        raise ValueError(f"invalid 'window': {window!r}")
    ts = np.asarray(timestamps, dtype=float)
    n = ts.size
    if n < 10:
        logger.warning("chi-squared test needs 10 timestamps; found %d", n)
        return 0.0, 0, False
    bins = int(n_bins)
    if n / bins < 5:
        merged = max(2, n // 5)
        logger.warning("merging %d bins into %d for %d timestamps", bins, merged, n)
        bins = merged
    observed, _ = np.histogram(
        np.clip(ts, window.start, window.end), bins=bins,
        range=(window.start, window.end),
    )
    statistic = float(stats.chisquare(observed).statistic)
    critical = float(stats.chi2.ppf(1.0 - alpha, bins - 1))
    return statistic, bins - 1, bool(statistic > critical)


def _term_points(records, projection):
    """km coordinates of the records containing each term."""
    lat = np.array([r.lat for r in records], dtype=float)
    lon = np.array([r.lon for r in records], dtype=float)
    x, y = projection.to_xy(lat, lon)
    xy = np.column_stack([x, y]) * 1e-3
    members = defaultdict(list)
    for idx, rec in enumerate(records):
        for term in set(rec.tokens or ()):
            members[term].append(idx)
    return {t: xy[idx] for t, idx in members.items()}


def l_profile(term, points, area, probes) -> LFunctionProfile:
    probes = np.asarray(probes, dtype=float)
    _, L = ripley_l(points, area, probes)
    return LFunctionProfile(term, len(points), probes, L)


def term_profiles(records, cfg, box, envelope_sims=0, seed=0) -> list:
    """L profiles of every term meeting the support minimum.

    Envelopes are simulated once per distinct point count.
    """
    projection = Projection(box)
    area = projection.area_km2
    support = term_support(records)
    points = _term_points(records, projection)
    probes = np.asarray(cfg.l_filter_probes, dtype=float)
    extent = (0.0, 0.0, projection.width * 1e-3, projection.height * 1e-3)
    terms = [
        t for t in sorted(points) if support[t] >= max(2, cfg.min_term_support)
    ]
    profiles = map_workers(
        lambda t: l_profile(t, points[t], area, probes), terms, cfg.threads,
    )
    if envelope_sims:
        sizes = sorted({p.n_points for p in profiles})
        envelopes = dict(zip(sizes, map_workers(
            lambda n: csr_envelope(n, extent, probes, envelope_sims, seed=[seed, n]),
            sizes, cfg.threads,
        )))
        for prof in profiles:
            prof.envelope_min, prof.envelope_max = envelopes[prof.n_points]
    logger.debug("computed %d term profiles", len(profiles))
    return profiles


def filter_terms(records, vocab, grid_box, cfg) -> set:
    """Valid terms for keyword series: enough support and mean L high enough.

    With ``cfg.l_filter`` False only the support gate is applied.
    """
    support = term_support(records)
    supported = {
        t for t in vocab.terms if support.get(t, 0) >= cfg.min_term_support
    }
    if not cfg.l_filter:
        logger.info("%d terms pass support %d", len(supported), cfg.min_term_support)
        return supported
    valid = set()
    for prof in term_profiles(records, cfg, grid_box):
        if prof.term in supported and prof.mean_l >= cfg.l_filter_threshold:
            valid.add(prof.term)
    logger.info(
        "%d of %d supported terms pass mean L >= %s",
        len(valid), len(supported), cfg.l_filter_threshold,
    )
    return valid


def temporal_uniformity(records, cfg, window) -> pd.DataFrame:
    """Chi-squared uniformity report for every supported term."""
    times = defaultdict(list)
    for rec in records:
        for term in set(rec.tokens or ()):
            times[term].append(rec.timestamp)
    rows = []
    for term in sorted(times):
        ts = times[term]
        if len(ts) < cfg.min_term_support:
            continue
        statistic, dof, reject = _chi2_test(
            ts, window, cfg.chi2_bins, cfg.chi2_alpha,
        )
        rows.append(
            {"term": term, "n": len(ts), "statistic": statistic, "dof": dof,
             "reject": reject},
        )
    return pd.DataFrame(rows, columns=["term", "n", "statistic", "dof", "reject"])
