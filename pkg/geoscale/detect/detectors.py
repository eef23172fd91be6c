"""Baseline (LED) and multiscale wavelet (MED) event detection pipelines."""

from __future__ import annotations

import json
from collections import Counter

import numpy as np
from scipy import spatial

from .._logger import logger
from .base import Component, map_workers
from .cluster import DroppedCluster, EventCluster, top_terms
from .config import DetectionConfig
from .graph import Partition, SimilarityGraph, louvain_single_pass
from .grid import Grid, Projection, ScaleBoundaries, check_nscale
from .noise import filter_terms
from .record import BoundingBox, TimeWindow, validate_corpus
from .text import (
    Vocabulary,
    candidate_pairs,
    pair_cosines,
    shares_term,
    tfidf_cosine,
    tokenize_records,
)
from .wavelet import SeriesStore, term_pair_similarity

__all__ = [
    "PipelineResult",
    "LEDDetector",
    "MEDDetector",
    "led_similarity",
    "med_similarity",
    "build_led_graph",
    "build_med_graph",
    "post_process",
    "run_led",
    "run_med",
]

_min_weight = 1e-12
_rtol = 1e-9


def _pair_ranges(n, threads):
    """Disjoint index ranges covering n pairs, one per worker."""
    return np.array_split(np.arange(n), max(1, min(threads, n)))


class PipelineResult:
    """Retained clusters, the drop ledger and run metadata."""

    def __init__(self, clusters, dropped_clusters, metadata, partition, records,
                 graph=None):
        self.clusters = clusters
        self.dropped_clusters = dropped_clusters
        self.metadata = metadata
        self.partition = partition
        self.records = records
        self.graph = graph

    def __repr__(self) -> str:
        return (
            f"<{self.__class__.__name__}: {len(self.clusters)} clusters, "
            f"{len(self.dropped_clusters)} dropped>"
        )

    def to_json(self) -> str:
        """Deterministic clusters document: no timings, sorted keys."""
        doc = {
            "clusters": [c.to_dict() for c in self.clusters],
            "metadata": self.metadata,
        }
        return json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n"

    def dropped_json(self) -> str:
        doc = {
            "dropped": [d.to_dict() for d in self.dropped_clusters],
            "counts": dict(sorted(Counter(
                d.reason for d in self.dropped_clusters).items())),
        }
        return json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n"

    def to_geojson(self) -> dict:
        """FeatureCollection with one Point per record of a retained cluster."""
        by_id = {rec.id: rec for rec in self.records}
        features = []
        for cluster in self.clusters:
            for rid in cluster.record_ids:
                rec = by_id[rid]
                features.append(
                    {
                        "type": "Feature",
                        "geometry": {"type": "Point", "coordinates": [rec.lon, rec.lat]},
                        "properties": {
                            "cluster_id": cluster.id,
                            "record_id": rec.id,
                            "user": rec.user,
                            "timestamp": rec.timestamp,
                        },
                    },
                )
        return {"type": "FeatureCollection", "features": features}


def led_similarity(a, b, cfg, vocab, projection=None) -> float:
    """tf-idf cosine gated by |dt| <= T_t and distance <= T_d (inclusive)."""
    if not shares_term(a, b):
        return 0.0
    if abs(a.timestamp - b.timestamp) > cfg.T_t * 60.0 * (1 + _rtol):
        return 0.0
    if projection is None:
        mid = 0.5 * (a.lat + b.lat)
        projection = Projection(BoundingBox(mid - 1, min(a.lon, b.lon) - 1,
                                            mid + 1, max(a.lon, b.lon) + 1))
    d = float(projection.distance(a.lat, a.lon, b.lat, b.lon))
    if d > cfg.T_d * (1 + _rtol):
        return 0.0
    return tfidf_cosine(a, b, vocab)


def _max_term_similarity(terms, cell_a, cell_b, boundaries, grid, store, cache=None):
    best = 0.0
    for term in sorted(terms):
        key = (term, cell_a, cell_b)
        if cache is not None and key in cache:
            sim = cache[key]
        else:
            sim = term_pair_similarity(term, cell_a, cell_b, boundaries, grid, store)
            if cache is not None:
                cache[key] = sim
        if sim > best:
            best = sim
            if best >= 1.0:
                break
    return best


def med_similarity(a, b, cfg, vocab, series_store, boundaries, grid) -> float:
    """tf-idf cosine times the best wavelet similarity over shared valid terms."""
    shared = {
        t for t in set(a.tokens or ()) & set(b.tokens or ()) if t in series_store
    }
    if not shared:
        return 0.0
    cell_a, cell_b = (int(c) for c in grid.assign_cells([a.lat, b.lat], [a.lon, b.lon]))
    s_st = _max_term_similarity(shared, cell_a, cell_b, boundaries, grid, series_store)
    if s_st == 0.0:
        return 0.0
    return tfidf_cosine(a, b, vocab) * s_st


def _locality_pairs(records, cfg, projection):
    """Pairs within T_t and T_d of each other, as index arrays (i < j)."""
    if len(records) < 2:
        return np.zeros(0, dtype=np.intp), np.zeros(0, dtype=np.intp)
    x, y = projection.to_xy([r.lat for r in records], [r.lon for r in records])
    t = np.array([r.timestamp for r in records], dtype=float)
    tt = cfg.T_t * 60.0
    # Chebyshev ball over (x, y, scaled t) contains every local pair
    pts = np.column_stack([x, y, t * (cfg.T_d / tt)])
    pairs = spatial.cKDTree(pts).query_pairs(
        cfg.T_d * (1 + _rtol), p=np.inf, output_type="ndarray",
    )
    if len(pairs) == 0:
        return np.zeros(0, dtype=np.intp), np.zeros(0, dtype=np.intp)
    pairs = pairs[np.lexsort((pairs[:, 1], pairs[:, 0]))]
    i, j = pairs[:, 0], pairs[:, 1]
    keep = (np.abs(t[i] - t[j]) <= tt * (1 + _rtol)) & (
        np.hypot(x[i] - x[j], y[i] - y[j]) <= cfg.T_d * (1 + _rtol)
    )
    return i[keep], j[keep]


def build_led_graph(records, cfg, vocab, projection, X=None):
    """W1: tf-idf cosine over local pairs sharing a term."""
    if X is None:
        X = vocab.matrix(r.tokens for r in records)
    i, j = _locality_pairs(records, cfg, projection)
    parts = map_workers(
        lambda idx: pair_cosines(X, i[idx], j[idx]),
        _pair_ranges(len(i), cfg.threads), cfg.threads,
    )
    w = np.concatenate(parts) if parts else np.zeros(0)
    keep = w > _min_weight
    logger.debug("LED: %d local pairs, %d edges", len(w), int(keep.sum()))
    return SimilarityGraph.from_edges(len(records), i[keep], j[keep], w[keep])


def build_med_graph(records, cfg, vocab, grid, window, valid_terms, X=None):
    """W2: tf-idf cosine times wavelet similarity over shared valid terms.

    Returns
    -------
    (SimilarityGraph, ScaleBoundaries, SeriesStore)

    """
    if X is None:
        X = vocab.matrix(r.tokens for r in records)
    cells = grid.assign_cells([r.lat for r in records], [r.lon for r in records])
    store = SeriesStore.build(records, grid, valid_terms, window, cfg.delta_t, cells)
    boundaries = ScaleBoundaries.from_cells(grid, cells, cfg.n_scale)
    pairs = np.fromiter(
        (k for pair in candidate_pairs(records, valid_terms) for k in pair),
        dtype=np.intp,
    ).reshape(-1, 2)
    i, j = pairs[:, 0], pairs[:, 1]
    s_tfidf = pair_cosines(X, i, j)
    token_sets = [set(r.tokens or ()) & valid_terms for r in records]

    def weigh(ks):
        cache = {}
        out = np.zeros(len(ks))
        for n, k in enumerate(ks):
            a, b = i[k], j[k]
            s_st = _max_term_similarity(
                token_sets[a] & token_sets[b], int(cells[a]), int(cells[b]),
                boundaries, grid, store, cache,
            )
            out[n] = s_tfidf[k] * s_st
        return out

    w = np.zeros(len(i))
    nonzero = np.flatnonzero(s_tfidf > _min_weight)
    ranges = [nonzero[r] for r in _pair_ranges(len(nonzero), cfg.threads)]
    for ks, part in zip(ranges, map_workers(weigh, ranges, cfg.threads)):
        w[ks] = part
    keep = w > _min_weight
    logger.debug("MED: %d candidate pairs, %d edges", len(w), int(keep.sum()))
    graph = SimilarityGraph.from_edges(len(records), i[keep], j[keep], w[keep])
    return graph, boundaries, store


def post_process(partition, records, cfg, base_metadata=None) -> PipelineResult:
    """Drop unconvincing clusters and summarize the rest.

    A cluster is dropped, with the first reason that applies, when it has
    too few records, too few distinct users, a single user above the
    allowed share, or a top term on the blacklist.
    """
    blacklist = set(cfg.blacklist_terms)
    retained, dropped = [], []
    for members in partition.communities():
        recs = [records[k] for k in members]
        ids = tuple(sorted(r.id for r in recs))
        users = Counter(r.user for r in recs)
        reason = None
        if len(recs) < cfg.min_cluster_records:
            reason = "too_few_records"
        elif len(users) < cfg.min_cluster_users:
            reason = "too_few_users"
        elif max(users.values()) / len(recs) > cfg.max_single_user_fraction:
            reason = "single_user_dominates"
        elif blacklist and blacklist.intersection(top_terms(recs)):
            reason = "blacklisted"
        if reason is None:
            retained.append(recs)
        else:
            dropped.append(DroppedCluster(ids, reason))
    summaries = [EventCluster.summarize(0, recs) for recs in retained]
    summaries.sort(key=lambda c: (-c.size, c.median_timestamp, c.record_ids))
    clusters = [
        EventCluster(k, *(getattr(c, f) for f in (
            "record_ids", "n_users", "median_timestamp", "t80_interval",
            "centroid", "top_terms")))
        for k, c in enumerate(summaries)
    ]
    metadata = dict(base_metadata or {})
    metadata["n_clusters"] = len(clusters)
    metadata["n_dropped"] = len(dropped)
    return PipelineResult(clusters, dropped, metadata, partition, records)


class _Detector(Component):
    """Shared preparation, clustering and post-processing."""

    method = None

    def __init__(self, cfg=None, seed=0, box=None, window=None) -> None:
        Component.__init__(self)
        self.cfg = cfg if cfg is not None else DetectionConfig()
        self.seed = int(seed)
        self.box = box
        self.window = window

    def __repr__(self) -> str:
        return f"<{self.__class__.__name__}: seed={self.seed}, cfg={self.cfg!r}>"

    def _prepare(self, records):
        if self.box is None:
            self.box = _enclosing_box(records)
        if self.window is None:
            self.window = _enclosing_window(records)
        records = validate_corpus(records, self.box, self.window)
        if any(r.tokens is None for r in records):
            records = tokenize_records(records, self.cfg)
        return records

    def _build_graph(self, records, vocab, X):
        raise NotImplementedError

    def run(self, records) -> PipelineResult:
        self._logger.info("running %s on %d records", self.method, len(records))
        records = self._timed("prepare", self._prepare, records)
        metadata = {
            "method": self.method,
            "seed": self.seed,
            "n_records": len(records),
            "box": self.box.to_list() if self.box else None,
            "planar": bool(self.box.planar) if self.box else False,
            "window": [self.window.start, self.window.end] if self.window else None,
            "config": {
                k: v for k, v in self.cfg.to_dict().items() if k != "stop_words"
            },
            "n_stop_words": len(self.cfg.stop_words),
        }
        if not records:
            self._logger.warning("empty corpus; no clusters")
            metadata.update(n_edges=0, total_weight=0.0, modularity=None)
            return post_process(Partition.singletons(0), records, self.cfg, metadata)
        vocab = Vocabulary.from_records(records)
        X = vocab.matrix(r.tokens for r in records)
        graph = self._timed("graph", self._build_graph, records, vocab, X)
        self._metadata_graph(metadata)
        metadata["n_edges"] = graph.n_edges
        metadata["total_weight"] = graph.total_weight
        if graph.n_edges == 0:
            self._logger.warning("similarity graph has no edges; no clusters")
            metadata["modularity"] = None
            metadata.update(n_clusters=0, n_dropped=0)
            return PipelineResult(
                [], [], metadata, Partition.singletons(len(records)), records, graph,
            )
        partition = self._timed("cluster", louvain_single_pass, graph, self.seed)
        metadata["modularity"] = partition.modularity
        result = self._timed("post_process", post_process, partition, records,
                             self.cfg, metadata)
        result.graph = graph
        if not result.clusters:
            self._logger.warning("no clusters retained after post-processing")
        self._logger.info(
            "%s: %d edges, %d communities, %d retained",
            self.method, graph.n_edges, partition.n_communities,
            len(result.clusters),
        )
        return result

    def _metadata_graph(self, metadata) -> None:
        pass


class LEDDetector(_Detector):
    """Locality-constrained baseline detector."""

    method = "led"

    def _build_graph(self, records, vocab, X):
        return build_led_graph(records, self.cfg, vocab, Projection(self.box), X)


class MEDDetector(_Detector):
    """Multiscale detector using wavelet similarity of keyword series."""

    method = "med"

    def _prepare(self, records):
        records = _Detector._prepare(self, records)
        self.grid = Grid(self.box, self.cfg.delta_d)
        self.l_t = self.window.n_bins(self.cfg.delta_t * 60.0)
        check_nscale(self.cfg.n_scale, self.grid.l_d, self.l_t)
        return records

    def _build_graph(self, records, vocab, X):
        self.valid_terms = filter_terms(records, vocab, self.box, self.cfg)
        graph, self.boundaries, self.store = build_med_graph(
            records, self.cfg, vocab, self.grid, self.window, self.valid_terms, X,
        )
        return graph

    def _metadata_graph(self, metadata) -> None:
        metadata["n_valid_terms"] = len(self.valid_terms)
        metadata["grid_shape"] = list(self.grid.shape)
        metadata["l_d"] = self.grid.l_d
        metadata["l_t"] = self.l_t
        metadata["scale_boundaries"] = self.boundaries.to_dict()
        metadata["distance_source"] = "occupied_cells"


def _enclosing_box(records):
    if not records:
        return BoundingBox.NYC
    lat = [r.lat for r in records]
    lon = [r.lon for r in records]
    pad = 1e-6
    return BoundingBox(min(lat) - pad, min(lon) - pad, max(lat) + pad, max(lon) + pad)


def _enclosing_window(records):
    if not records:
        return TimeWindow.daily(0.0)
    ts = [r.timestamp for r in records]
    return TimeWindow(min(ts), max(ts) + 1.0)


def run_led(records, cfg=None, seed=0, box=None, window=None) -> PipelineResult:
    """Detect local events with the baseline detector."""
    return LEDDetector(cfg, seed, box, window).run(records)


def run_med(records, cfg=None, seed=0, box=None, window=None) -> PipelineResult:
    """Detect events of multiple scales with the wavelet detector.

    Raises
    ------
    ConfigError
        If cfg.n_scale exceeds its upper bound for the grid and window.

    """
    return MEDDetector(cfg, seed, box, window).run(records)
