from .base import ConfigError, CorpusError, GeoscaleError, InputParseError
from .cluster import DroppedCluster, EventCluster
from .config import DetectionConfig
from .detectors import (
    LEDDetector,
    MEDDetector,
    PipelineResult,
    build_led_graph,
    build_med_graph,
    led_similarity,
    med_similarity,
    post_process,
    run_led,
    run_med,
)
from .graph import Partition, SimilarityGraph, louvain_single_pass, modularity
from .grid import Grid, Projection, ScaleBoundaries
from .noise import (
    LFunctionProfile,
    chi_squared_uniform,
    csr_envelope,
    filter_terms,
    ripley_l,
)
from .record import BoundingBox, Record, TimeWindow, validate_corpus
from .text import Vocabulary, candidate_pairs, tfidf_cosine, tokenize
from .wavelet import KeywordTimeSeries, SeriesStore, haar_dwt, scale_similarity

__all__ = [
    "BoundingBox",
    "ConfigError",
    "CorpusError",
    "DetectionConfig",
    "DroppedCluster",
    "EventCluster",
    "GeoscaleError",
    "Grid",
    "InputParseError",
    "KeywordTimeSeries",
    "LEDDetector",
    "LFunctionProfile",
    "MEDDetector",
    "Partition",
    "PipelineResult",
    "Projection",
    "Record",
    "ScaleBoundaries",
    "SeriesStore",
    "SimilarityGraph",
    "TimeWindow",
    "Vocabulary",
    "build_led_graph",
    "build_med_graph",
    "candidate_pairs",
    "chi_squared_uniform",
    "csr_envelope",
    "filter_terms",
    "haar_dwt",
    "led_similarity",
    "louvain_single_pass",
    "med_similarity",
    "modularity",
    "post_process",
    "ripley_l",
    "run_led",
    "run_med",
    "scale_similarity",
    "tfidf_cosine",
    "tokenize",
    "validate_corpus",
]
