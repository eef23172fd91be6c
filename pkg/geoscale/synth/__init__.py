from .generator import (
    EventBox,
    GroundTruth,
    SyntheticSpec,
    generate,
    load_noise_frequencies,
    zipf_frequencies,
)
from .metrics import f_beta, f_measure, nmi, pair_counts
from .scenarios import ScenarioRunner, aggregate, run_scenario

__all__ = [
    "EventBox",
    "GroundTruth",
    "ScenarioRunner",
    "SyntheticSpec",
    "aggregate",
    "f_beta",
    "f_measure",
    "generate",
    "load_noise_frequencies",
    "nmi",
    "pair_counts",
    "run_scenario",
    "zipf_frequencies",
]
