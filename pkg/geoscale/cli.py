"""Command-line interface: detect, noise and synth-eval."""

from __future__ import annotations

import argparse
import os
import platform
import time
from dataclasses import asdict, dataclass, field

import numpy as np
import pandas as pd
import pywt
import scipy
import sklearn

from . import __version__, use_basic_config
from ._logger import logger
from .detect.base import ConfigError, CorpusError, InputParseError
from .detect.config import DetectionConfig
from .detect.detectors import LEDDetector, MEDDetector
from .detect.noise import filter_terms, temporal_uniformity, term_profiles
from .detect.record import BoundingBox, TimeWindow, validate_corpus
from .detect.text import Vocabulary, tokenize_records
from .io.output import sha256_of, write_csv, write_json, write_result
from .io.textfile import RecordReader, parse_timestamp
from .synth.generator import SCENARIOS, SIGNAL_DRAWS, load_noise_frequencies
from .synth.scenarios import DEFAULT_PARAMS, aggregate, run_scenario

__all__ = ["RunManifest", "build_parser", "main"]

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_PARSE = 3
EXIT_CONFIG = 4

PROFILE_COLUMNS = ["term", "n", "probe", "L", "env_min", "env_max"]


@dataclass
class RunManifest:
    """Provenance of one command run."""

    command: str
    config: dict
    input_sha256: str | None
    seed: int
    arguments: dict = field(default_factory=dict)
    versions: dict = field(default_factory=dict)
    timings: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.versions:
            self.versions = {
                "geoscale": __version__,
                "python": platform.python_version(),
                "numpy": np.__version__,
                "scipy": scipy.__version__,
                "pandas": pd.__version__,
                "pywt": pywt.__version__,
                "sklearn": sklearn.__version__,
            }

    def write(self, path) -> None:
        write_json(path, asdict(self))


def _float_list(value):
    try:
        return tuple(float(v) for v in value.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid float list: {value!r}")


def _positive(typ):
    def convert(value):
        try:
            res = typ(value)
        except ValueError:
            res = None
        if res is None or not res > 0:
            raise argparse.ArgumentTypeError(f"expected a positive number: {value!r}")
        return res

    convert.__name__ = f"positive {typ.__name__}"
    return convert


def _positive_list(value):
    values = _float_list(value)
    if not values or min(values) <= 0:
        raise argparse.ArgumentTypeError(f"expected positive values: {value!r}")
    return values


def _str_list(value):
    return tuple(v.strip() for v in value.split(",") if v.strip())


def _bbox(value):
    try:
        return BoundingBox.from_string(value)
    except ValueError as err:
        raise argparse.ArgumentTypeError(str(err))


def _timestamp(value):
    try:
        return parse_timestamp(float(value))
    except ValueError:
        pass
    try:
        return parse_timestamp(value)
    except ValueError as err:
        raise argparse.ArgumentTypeError(f"invalid timestamp {value!r}: {err}")


# flag, config key, type
_config_flags = [
    ("--tt", "T_t", float, "temporal threshold of LED, minutes"),
    ("--td", "T_d", float, "spatial threshold of LED, meters"),
    ("--dt", "delta_t", float, "initial temporal resolution of MED, minutes"),
    ("--dd", "delta_d", float, "initial spatial resolution of MED, meters"),
    ("--nscale", "n_scale", int, "number of scales of MED"),
    ("--min-support", "min_term_support", int, "records needed per term"),
    ("--probes", "l_filter_probes", _float_list, "L probe distances, km"),
    ("--threshold", "l_filter_threshold", float, "minimum mean L of a term"),
    ("--min-records", "min_cluster_records", int, "records per cluster"),
    ("--min-users", "min_cluster_users", int, "distinct users per cluster"),
    ("--max-user-fraction", "max_single_user_fraction", float,
     "largest share of one user in a cluster"),
    ("--blacklist", "blacklist_terms", _str_list, "comma separated terms"),
]


def _add_common(p, out_default, config=True) -> None:
    if config:
        p.add_argument("--config", help="flat 'key = value' config file")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=_positive(int), default=argparse.SUPPRESS,
                   help="worker cap")
    p.add_argument("--log-level", default="INFO",
                   choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    p.add_argument("--out", default=out_default, help="output directory")


def _add_corpus(p) -> None:
    p.add_argument("input", help="JSON-lines corpus")
    p.add_argument("--bbox", type=_bbox, default=BoundingBox.NYC,
                   help="lat_min,lon_min,lat_max,lon_max")
    p.add_argument("--start", type=_timestamp,
                   help="window start; default is the UTC day of the first record")
    p.add_argument("--window-hours", type=_positive(float), default=24.0)


def _add_config_flags(p) -> None:
    g = p.add_argument_group("detection config")
    for flag, key, typ, help in _config_flags:
        g.add_argument(flag, dest=key, type=typ, default=argparse.SUPPRESS,
                       help=help)
    g.add_argument("--no-l-filter", dest="l_filter", action="store_false",
                   default=argparse.SUPPRESS, help="support gate only")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="geoscale",
        description="Multiscale event detection from geotagged short texts",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("detect", help="cluster a corpus into events")
    _add_corpus(p)
    p.add_argument("--method", choices=["led", "med"], default="med")
    p.add_argument("--dump-graph", action="store_true",
                   help="also write graph.txt")
    _add_config_flags(p)
    _add_common(p, "out")

    p = sub.add_parser("noise", help="term L profiles and uniformity tests")
    _add_corpus(p)
    p.add_argument("--envelope", type=int, default=0, metavar="N_SIMS",
                   help="CSR simulations for min/max envelopes")
    p.add_argument("--temporal", action="store_true",
                   help="chi-squared uniformity report per term")
    _add_config_flags(p)
    _add_common(p, "out")

    p = sub.add_parser("synth-eval", help="LED and MED over a synthetic scenario")
    p.add_argument("--scenario", type=int, choices=SCENARIOS, required=True)
    p.add_argument("--trials", type=_positive(int), default=10)
    p.add_argument("--params", type=_positive_list, default=DEFAULT_PARAMS)
    p.add_argument("--window", type=_positive(float),
                   help="temporal interval length")
    p.add_argument("--area", type=_positive(float), help="side of the square area")
    p.add_argument("--signal-terms", type=_positive(int),
                   help="signal terms per event record")
    p.add_argument("--signal-draw", choices=SIGNAL_DRAWS,
                   help="draw signal terms per record (default) or per event")
    p.add_argument("--noise-vocab", help="'term,count' CSV of noise terms")
    _add_common(p, "out", config=False)
    return parser


def _config(args) -> DetectionConfig:
    overrides = {
        key: getattr(args, key)
        for _, key, _, _ in _config_flags
        if hasattr(args, key)
    }
    for key in ("l_filter", "threads"):
        if hasattr(args, key):
            overrides[key] = getattr(args, key)
    if args.config:
        return DetectionConfig.from_file(args.config, **overrides)
    return DetectionConfig(**overrides)


def _window(args, records) -> TimeWindow:
    if args.start is not None:
        return TimeWindow(args.start, args.start + args.window_hours * 3600.0)
    first = records[0].timestamp if records else 0.0
    return TimeWindow.daily(first, args.window_hours)


def _arguments(args) -> dict:
    res = {}
    for key, value in sorted(vars(args).items()):
        if isinstance(value, BoundingBox):
            value = value.to_list()
        elif isinstance(value, tuple):
            value = list(value)
        res[key] = value
    return res


def cmd_detect(args) -> int:
    cfg = _config(args)
    records = RecordReader(args.input).read()
    window = _window(args, records)
    cls = LEDDetector if args.method == "led" else MEDDetector
    detector = cls(cfg, seed=args.seed, box=args.bbox, window=window)
    result = detector.run(records)
    start = time.perf_counter()
    graph = result.graph if args.dump_graph else None
    write_result(result, args.out, dump_graph=graph)
    detector.timings["write"] = time.perf_counter() - start
    RunManifest(
        command="detect",
        config=cfg.to_dict(),
        input_sha256=sha256_of(args.input),
        seed=args.seed,
        arguments=_arguments(args),
        timings=detector.timings,
    ).write(os.path.join(args.out, "manifest.json"))
    logger.info("%d clusters written to %s", len(result.clusters), args.out)
    return EXIT_OK


def cmd_noise(args) -> int:
    cfg = _config(args)
    timings = {}
    start = time.perf_counter()
    records = RecordReader(args.input).read()
    window = _window(args, records)
    records = tokenize_records(validate_corpus(records, args.bbox, window), cfg)
    timings["prepare"] = time.perf_counter() - start

    start = time.perf_counter()
    n_sims = args.envelope or cfg.envelope_sims
    profiles = term_profiles(records, cfg, args.bbox, n_sims, seed=args.seed)
    if profiles:
        frame = pd.concat([p.to_frame() for p in profiles], ignore_index=True)
    else:
        frame = pd.DataFrame(columns=PROFILE_COLUMNS)
    valid = filter_terms(records, Vocabulary.from_records(records), args.bbox, cfg)
    timings["profiles"] = time.perf_counter() - start

    os.makedirs(args.out, exist_ok=True)
    write_csv(os.path.join(args.out, "profiles.csv"), frame)
    write_json(
        os.path.join(args.out, "valid_terms.json"),
        {
            "valid_terms": sorted(valid),
            "n_profiled": len(profiles),
            "min_term_support": cfg.min_term_support,
            "l_filter": cfg.l_filter,
            "probes": list(cfg.l_filter_probes),
            "threshold": cfg.l_filter_threshold,
        },
    )
    if args.temporal:
        start = time.perf_counter()
        report = temporal_uniformity(records, cfg, window)
        timings["temporal"] = time.perf_counter() - start
        write_csv(os.path.join(args.out, "temporal.csv"), report)
    RunManifest(
        command="noise",
        config=cfg.to_dict(),
        input_sha256=sha256_of(args.input),
        seed=args.seed,
        arguments=_arguments(args),
        timings=timings,
    ).write(os.path.join(args.out, "manifest.json"))
    return EXIT_OK


def cmd_synth_eval(args) -> int:
    overrides = {}
    if args.window is not None:
        overrides["window"] = args.window
    if args.area is not None:
        overrides["area"] = args.area
    if args.signal_terms is not None:
        overrides["signal_terms_per_tweet"] = args.signal_terms
    if args.signal_draw is not None:
        overrides["signal_draw"] = args.signal_draw
    digest = None
    if args.noise_vocab:
        overrides["noise_term_frequencies"] = load_noise_frequencies(args.noise_vocab)
        digest = sha256_of(args.noise_vocab)
    threads = getattr(args, "threads", 1)
    start = time.perf_counter()
    trials = run_scenario(
        args.scenario, args.params, args.trials, args.seed, overrides, threads,
    )
    timings = {"trials": time.perf_counter() - start}
    os.makedirs(args.out, exist_ok=True)
    write_csv(os.path.join(args.out, "trials.csv"), trials)
    write_csv(os.path.join(args.out, "aggregate.csv"), aggregate(trials))
    RunManifest(
        command="synth-eval",
        config={k: v for k, v in overrides.items() if k != "noise_term_frequencies"},
        input_sha256=digest,
        seed=args.seed,
        arguments=_arguments(args),
        timings=timings,
    ).write(os.path.join(args.out, "manifest.json"))
    return EXIT_OK


_commands = {
    "detect": cmd_detect,
    "noise": cmd_noise,
    "synth-eval": cmd_synth_eval,
}


def main(argv=None) -> int:
    """Run a command; returns the process exit code."""
    parser = build_parser()
    args = parser.parse_args(argv)
    use_basic_config(level=args.log_level)
    try:
        return _commands[args.command](args)
    except InputParseError as err:
        logger.error("%s", err)
        return EXIT_PARSE
    except (ConfigError, CorpusError) as err:
        logger.error("%s", err)
        return EXIT_CONFIG
    except (FileNotFoundError, IsADirectoryError) as err:
        logger.error("%s", err)
        return EXIT_USAGE
    except ValueError as err:
        # values argparse cannot check alone, e.g. an event outside the area
        logger.error("invalid argument: %s", err)
        return EXIT_USAGE
