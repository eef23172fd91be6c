"""Parameter sweeps of both detectors over synthetic scenarios."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor

import numpy as np
import pandas as pd

from .._logger import logger
from ..detect.base import Component, ConfigError
from ..detect.config import DetectionConfig
from ..detect.detectors import LEDDetector, MEDDetector
from ..detect.grid import Grid, nscale_upper_bound
from .generator import SCENARIOS, SyntheticSpec, generate
from .metrics import f_beta, nmi

__all__ = [
    "DEFAULT_PARAMS",
    "ScenarioRunner",
    "aggregate",
    "detector_configs",
    "run_scenario",
]

DEFAULT_PARAMS = (0.25, 0.5, 1.0, 2.0, 4.0, 8.0)
COLUMNS = ["method", "scenario", "param", "trial", "nmi", "f_measure"]

# term filter of the noisy scenarios
_noisy_filter = {
    "l_filter": True,
    "l_filter_probes": (0.5, 1.0, 1.5, 2.0),
    "l_filter_threshold": 1.0,
}


def detector_configs(scenario, param, spec) -> tuple:
    """(LED, MED) configs with all four scale parameters set to param.

    One synthetic unit is a kilometre or a minute. MED uses four scales
    unless the bound for the grid and window is lower.
    """
    led = DetectionConfig(T_t=param, T_d=1000.0 * param)
    l_d = Grid(spec.box, 1000.0 * param).l_d
    l_t = spec.time_window.n_bins(60.0 * param)
    n_scale = max(1, min(4, nscale_upper_bound(l_d, l_t)))
    filter_opts = _noisy_filter if scenario >= 3 else {"l_filter": False}
    med = DetectionConfig(
        delta_t=param,
        delta_d=1000.0 * param,
        n_scale=n_scale,
        min_term_support=3,
        **filter_opts,
    )
    return led, med


def _run_trial(args) -> list:
    scenario, params, trial, seed, overrides = args
    spec = SyntheticSpec.scenario(scenario, seed=seed, **overrides)
    records, truth = generate(spec)
    labels = truth.labels_for(records)
    rows = []
    for param in params:
        led_cfg, med_cfg = detector_configs(scenario, param, spec)
        for method, cls, cfg in (
            ("led", LEDDetector, led_cfg),
            ("med", MEDDetector, med_cfg),
        ):
            detector = cls(cfg, seed=seed, box=spec.box, window=spec.time_window)
            try:
                part = detector.run(records).partition
            except ConfigError as err:
                logger.warning("param %s skipped: %s", param, err)
                score_nmi = score_f = np.nan
            else:
                score_nmi = nmi(part, labels)
                score_f = f_beta(part, labels, beta=2.0)
            rows.append([method, scenario, float(param), trial, score_nmi, score_f])
    return rows


class ScenarioRunner(Component):
    """Runs LED and MED over a parameter grid for several seeded trials.

    Each trial draws one corpus that every parameter value shares.
    """

    def __init__(self, scenario, param_grid=DEFAULT_PARAMS, n_trials=10,
                 seed=0, overrides=None, threads=1) -> None:
        Component.__init__(self)
        if scenario not in SCENARIOS:
            raise ValueError(f"invalid 'scenario': {scenario!r}")
        if n_trials < 1:
            raise ValueError(f"invalid 'n_trials': {n_trials!r}")
        params = tuple(float(p) for p in param_grid)
        if not params or min(params) <= 0:
            raise ValueError(f"invalid 'param_grid': {param_grid!r}")
        self.scenario = int(scenario)
        self.param_grid = params
        self.n_trials = int(n_trials)
        self.seed = int(seed)
        self.overrides = dict(overrides or {})
        self.threads = int(threads)

    def __repr__(self) -> str:
        return (
            f"<{self.__class__.__name__}: scenario={self.scenario}, "
            f"trials={self.n_trials}, params={list(self.param_grid)}>"
        )

    def trial_seeds(self) -> list:
        children = np.random.SeedSequence(self.seed).spawn(self.n_trials)
        return [int(c.generate_state(1)[0]) for c in children]

    def _jobs(self):
        return [
            (self.scenario, self.param_grid, trial, seed, self.overrides)
            for trial, seed in enumerate(self.trial_seeds())
        ]

    def _run_all(self):
        jobs = self._jobs()
        if self.threads > 1:
            with ProcessPoolExecutor(max_workers=self.threads) as pool:
                results = list(pool.map(_run_trial, jobs))
        else:
            results = [_run_trial(job) for job in jobs]
        return [row for rows in results for row in rows]

    def run(self) -> pd.DataFrame:
        self._logger.info(
            "scenario %d: %d trials over %d params",
            self.scenario, self.n_trials, len(self.param_grid),
        )
        rows = self._timed("trials", self._run_all)
        df = pd.DataFrame(rows, columns=COLUMNS)
        df = df.sort_values(["method", "param", "trial"], kind="stable")
        return df.reset_index(drop=True)


def run_scenario(scenario, param_grid=DEFAULT_PARAMS, n_trials=10, seed=0,
                 overrides=None, threads=1) -> pd.DataFrame:
    """Per-trial NMI and F2 of both methods at each parameter value.

    Parameters
    ----------
    scenario : int
        Preset number, see :meth:`SyntheticSpec.scenario`.
    param_grid : sequence of float
        Values shared by T_t, T_d (LED) and delta_t, delta_d (MED).
    n_trials : int
    seed : int
    overrides : dict, optional
        Spec overrides such as ``window=128`` or ``signal_terms_per_tweet=3``.
    threads : int
        Worker processes; trials are spread over them.

    Returns
    -------
    pandas.DataFrame
        Columns method, scenario, param, trial, nmi, f_measure.

    """
    runner = ScenarioRunner(scenario, param_grid, n_trials, seed, overrides, threads)
    return runner.run()


def aggregate(df) -> pd.DataFrame:
    """Mean and standard error of both metrics per method and param."""
    grouped = df.groupby(["method", "scenario", "param"], sort=True)
    out = grouped[["nmi", "f_measure"]].agg(["mean", "sem", "count"])
    out.columns = [f"{metric}_{stat}" for metric, stat in out.columns]
    return out.reset_index()
