import logging

import numpy as np
import pandas as pd
import pytest

from geoscale.detect.base import ConfigError
from geoscale.synth import scenarios
from geoscale.synth.generator import SyntheticSpec
from geoscale.synth.scenarios import (
    DEFAULT_PARAMS,
    ScenarioRunner,
    aggregate,
    detector_configs,
    run_scenario,
)


def test_detector_configs():
    spec = SyntheticSpec.scenario(1)
    led, med = detector_configs(1, 2.0, spec)
    assert led.T_t == 2.0
    assert led.T_d == 2000.0
    assert med.delta_t == 2.0
    assert med.delta_d == 2000.0
    # 5 cells and 16 bins
    assert med.n_scale == 3
    assert med.l_filter is False
    assert detector_configs(1, 0.25, spec)[1].n_scale == 4
    assert detector_configs(1, 8.0, spec)[1].n_scale == 1
    _, noisy = detector_configs(3, 1.0, SyntheticSpec.scenario(3))
    assert noisy.l_filter is True
    assert noisy.l_filter_probes == (0.5, 1.0, 1.5, 2.0)
    assert noisy.l_filter_threshold == 1.0


def test_trial_seeds():
    a = ScenarioRunner(1, n_trials=5, seed=7).trial_seeds()
    b = ScenarioRunner(1, n_trials=5, seed=7).trial_seeds()
    assert a == b
    assert len(set(a)) == 5
    assert ScenarioRunner(1, n_trials=5, seed=8).trial_seeds() != a
    # a longer run starts with the same trials
    assert ScenarioRunner(1, n_trials=8, seed=7).trial_seeds()[:5] == a


def test_runner_invalid():
    with pytest.raises(ValueError, match="scenario"):
        ScenarioRunner(9)
    with pytest.raises(ValueError, match="n_trials"):
        ScenarioRunner(1, n_trials=0)
    with pytest.raises(ValueError, match="param_grid"):
        ScenarioRunner(1, param_grid=(0.0, 1.0))
    assert "scenario=1" in repr(ScenarioRunner(1))
    assert DEFAULT_PARAMS == (0.25, 0.5, 1.0, 2.0, 4.0, 8.0)


def test_run_scenario_small():
    df = run_scenario(1, param_grid=(1.0, 2.0), n_trials=2, seed=3)
    assert list(df.columns) == ["method", "scenario", "param", "trial", "nmi",
                                "f_measure"]
    assert len(df) == 2 * 2 * 2
    assert df["method"].tolist() == ["led"] * 4 + ["med"] * 4
    assert df["param"].tolist() == [1.0, 1.0, 2.0, 2.0] * 2
    assert df["nmi"].between(0.0, 1.0).all()
    assert df["f_measure"].between(0.0, 1.0).all()
    again = run_scenario(1, param_grid=(1.0, 2.0), n_trials=2, seed=3)
    pd.testing.assert_frame_equal(df, again)


def test_run_scenario_skipped_param(monkeypatch, caplog):
    class FailingMED(scenarios.MEDDetector):
        def run(self, records):
            raise ConfigError("too many scales")

    monkeypatch.setattr(scenarios, "MEDDetector", FailingMED)
    with caplog.at_level(logging.WARNING, logger="geoscale"):
        df = run_scenario(1, param_grid=(1.0,), n_trials=1, seed=3)
    assert "param 1.0 skipped: too many scales" in caplog.text
    assert df.loc[df["method"] == "med", "nmi"].isna().all()
    assert df.loc[df["method"] == "led", "nmi"].notna().all()


def test_aggregate():
    df = pd.DataFrame(
        {
            "method": ["led", "led", "med", "med"],
            "scenario": [1, 1, 1, 1],
            "param": [1.0, 1.0, 1.0, 1.0],
            "trial": [0, 1, 0, 1],
            "nmi": [0.2, 0.4, 0.6, np.nan],
            "f_measure": [0.1, 0.3, 0.5, 0.7],
        },
    )
    out = aggregate(df)
    assert list(out.columns) == [
        "method", "scenario", "param", "nmi_mean", "nmi_sem", "nmi_count",
        "f_measure_mean", "f_measure_sem", "f_measure_count",
    ]
    led, med = out.iloc[0], out.iloc[1]
    assert led["nmi_mean"] == pytest.approx(0.3)
    assert led["nmi_sem"] == pytest.approx(0.1)
    assert med["nmi_count"] == 1
    assert med["f_measure_mean"] == pytest.approx(0.6)


# the trend checks use event-wide signal sets
PER_EVENT = {"signal_draw": "event"}


def mean_by(df, method, metric):
    sub = df[df["method"] == method]
    return sub.groupby("param")[metric].mean()


@pytest.mark.slow
def test_scenario1_trend():
    df = run_scenario(1, n_trials=10, seed=0, overrides=PER_EVENT)
    for metric in ("nmi", "f_measure"):
        led = mean_by(df, "led", metric)
        med = mean_by(df, "med", metric)
        for param in (0.5, 1.0):
            assert med[param] > led[param]
    led_f = mean_by(df, "led", "f_measure")
    assert 1.0 <= led_f.idxmax() <= 4.0


@pytest.mark.slow
def test_scenario2_trend():
    df = run_scenario(2, n_trials=10, seed=0, overrides=PER_EVENT)
    led = mean_by(df, "led", "f_measure")
    med = mean_by(df, "med", "f_measure")
    for param in (0.25, 0.5):
        assert med[param] - led[param] >= 0.1


@pytest.mark.slow
def test_scenario3_nmi_drops():
    df = run_scenario(3, n_trials=10, seed=0, overrides=PER_EVENT)
    led = mean_by(df, "led", "nmi")
    upper = led.loc[[2.0, 4.0, 8.0]].to_numpy()
    assert np.all(np.diff(upper) <= 1e-9)
