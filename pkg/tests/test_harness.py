import math

import numpy as np
import pytest

from miml.errors import ConfigError
from miml.harness import (
    EstimatorSpec,
    ExperimentConfig,
    IntervalSpec,
    run_experiment,
    simulate,
    simulate_block,
    summarize_intervals,
    summarize_points,
)

BASE = dict(
    n=25,
    pattern="MXN",
    estimators=["ML", "MLMI(D=5)", "PDMI(D=5,nu=0)"],
    intervals=[{"estimator": "ML", "method": "tstar", "bounded": True}, {"estimator": "PDMI(D=5,nu=0)", "method": "t"}],
    replications=500,
    seed=3,
)


def test_estimator_parsing():
    assert EstimatorSpec.parse("PDMI(D=5,nu=-2)") == EstimatorSpec("PDMI", 5, -2)
    assert EstimatorSpec.parse({"method": "mlmi", "D": 3}).label == "MLMI(D=3)"
    assert EstimatorSpec.parse("ML").label == "ML"
    with pytest.raises(ConfigError):
        EstimatorSpec.parse("EM")
    assert IntervalSpec("ML", "tstar", True).label == "ML/tstar-bounded"


def test_config_round_trip():
    cfg = ExperimentConfig.from_dict(BASE)
    assert ExperimentConfig.from_dict(cfg.to_dict()) == cfg
    assert cfg.truth.tolist() == [0, 0.5, 0.75, 0, 1, 0.5, 0, 0.5, 0.75]
    assert cfg.min_complete == 3
    assert cfg.replace(estimators=["PDMI(D=5,nu=-2)"], intervals=[]).min_complete == 5


@pytest.mark.parametrize(
    "change",
    [
        {"replications": 0},
        {"pattern": "MAR"},
        {"p": 0.3},
        {"rho": 1.0},
        {"estimators": ["ML", "ML"]},
        {"intervals": [{"estimator": "MLMI(D=5)", "method": "t"}]},
        {"intervals": [{"estimator": "ML", "method": "student"}]},
        {"intervals": [{"estimator": "PDMI(D=9,nu=0)", "method": "t"}]},
        {"seed": -1},
        {"n": 3},
        {"level": 1.0},
        {"bogus": 1},
    ],
)
def test_invalid_configs(change):
    d = dict(BASE, **change)
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict(d)


def test_summarize_points_examples():
    pts = np.array([0.4, 0.6]).reshape(2, 1, 1)
    mean, sd, rmse, rank = summarize_points(pts, np.array([0.5]))
    assert mean[0, 0] == pytest.approx(0.5) and rmse[0, 0] == pytest.approx(0.1)
    assert sd[0, 0] == pytest.approx(math.sqrt(0.02))
    one = summarize_points(np.array([0.7]).reshape(1, 1, 1), np.array([0.5]))
    assert math.isnan(one[1][0, 0]) and one[2][0, 0] == pytest.approx(0.2)
    same = np.ones((4, 3, 2))
    assert summarize_points(same, np.zeros(2))[3][:, 0].tolist() == [1, 2, 3]


def test_rank_is_permutation():
    rng = np.random.default_rng(0)
    _, _, _, rank = summarize_points(rng.normal(size=(50, 5, 9)), np.zeros(9))
    assert all(sorted(rank[:, k]) == [1, 2, 3, 4, 5] for k in range(9))


def test_summarize_intervals_retains_extremes():
    lengths = np.array([1.0, 1e300, 1e300]).reshape(3, 1, 1)
    covered = np.ones((3, 1, 1), bool)
    mean_len, cov = summarize_intervals(lengths, covered)
    assert mean_len[0, 0] == pytest.approx(2e300 / 3) and cov[0, 0] == 1.0
    inf_len, _ = summarize_intervals(np.array([np.inf, 1.0]).reshape(2, 1, 1), np.ones((2, 1, 1), bool))
    assert inf_len[0, 0] == math.inf


def test_worker_count_does_not_change_results():
    cfg = ExperimentConfig.from_dict(dict(BASE, replications=4500))
    a = simulate(cfg, workers=1)
    b = simulate(cfg, workers=3)
    for k in ("points", "lengths", "covered", "df", "attempts"):
        np.testing.assert_array_equal(getattr(a, k), getattr(b, k))


def test_blocks_are_prefix_stable():
    cfg = ExperimentConfig.from_dict(BASE)
    full = simulate_block(cfg, 0, 100)
    part = simulate_block(cfg, 40, 60)
    np.testing.assert_array_equal(full.points[40:60], part.points)


def test_regeneration_counted():
    cfg = ExperimentConfig.from_dict(dict(BASE, n=8, pattern="MCAR", estimators=["PDMI(D=5,nu=-2)"], intervals=[], replications=400))
    r = simulate(cfg)
    assert r.regenerations > 0
    assert np.isfinite(r.points).all()


def test_summary_shapes_and_ranges():
    s = run_experiment(ExperimentConfig.from_dict(BASE))
    assert s.mean.shape == (3, 9) and s.ci_length.shape == (2, 9)
    assert np.all((s.ci_coverage >= 0) & (s.ci_coverage <= 1))
    assert s.replications == 500
    assert s.point("ML", "mean", "beta_yx") == pytest.approx(0.5, abs=0.1)
    assert np.all(s.df_below[3.0][0] == 0)  # bounded df never drop below 3
    assert s.rows()[0][:3] == ("point", "ML", "mean")


@pytest.mark.slow
def test_monte_carlo_rate():
    # doubling replications shrinks the spread of repeated means by about sqrt(2)
    def spread(R):
        means = [run_experiment(ExperimentConfig(n=25, pattern="MCAR", replications=R, seed=s)).mean[0, 1] for s in range(10)]
        return np.std(means, ddof=1)

    ratio = spread(400) / spread(800)
    assert 1.0 < ratio < 2.2
