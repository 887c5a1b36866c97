import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from miml.imputation import ImputationConfig, MIResult, Method, run_mi
from miml.inference import (
    bound_df,
    ci_normal,
    ci_t,
    ci_variance_cuberoot,
    df_ml,
    df_ml_star,
    df_pdmi,
    interval_bounds,
    ml_interval,
    pdmi_interval,
    t_quantile,
    z_quantile,
)
from miml.population import Dataset, PopulationSpec, sample_dataset


def test_df_examples():
    d = df_pdmi(0.5, 5, 23)
    assert d.nu_d == pytest.approx(16)
    assert d.nu_obs == pytest.approx(10.615384615384615)
    assert d.raw == pytest.approx(6.3816, abs=1e-4)
    assert df_pdmi(0.0, 5, 23).raw == pytest.approx(23 * 24 / 26)
    g1 = df_pdmi(1.0, 5, 23)
    assert g1.raw == 0 and g1.bounded == 3
    assert df_ml_star(25, 2, 0.5).raw == 10.5
    assert df_ml_star(25, 2, 0.0).raw == 23
    s = df_ml_star(25, 2, 0.95)
    assert s.raw == pytest.approx(-0.75) and s.bounded == 3
    assert df_ml(23, 0.5).raw == pytest.approx(10.615384615384615)
    assert df_ml(23, 0.0).raw == pytest.approx(21.230769230769230)
    assert df_ml(23, 1.0).raw == 0 and df_ml(23, 1.0).bounded == 3
    with pytest.raises(ValueError):
        df_pdmi(0.5, 1, 23)


def test_t_quantile_examples():
    assert t_quantile(1, 0.975) == pytest.approx(12.7062, abs=1e-3)
    assert t_quantile(0.5, 0.975) == pytest.approx(164.56, abs=0.5)
    assert t_quantile(0.25, 0.975) == pytest.approx(43640, rel=1e-3)
    assert t_quantile(math.inf, 0.975) == pytest.approx(1.959964, abs=1e-6)
    assert t_quantile(10, 0.5) == 0.0
    assert t_quantile(10, 0.025) == pytest.approx(-t_quantile(10, 0.975))


@settings(max_examples=300, deadline=None)
@given(st.floats(0.3, 1e6), st.floats(0.001, 0.999))
def test_t_quantile_against_scipy(df, prob):
    assert t_quantile(df, prob) == pytest.approx(stats.t.ppf(prob, df), rel=1e-8, abs=1e-10)


def test_t_quantile_vectorized():
    df = np.array([1.0, 3.0, np.inf])
    np.testing.assert_allclose(t_quantile(df, 0.975), stats.t.ppf(0.975, df))


def test_intervals():
    i = ci_normal(1.0, 0.5)
    assert i.lower == pytest.approx(1 - 1.959964 * 0.5) and i.df_used is None
    t = ci_t(1.0, 0.5, 10)
    assert t.length == pytest.approx(2 * 0.5 * 2.228139, rel=1e-6)
    assert i.covers(1.0) and not i.covers(3.0)
    with pytest.raises(ValueError):
        ci_t(1, 0.5, 0)
    with pytest.raises(ValueError):
        ci_normal(1, -1)


def test_cube_root_interval():
    # frozen from an independent delta-rule computation: g = 0.75^(1/3),
    # se_g = 0.28 / (3 * 0.75^(2/3)) = 0.113065, q = t_0.975(10) = 2.228139
    i = ci_variance_cuberoot(0.75, 0.28, 10)
    assert i.lower == pytest.approx(0.28312119426, rel=1e-9)
    assert i.upper == pytest.approx(1.56285645472, rel=1e-9)
    assert i.transformed and i.df_used == 10
    z = ci_variance_cuberoot(0.75, 0.28)
    assert z.df_used is None and z.upper < i.upper
    with pytest.raises(ValueError):
        ci_variance_cuberoot(-0.1, 0.3)


def test_interval_bounds_infinite_quantile():
    lo, hi = interval_bounds(np.array([0.5, 0.7]), np.array([0.1, 0.1]), np.inf, np.array([False, True]))
    assert np.all(np.isneginf(lo)) and np.all(np.isposinf(hi))
    lo, hi = interval_bounds(np.array([0.5]), np.array([0.0]), np.inf, np.array([False]))
    assert lo[0] == hi[0] == 0.5


@settings(max_examples=200, deadline=None)
@given(st.floats(-1e3, 1e3), st.floats(0, 1), st.integers(2, 100), st.integers(3, 500))
def test_bounded_df_at_least_three(raw, gamma, D, nu_comp):
    assert bound_df(raw) >= 3
    d = df_pdmi(gamma, D, nu_comp)
    assert d.bounded >= 3 and d.raw >= 0
    assert df_ml_star(max(nu_comp, 3), 2, gamma).bounded >= 3


def test_ml_interval_complete_data():
    rng = np.random.default_rng(0)
    ds = sample_dataset(PopulationSpec(0.5, 0.0, "MCAR"), 25, rng)
    iv = ml_interval(ds, "beta_yx", "t", bounded=False)
    assert iv.df_used == pytest.approx(23 * 24 / 26)
    iv2 = ml_interval(ds, "beta_yx", "tstar", bounded=False)
    assert iv2.df_used == pytest.approx(23)
    assert ml_interval(ds, "var_yx", "normal").transformed


def test_pdmi_interval_degenerate_and_regular():
    nine = np.ones(9)
    mi = MIResult(nine, nine, nine * 0.0, nine, nine * 1.0, 5, Method.PDMI, 0)
    iv = pdmi_interval(mi, 25, "beta_yx", bounded=False)
    assert math.isinf(iv.length)
    assert np.isfinite(pdmi_interval(mi, 25, "beta_yx", bounded=True).length)
    rng = np.random.default_rng(2)
    ds = sample_dataset(PopulationSpec(0.5, 0.5, "MXN"), 25, rng)
    res = run_mi(ds, ImputationConfig("PDMI", 5), rng)
    iv = pdmi_interval(res, 25, "mu_y")
    assert iv.lower < res["mu_y"]["point"] < iv.upper and iv.df_used >= 3
