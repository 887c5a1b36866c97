import numpy as np
import pytest

from miml.bias import bias_resid_var, bias_sigma2_y, quadratic_form_expectation, var_beta_ml
from miml.errors import UndefinedBias
from miml.population import PopulationSpec, stratum_x_moments, xymxm_moments

MXN = PopulationSpec(0.5, 0.5, "MXN")
MCAR = PopulationSpec(0.5, 0.5, "MCAR")


def test_var_beta_examples():
    assert var_beta_ml(MCAR, 12.5)[1, 1] == pytest.approx(0.06)
    assert var_beta_ml(MXN, 12.5)[1, 1] == pytest.approx(0.16511, abs=1e-5)
    np.testing.assert_allclose(var_beta_ml(MXN, 25.0), var_beta_ml(MXN, 12.5) / 2)
    with pytest.raises(ValueError):
        var_beta_ml(MXN, 0)


def test_var_beta_monte_carlo_mxn():
    # OLS slopes on X >= 0 designs at n0 = 50 (n = 100 expected split)
    rng = np.random.default_rng(0)
    x = np.abs(rng.standard_normal((200_000, 50)))
    y = 0.5 * x + np.sqrt(0.75) * rng.standard_normal(x.shape)
    dx = x - x.mean(1, keepdims=True)
    b = (dx * y).sum(1) / (dx**2).sum(1)
    assert b.var() == pytest.approx(var_beta_ml(MXN, 50)[1, 1], rel=0.10)
    assert (b**2).mean() - 0.25 == pytest.approx(b.var(), rel=0.02)


def test_resid_bias_examples():
    assert bias_resid_var("PD", 12, 2, 0.75) == 0
    assert bias_resid_var("PD", 40, 2, 0.3) == 0
    assert bias_resid_var("PD", 12, 0, 0.75) == pytest.approx(0.1875)
    assert bias_resid_var("ML", 12.5, 0, 0.75) == pytest.approx(-0.12)
    with pytest.raises(UndefinedBias):
        bias_resid_var("PD", 6, -2, 0.75)
    with pytest.raises(UndefinedBias):
        bias_resid_var("PD", 4, -2, 0.75)
    with pytest.raises(ValueError):
        bias_resid_var("XX", 12, 0, 0.75)


def test_resid_bias_pd_monte_carlo():
    # sigma2_PD = s2_ML * n0 / chi2_{n0-2+nu}, with s2_ML = sigma2 * chi2_{n0-2} / n0
    rng = np.random.default_rng(1)
    n0, nu, s2 = 12, 0, 0.75
    ml = s2 * rng.chisquare(n0 - 2, 10**6) / n0
    pd = ml * n0 / rng.chisquare(n0 - 2 + nu, 10**6)
    assert pd.mean() - s2 == pytest.approx(bias_resid_var("PD", n0, nu, s2), rel=0.02)


def test_bias_reports():
    r = bias_sigma2_y(MXN, 100, "MLSI")
    assert r.total == r.quad_term + r.resid_term
    assert r.quad_term == pytest.approx(0.037531, abs=1e-5)
    assert r.resid_term == pytest.approx(-0.015)
    assert bias_sigma2_y(MCAR, 100, "MLSI").total == pytest.approx(-0.00375)
    assert bias_sigma2_y(MXN, 100, "PDSI").total == pytest.approx(0.0913625, abs=1e-6)
    assert bias_sigma2_y(MXN, 25, "PDSI", 2).resid_term == 0
    with pytest.raises(UndefinedBias):
        bias_sigma2_y(MCAR, 8, "PDSI", -2)
    exact = bias_sigma2_y(MXN, 100, "PDSI", exact_pd_factor=True)
    assert exact.quad_term == pytest.approx(bias_sigma2_y(MXN, 100, "PDSI").quad_term / 2 * (1 + 50 / 46))


def test_sign_pattern_and_ordering():
    for n in (25, 100):
        assert bias_sigma2_y(MCAR, n, "MLSI").total < 0
        assert bias_sigma2_y(MXN, n, "MLSI").total > 0
        pd = bias_sigma2_y(MXN, n, "PDSI").total
        assert pd > bias_sigma2_y(MXN, n, "MLSI").total > 0
        assert bias_sigma2_y(MCAR, n, "PDSI").total > 0
    # Table 1 MLMI n=25 MXN: E(var_y) = 1.12
    assert bias_sigma2_y(MXN, 25, "MLSI").total == pytest.approx(0.12, rel=0.5)


def test_quad_term_scaling():
    a = bias_sigma2_y(MXN, 50, "MLSI").quad_term
    assert bias_sigma2_y(MXN, 100, "MLSI").quad_term == pytest.approx(a / 2)


def test_quadratic_form_examples():
    S = np.array([[0.25, -0.2], [-0.2, 0.34]])
    assert quadratic_form_expectation(S, np.zeros((2, 2)), 0.5, 1.0) == 0.25
    assert quadratic_form_expectation(np.eye(2), np.eye(2), 0.5, 2.0) == pytest.approx(2.5)


def test_quadratic_form_monte_carlo():
    rng = np.random.default_rng(2)
    for _ in range(5):
        A = rng.normal(size=(2, 2))
        B = rng.normal(size=(2, 2))
        S, V = A @ A.T, B @ B.T
        v = rng.multivariate_normal([0, 0], V, 10**6)
        q = np.einsum("ni,ij,nj->n", v, S, v)
        se = q.std() / np.sqrt(q.size)
        assert abs(q.mean() + 0.25 - quadratic_form_expectation(S, V, 0.5, 1.0)) < 3 * se + 1e-12
