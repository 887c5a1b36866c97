"""Asymptotic bias of the single-imputation variance of Y.

The imputed variable behaves like a regression on X with extra regressors M
and XM whose coefficients are the errors of the imputation parameters.  Taking
expectations over those errors, with (X, M, XM) held fixed, splits the bias of
the variance of Y into a quadratic term ``tr(Sigma_MXM Sigma_ab)`` and the
bias of the imputation residual variance weighted by p.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import UndefinedBias
from .population import PopulationSpec, stratum_x_moments, xymxm_moments

SI_METHODS = ("MLSI", "PDSI")


@dataclass(frozen=True)
class BiasReport:
    quad_term: float
    resid_term: float
    total: float
    spec: PopulationSpec
    n: int
    method: str
    nu_prior: int


def var_beta_ml(spec: PopulationSpec, n0_effective: float) -> np.ndarray:
    """Asymptotic covariance of the complete-case intercept and slope.

    Evaluated at the population moments of X in the observed stratum.  The
    (2, 2) entry is also the bias of the squared slope.
    """
    if not n0_effective > 0:
        raise ValueError("n0_effective must be positive")
    m, v = stratum_x_moments(spec, 0)
    return spec.resid_var / n0_effective * np.array([[1.0 + m * m / v, -m / v], [-m / v, 1.0 / v]])


def bias_resid_var(method: str, n0: float, nu_prior: int, sigma2_yx: float) -> float:
    """Bias of the residual variance used for imputation.

    ``method="ML"`` is the n0-divisor ML estimate; ``"PD"`` a posterior draw.

    Raises:
        UndefinedBias: PD with ``(n0 - 2) - (2 - nu_prior) <= 0``.  The
            denominator is the posterior df minus 2, and the inverse
            chi-square mean does not exist below that.
    """
    method = method.upper()
    if method == "ML":
        if not n0 > 0:
            raise ValueError("n0 must be positive")
        return -2.0 * sigma2_yx / n0
    if method == "PD":
        denom = (n0 - 2) - (2 - nu_prior)
        if denom <= 0:
            raise UndefinedBias(f"bias undefined at n0={n0}, nu_prior={nu_prior} (posterior df {n0 - 2 + nu_prior} <= 2)")
        return (2 - nu_prior) / denom * sigma2_yx
    raise ValueError(f"unknown method {method!r}; expected 'ML' or 'PD'")


def quadratic_form_expectation(sigma_mxm, sigma_ab, beta: float, sigma2_x: float) -> float:
    """E[v' S v] for random coefficient errors v with covariance ``sigma_ab``.

    Adds the deterministic contribution of the slope, ``beta^2 * sigma2_x``.
    """
    return float(np.trace(np.asarray(sigma_mxm) @ np.asarray(sigma_ab)) + beta**2 * sigma2_x)


def bias_sigma2_y(spec: PopulationSpec, n: int, method: str = "MLSI", nu_prior: int = 0, exact_pd_factor: bool = False) -> BiasReport:
    """Asymptotic bias of the variance of Y after one imputation.

    n0 is taken at its expectation n(1 - p).  PDSI doubles the ML coefficient
    covariance; ``exact_pd_factor=True`` uses ``1 + n0/(n0 + nu_prior - 4)``
    instead of 2.

    Raises:
        UndefinedBias: the PD residual-variance bias has a zero denominator.
    """
    method = method.upper()
    if method not in SI_METHODS:
        raise ValueError(f"unknown method {method!r}; expected one of {SI_METHODS}")
    n0 = n * (1.0 - spec.p)
    sigma_ab = var_beta_ml(spec, n0)
    if method == "PDSI":
        if exact_pd_factor:
            if n0 + nu_prior - 4 <= 0:
                raise UndefinedBias("posterior variance of the coefficients is undefined")
            factor = 1.0 + n0 / (n0 + nu_prior - 4)
        else:
            factor = 2.0
        sigma_ab = factor * sigma_ab
        resid = bias_resid_var("PD", n0, nu_prior, spec.resid_var)
    else:
        resid = bias_resid_var("ML", n0, nu_prior, spec.resid_var)
    quad = float(np.trace(xymxm_moments(spec).sigma_mxm @ sigma_ab))
    resid_term = spec.p * resid
    return BiasReport(quad, resid_term, quad + resid_term, spec, n, method, nu_prior if method == "PDSI" else 0)
