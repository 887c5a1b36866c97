"""Closed-form full-information maximum likelihood for incomplete bivariate data.

With X complete and only Y missing, the likelihood factors into the marginal
of X (all n cases) and the regression of Y on X (the n0 complete cases).  The
five base parameters are therefore estimated in closed form, and every other
estimand is a smooth function of them.

Base parameters are ordered ``(mu_x, var_x, alpha_yx, beta_yx, var_yx)``
throughout; estimands follow :data:`ESTIMANDS`.
"""

from __future__ import annotations

from dataclasses import astuple, dataclass, fields
from typing import NamedTuple

import numpy as np

from .errors import DegenerateDesign, InsufficientCompleteCases
from .population import Dataset

ESTIMANDS = (
    "alpha_yx",
    "beta_yx",
    "var_yx",
    "mu_y",
    "var_y",
    "cov_xy",
    "alpha_xy",
    "beta_xy",
    "var_xy",
)
VARIANCE_ESTIMANDS = ("var_yx", "var_y", "var_xy")
BASE_PARAMS = ("mu_x", "var_x", "alpha_yx", "beta_yx", "var_yx")
# estimands plus the two X-marginal parameters, for SE and FMI queries
EXTENDED = ESTIMANDS + ("mu_x", "var_x")
IS_VARIANCE = np.array([e in VARIANCE_ESTIMANDS for e in ESTIMANDS])


def estimand_index(name: str) -> int:
    try:
        return EXTENDED.index(name)
    except ValueError:
        raise ValueError(f"unknown estimand {name!r}; expected one of {EXTENDED}") from None


@dataclass(frozen=True)
class ThetaBase:
    mu_x: float
    var_x: float
    alpha_yx: float
    beta_yx: float
    var_yx: float

    def to_array(self) -> np.ndarray:
        return np.array(astuple(self), dtype=float)

    @classmethod
    def from_array(cls, a) -> "ThetaBase":
        return cls(*(float(v) for v in np.asarray(a)))


@dataclass(frozen=True)
class EstimateSet:
    alpha_yx: float
    beta_yx: float
    var_yx: float
    mu_y: float
    var_y: float
    cov_xy: float
    alpha_xy: float
    beta_xy: float
    var_xy: float

    def to_array(self) -> np.ndarray:
        return np.array(astuple(self), dtype=float)

    @classmethod
    def from_array(cls, a) -> "EstimateSet":
        return cls(*(float(v) for v in np.asarray(a)))

    def as_dict(self) -> dict[str, float]:
        return {f.name: getattr(self, f.name) for f in fields(self)}


class CompleteCaseDesign(NamedTuple):
    """Complete-case regressor summary: count, mean, and n0-divisor variance."""

    n0: np.ndarray
    mean: np.ndarray
    var: np.ndarray


def derive_estimands(theta) -> np.ndarray:
    """Map base parameters (..., 5) to the nine estimands (..., 9)."""
    theta = np.asarray(theta, dtype=float)
    mu_x, var_x, a, b, s2 = np.moveaxis(theta, -1, 0)
    mu_y = a + b * mu_x
    cov = b * var_x
    var_y = b * b * var_x + s2
    b_xy = cov / var_y
    a_xy = mu_x - b_xy * mu_y
    v_xy = var_x - b_xy * b_xy * var_y
    return np.stack([a, b, s2, mu_y, var_y, cov, a_xy, b_xy, v_xy], axis=-1)


def estimand_gradients(theta) -> np.ndarray:
    """Jacobian (..., 11, 5) of :data:`EXTENDED` with respect to the base parameters."""
    theta = np.asarray(theta, dtype=float)
    mu_x, var_x, a, b, s2 = np.moveaxis(theta, -1, 0)
    zero = np.zeros_like(mu_x)
    one = np.ones_like(mu_x)

    def vec(*parts):
        return np.stack(parts, axis=-1)

    g_a = vec(zero, zero, one, zero, zero)
    g_b = vec(zero, zero, zero, one, zero)
    g_s2 = vec(zero, zero, zero, zero, one)
    g_mux = vec(one, zero, zero, zero, zero)
    g_varx = vec(zero, one, zero, zero, zero)

    mu_y = a + b * mu_x
    cov = b * var_x
    var_y = b * b * var_x + s2
    b_xy = cov / var_y
    g_muy = vec(b, zero, one, mu_x, zero)
    g_cov = vec(zero, b, zero, var_x, zero)
    g_vary = vec(zero, b * b, zero, 2.0 * b * var_x, one)
    g_bxy = (g_cov * var_y[..., None] - cov[..., None] * g_vary) / (var_y**2)[..., None]
    g_axy = g_mux - mu_y[..., None] * g_bxy - b_xy[..., None] * g_muy
    g_vxy = g_varx - (2.0 * b_xy * var_y)[..., None] * g_bxy - (b_xy**2)[..., None] * g_vary
    return np.stack([g_a, g_b, g_s2, g_muy, g_vary, g_cov, g_axy, g_bxy, g_vxy, g_mux, g_varx], axis=-2)


def fit_ml_arrays(x, y, observed) -> tuple[np.ndarray, CompleteCaseDesign]:
    """Vectorized ML fit over a leading batch shape; cases on the last axis.

    ``y`` may hold anything (including NaN) where ``observed`` is False.
    No validity checks are made; see :func:`estimate_ml` for the checked path.
    """
    x = np.asarray(x, dtype=float)
    observed = np.asarray(observed, dtype=bool)
    y = np.where(observed, y, 0.0)
    w = observed.astype(float)
    n0 = w.sum(axis=-1)
    mu_x = x.mean(axis=-1)
    var_x = np.square(x - mu_x[..., None]).mean(axis=-1)
    with np.errstate(invalid="ignore", divide="ignore"):
        xbar = (w * x).sum(axis=-1) / n0
        ybar = (w * y).sum(axis=-1) / n0
        dx = w * (x - xbar[..., None])
        sxx = np.square(dx).sum(axis=-1)
        beta = (dx * (y - ybar[..., None])).sum(axis=-1) / sxx
        alpha = ybar - beta * xbar
        resid = w * (y - alpha[..., None] - beta[..., None] * x)
        s2 = np.square(resid).sum(axis=-1) / n0
        design = CompleteCaseDesign(n0, xbar, sxx / n0)
    return np.stack([mu_x, var_x, alpha, beta, s2], axis=-1), design


def _check(dataset: Dataset) -> None:
    if dataset.n0 < 3:
        raise InsufficientCompleteCases(f"need at least 3 complete cases, got {dataset.n0}")
    xc = dataset.x[dataset.observed]
    if np.ptp(xc) == 0.0:
        raise DegenerateDesign("X has no spread among the complete cases")


def estimate_ml(dataset: Dataset) -> tuple[ThetaBase, EstimateSet]:
    """ML base parameters and the nine estimands for one dataset.

    Raises:
        InsufficientCompleteCases: fewer than 3 complete cases.
        DegenerateDesign: all complete-case X values are equal.
    """
    _check(dataset)
    theta, _ = fit_ml_arrays(dataset.x, dataset.y, dataset.observed)
    return ThetaBase.from_array(theta), EstimateSet.from_array(derive_estimands(theta))


def complete_x_sums(dataset: Dataset) -> tuple[int, float, float]:
    """(n0, sum of x, sum of x^2) over the complete cases."""
    xc = dataset.x[dataset.observed]
    return xc.size, float(xc.sum()), float(np.dot(xc, xc))


def ml_regression_cov(theta: ThetaBase, complete_x_sums) -> np.ndarray:
    """Covariance matrix of the ML intercept and slope of Y on X."""
    n0, sx, sxx = complete_x_sums
    if n0 < 3:
        raise InsufficientCompleteCases(f"need at least 3 complete cases, got {n0}")
    m = sx / n0
    v = sxx / n0 - m * m
    if not v > 0.0:
        raise DegenerateDesign("X has no spread among the complete cases")
    return theta.var_yx / n0 * np.array([[1.0 + m * m / v, -m / v], [-m / v, 1.0 / v]])


def observed_information(dataset: Dataset, theta: ThetaBase) -> np.ndarray:
    """Negative Hessian of the observed-data log-likelihood at ``theta``.

    Block diagonal: the X marginal uses all n cases, the regression of Y on X
    uses the complete cases only.
    """
    _check(dataset)
    x = dataset.x
    n = x.size
    mu, v, a, b, s2 = theta.to_array()
    d = x - mu
    info = np.zeros((5, 5))
    info[0, 0] = n / v
    info[0, 1] = info[1, 0] = d.sum() / v**2
    info[1, 1] = -n / (2 * v**2) + np.dot(d, d) / v**3

    xc = x[dataset.observed]
    r = dataset.y[dataset.observed] - a - b * xc
    n0 = xc.size
    reg = np.empty((3, 3))
    reg[0, 0] = n0 / s2
    reg[0, 1] = reg[1, 0] = xc.sum() / s2
    reg[1, 1] = np.dot(xc, xc) / s2
    reg[0, 2] = reg[2, 0] = r.sum() / s2**2
    reg[1, 2] = reg[2, 1] = np.dot(xc, r) / s2**2
    reg[2, 2] = -n0 / (2 * s2**2) + np.dot(r, r) / s2**3
    info[2:, 2:] = reg
    return info


def complete_information(theta: ThetaBase, n: int) -> np.ndarray:
    """Expected information that n complete cases would carry at ``theta``."""
    if n < 1:
        raise ValueError("n must be positive")
    mu, v, _, _, s2 = theta.to_array()
    info = np.zeros((5, 5))
    info[0, 0] = n / v
    info[1, 1] = n / (2 * v**2)
    info[2, 2] = n / s2
    info[2, 3] = info[3, 2] = n * mu / s2
    info[3, 3] = n * (v + mu * mu) / s2
    info[4, 4] = n / (2 * s2**2)
    return info


def se_for_estimand(theta: ThetaBase, info: np.ndarray, estimand: str) -> float:
    """Delta-method standard error from an information matrix.

    Raises:
        numpy.linalg.LinAlgError: ``info`` is singular.
    """
    g = estimand_gradients(theta.to_array())[estimand_index(estimand)]
    cov = np.linalg.inv(info)
    return float(np.sqrt(max(g @ cov @ g, 0.0)))


def fraction_missing_information(dataset: Dataset, estimand: str) -> float:
    """1 - (complete-data SE / observed-data SE)^2, clamped to [0, 1]."""
    theta, _ = estimate_ml(dataset)
    se_obs = se_for_estimand(theta, observed_information(dataset, theta), estimand)
    se_comp = se_for_estimand(theta, complete_information(theta, dataset.n), estimand)
    return float(np.clip(1.0 - (se_comp / se_obs) ** 2, 0.0, 1.0))


@dataclass
class InfoReport:
    obs_info: np.ndarray
    comp_info: np.ndarray
    se_obs: dict[str, float]
    se_comp: dict[str, float]
    gamma: dict[str, float]


def information_report(dataset: Dataset) -> InfoReport:
    """Both information matrices plus per-estimand SEs and FMI."""
    theta, _ = estimate_ml(dataset)
    obs = observed_information(dataset, theta)
    comp = complete_information(theta, dataset.n)
    se_obs = {e: se_for_estimand(theta, obs, e) for e in EXTENDED}
    se_comp = {e: se_for_estimand(theta, comp, e) for e in EXTENDED}
    gamma = {e: float(np.clip(1.0 - (se_comp[e] / se_obs[e]) ** 2, 0.0, 1.0)) for e in EXTENDED}
    return InfoReport(obs, comp, se_obs, se_comp, gamma)


# -- batch path used by the simulation harness ---------------------------------


def _block_cov(n_x, var_x, s2, n_reg, m, v):
    shape = np.broadcast(var_x, s2, m, v).shape
    cov = np.zeros(shape + (5, 5))
    cov[..., 0, 0] = var_x / n_x
    cov[..., 1, 1] = 2.0 * var_x**2 / n_x
    k = s2 / n_reg
    cov[..., 2, 2] = k * (1.0 + m * m / v)
    cov[..., 2, 3] = cov[..., 3, 2] = -k * m / v
    cov[..., 3, 3] = k / v
    cov[..., 4, 4] = 2.0 * s2**2 / n_reg
    return cov


def ml_covariances(theta, design: CompleteCaseDesign, n: int):
    """Inverse observed and inverse complete information at the ML estimates.

    At the maximum the score terms vanish, so both inverses are block
    diagonal with closed forms.
    """
    mu_x, var_x, _, _, s2 = np.moveaxis(np.asarray(theta), -1, 0)
    obs = _block_cov(n, var_x, s2, design.n0, design.mean, design.var)
    comp = _block_cov(n, var_x, s2, n, mu_x, var_x)
    return obs, comp


class MLBatch(NamedTuple):
    theta: np.ndarray
    estimates: np.ndarray
    se_obs: np.ndarray
    se_comp: np.ndarray
    gamma: np.ndarray
    design: CompleteCaseDesign


def ml_batch(x, y, observed) -> MLBatch:
    """ML estimates, observed/complete SEs, and FMI for a batch of datasets."""
    theta, design = fit_ml_arrays(x, y, observed)
    n = np.asarray(x).shape[-1]
    obs_cov, comp_cov = ml_covariances(theta, design, n)
    g = estimand_gradients(theta)[..., : len(ESTIMANDS), :]
    se_obs = np.sqrt(np.einsum("...ki,...ij,...kj->...k", g, obs_cov, g))
    se_comp = np.sqrt(np.einsum("...ki,...ij,...kj->...k", g, comp_cov, g))
    with np.errstate(invalid="ignore", divide="ignore"):
        gamma = np.clip(1.0 - np.square(se_comp / se_obs), 0.0, 1.0)
    gamma = np.where(se_obs > 0, gamma, 0.0)
    return MLBatch(theta, derive_estimands(theta), se_obs, se_comp, gamma, design)
