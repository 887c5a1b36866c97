"""Regression imputation of Y from X and pooling across imputations.

MLMI imputes from the ML estimates of the regression of Y on X.  PDMI first
draws the regression parameters from their posterior (scaled inverse
chi-square for the residual variance, then normal coefficients) and imputes
from the draw.  Each imputed dataset is analysed with the usual complete-data
formulas and the D analyses are combined by Rubin's rules.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import DegenerateDesign, NonpositivePosteriorDf
from .ml import ESTIMANDS, CompleteCaseDesign, EstimateSet, ThetaBase, complete_x_sums, estimate_ml
from .population import Dataset


class Method(str, enum.Enum):
    MLMI = "MLMI"
    PDMI = "PDMI"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class ImputationConfig:
    method: Method = Method.PDMI
    D: int = 5
    nu_prior: int = 0

    def __post_init__(self):
        method = self.method.value if isinstance(self.method, Method) else str(self.method).upper()
        object.__setattr__(self, "method", Method(method))
        if int(self.D) < 1:
            raise ValueError("D must be at least 1")
        if self.method is Method.MLMI:
            object.__setattr__(self, "nu_prior", 0)

    @property
    def label(self) -> str:
        if self.method is Method.MLMI:
            return f"MLMI(D={self.D})"
        return f"PDMI(D={self.D},nu={self.nu_prior})"


@dataclass(frozen=True)
class PosteriorDraw:
    alpha: float
    beta: float
    sigma2: float


@dataclass
class ImputedDataset:
    x: np.ndarray
    y: np.ndarray
    mask: np.ndarray


@dataclass
class MIResult:
    """Pooled estimates; every array is indexed like :data:`ESTIMANDS`.

    With D = 1 the between-imputation variance is undefined and ``b``,
    ``t_var`` and ``gamma`` are NaN.
    """

    point: np.ndarray
    w_bar: np.ndarray
    b: np.ndarray
    t_var: np.ndarray
    gamma: np.ndarray
    D: int
    method: Method
    nu_prior: int

    def __getitem__(self, estimand: str) -> dict[str, float]:
        i = ESTIMANDS.index(estimand)
        return {k: float(getattr(self, k)[i]) for k in ("point", "w_bar", "b", "t_var", "gamma")}


def posterior_df(n0, nu_prior):
    return np.asarray(n0) - 2 + nu_prior


def posterior_from_variates(theta, design: CompleteCaseDesign, chi2, z1, z2):
    """Turn chi-square and normal variates into posterior parameter draws.

    ``sigma2 = s2_ml * n0 / chi2``; the slope is normal around the ML slope with
    variance ``sigma2 / Sxx``, and the intercept is drawn through the
    complete-case centroid, which reproduces the ML intercept/slope covariance
    rescaled by ``sigma2 / s2_ml``.
    """
    theta = np.asarray(theta)
    a, b, s2 = theta[..., 2], theta[..., 3], theta[..., 4]
    n0, m, v = design
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        sigma2 = s2 * n0 / chi2
        beta = b + np.sqrt(sigma2 / (n0 * v)) * z2
        alpha = a - m * (beta - b) + np.sqrt(sigma2 / n0) * z1
    return alpha, beta, sigma2


def draw_posterior(theta_ml: ThetaBase, complete_x_sums, nu_prior: int, rng: np.random.Generator) -> PosteriorDraw:
    """One draw of (alpha, beta, sigma2) from the regression posterior.

    Raises:
        NonpositivePosteriorDf: ``n0 - 2 + nu_prior <= 0``.
    """
    n0, sx, sxx = complete_x_sums
    df = n0 - 2 + nu_prior
    if df <= 0:
        raise NonpositivePosteriorDf(f"posterior df n0 - 2 + nu_prior = {df} <= 0 (n0={n0}, nu_prior={nu_prior})")
    m = sx / n0
    v = sxx / n0 - m * m
    if not v > 0:
        raise DegenerateDesign("X has no spread among the complete cases")
    chi2 = rng.chisquare(df)
    z1, z2 = rng.standard_normal(2)
    alpha, beta, sigma2 = posterior_from_variates(
        theta_ml.to_array(), CompleteCaseDesign(n0, m, v), chi2, z1, z2
    )
    return PosteriorDraw(float(alpha), float(beta), float(sigma2))


def fill_missing(x, y, mask, alpha, beta, sigma2, noise):
    """Replace masked y cells by ``alpha + beta*x + sqrt(sigma2)*noise``.

    Parameters broadcast against the leading axes of ``x``.
    """
    alpha, beta, sigma2 = (np.asarray(v)[..., None] for v in (alpha, beta, sigma2))
    with np.errstate(invalid="ignore", over="ignore"):
        fill = alpha + beta * x + np.sqrt(sigma2) * noise
    return np.where(mask, fill, y)


def impute_once(dataset: Dataset, alpha: float, beta: float, sigma2: float, rng: np.random.Generator) -> ImputedDataset:
    if sigma2 < 0:
        raise ValueError("sigma2 must be nonnegative")
    noise = rng.standard_normal(dataset.n)
    y = fill_missing(dataset.x, dataset.y, dataset.mask, alpha, beta, sigma2, noise)
    return ImputedDataset(dataset.x.copy(), y, dataset.mask.copy())


def complete_data_arrays(x, y):
    """Complete-data estimates and their normal-theory variances.

    Means divide by n, variances and the covariance by n - 1, residual
    variances by n - 2.  Returns two arrays shaped (..., 9).
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    n = x.shape[-1]
    xbar = x.mean(axis=-1)
    ybar = y.mean(axis=-1)
    dx = x - xbar[..., None]
    dy = y - ybar[..., None]
    sxx = np.square(dx).sum(axis=-1)
    syy = np.square(dy).sum(axis=-1)
    sxy = (dx * dy).sum(axis=-1)
    with np.errstate(invalid="ignore", divide="ignore", over="ignore"):
        b_yx = sxy / sxx
        a_yx = ybar - b_yx * xbar
        v_yx = np.square(dy - b_yx[..., None] * dx).sum(axis=-1) / (n - 2)
        b_xy = sxy / syy
        a_xy = xbar - b_xy * ybar
        v_xy = np.square(dx - b_xy[..., None] * dy).sum(axis=-1) / (n - 2)
        var_x = sxx / (n - 1)
        var_y = syy / (n - 1)
        cov = sxy / (n - 1)
        est = np.stack([a_yx, b_yx, v_yx, ybar, var_y, cov, a_xy, b_xy, v_xy], axis=-1)

        var = np.stack(
            [
                v_yx * (1.0 / n + xbar**2 / sxx),
                v_yx / sxx,
                2.0 * v_yx**2 / (n - 1),
                var_y / n,
                2.0 * var_y**2 / (n - 1),
                (var_x * var_y + cov**2) / (n - 1),
                v_xy * (1.0 / n + ybar**2 / syy),
                v_xy / syy,
                2.0 * v_xy**2 / (n - 1),
            ],
            axis=-1,
        )
    return est, var


def _check_imputed(imputed: ImputedDataset, min_n: int) -> None:
    if imputed.x.size < min_n:
        raise ValueError(f"need at least {min_n} cases, got {imputed.x.size}")
    if np.ptp(imputed.x) == 0.0 or np.ptp(imputed.y) == 0.0:
        raise DegenerateDesign("X or Y has no spread in the imputed data")


def complete_data_estimates(imputed: ImputedDataset) -> EstimateSet:
    _check_imputed(imputed, 3)
    est, _ = complete_data_arrays(imputed.x, imputed.y)
    return EstimateSet.from_array(est)


def complete_data_variance(imputed: ImputedDataset, estimand: str) -> float:
    """Variance the estimate would have if the imputed data were complete."""
    _check_imputed(imputed, 4)
    _, var = complete_data_arrays(imputed.x, imputed.y)
    return float(var[ESTIMANDS.index(estimand)])


def pool(estimates, variances):
    """Rubin's rules over axis -2 (imputations) of (..., D, 9) arrays.

    Returns ``(point, w_bar, b, t_var, gamma)`` with gamma the pooled fraction
    of missing information ``(1 + 1/D) b / t_var``.
    """
    estimates = np.asarray(estimates)
    D = estimates.shape[-2]
    point = estimates.mean(axis=-2)
    w_bar = np.asarray(variances).mean(axis=-2)
    if D < 2:
        nan = np.full_like(point, np.nan)
        return point, w_bar, nan, nan, nan
    with np.errstate(invalid="ignore", over="ignore"):
        b = np.square(estimates - point[..., None, :]).sum(axis=-2) / (D - 1)
        between = (1.0 + 1.0 / D) * b
        t_var = w_bar + between
        gamma = np.where(t_var > 0, between / np.where(t_var > 0, t_var, 1.0), 0.0)
    return point, w_bar, b, t_var, np.clip(gamma, 0.0, 1.0)


def mi_arrays(x, y, observed, theta, design, config: ImputationConfig, noise, chi_u=None, z_coef=None):
    """Impute and pool a batch of datasets from pre-drawn variates.

    Args:
        x, y, observed: (R, n) arrays.
        theta, design: ML fit of the batch (see :func:`miml.ml.fit_ml_arrays`).
        config: imputation method, D and prior df.
        noise: (R, D, n) standard normals for the imputation errors.
        chi_u: (R, D) uniforms driving the chi-square draws (PDMI only).
        z_coef: (R, D, 2) standard normals for the coefficient draws (PDMI only).

    Returns:
        Tuple ``(point, w_bar, b, t_var, gamma)`` of (R, 9) arrays.
    """
    theta = np.asarray(theta)
    D = config.D
    if config.method is Method.MLMI:
        alpha = np.repeat(theta[:, None, 2], D, axis=1)
        beta = np.repeat(theta[:, None, 3], D, axis=1)
        sigma2 = np.repeat(theta[:, None, 4], D, axis=1)
    else:
        df = posterior_df(design.n0, config.nu_prior)
        if np.any(df <= 0):
            raise NonpositivePosteriorDf(
                f"posterior df <= 0 in {int(np.sum(df <= 0))} datasets (nu_prior={config.nu_prior})"
            )
        chi2 = 2.0 * special.gammaincinv(df[:, None] / 2.0, chi_u)
        d2 = CompleteCaseDesign(*(np.asarray(v)[:, None] for v in design))
        alpha, beta, sigma2 = posterior_from_variates(theta[:, None, :], d2, chi2, z_coef[..., 0], z_coef[..., 1])
    mask = ~np.asarray(observed)[:, None, :]
    xs = np.broadcast_to(np.asarray(x)[:, None, :], noise.shape)
    yi = fill_missing(xs, np.asarray(y)[:, None, :], mask, alpha, beta, sigma2, noise)
    est, var = complete_data_arrays(xs, yi)
    return pool(est, var)


def run_mi(dataset: Dataset, config: ImputationConfig, rng: np.random.Generator) -> MIResult:
    """Multiply impute one dataset and pool the D complete-data analyses.

    Raises:
        NonpositivePosteriorDf: PDMI with ``n0 - 2 + nu_prior <= 0``; the
            message names the dataset's n0 and the prior.
    """
    theta, _ = estimate_ml(dataset)
    sums = complete_x_sums(dataset)
    ests, variances = [], []
    for _ in range(config.D):
        if config.method is Method.PDMI:
            draw = draw_posterior(theta, sums, config.nu_prior, rng)
            params = (draw.alpha, draw.beta, draw.sigma2)
        else:
            params = (theta.alpha_yx, theta.beta_yx, theta.var_yx)
        imputed = impute_once(dataset, *params, rng)
        est, var = complete_data_arrays(imputed.x, imputed.y)
        ests.append(est)
        variances.append(var)
    point, w_bar, b, t_var, gamma = pool(np.array(ests), np.array(variances))
    return MIResult(point, w_bar, b, t_var, gamma, config.D, config.method, config.nu_prior)
