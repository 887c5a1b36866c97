"""Degrees of freedom, quantiles, and confidence intervals for ML and PDMI.

The df functions accept scalars or arrays.  Variance estimands get intervals
built on the cube-root scale (delta rule for the SE) and cubed back.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import special

from .imputation import MIResult
from .ml import ESTIMANDS, VARIANCE_ESTIMANDS, estimate_ml, estimand_index, information_report
from .population import Dataset

DF_FLOOR = 3.0
REGRESSION_K = 2


@dataclass(frozen=True)
class DfEstimate:
    raw: object
    bounded: object
    nu_comp: float
    nu_d: object = None
    nu_obs: object = None


@dataclass(frozen=True)
class Interval:
    lower: float
    upper: float
    df_used: Optional[float]  # None for a normal interval
    level: float
    transformed: bool = False

    @property
    def length(self) -> float:
        return self.upper - self.lower

    def covers(self, value: float) -> bool:
        return self.lower <= value <= self.upper


def bound_df(raw, floor=DF_FLOOR):
    return np.maximum(floor, raw)


def _scalar(a):
    a = np.asarray(a)
    return float(a) if a.ndim == 0 else a


def pdmi_df_raw(gamma, D, nu_comp):
    """Barnard-Rubin small-sample df; exact limits at gamma = 0 and 1."""
    gamma = np.asarray(gamma, dtype=float)
    nu_obs = nu_comp * (1.0 - gamma) * (nu_comp + 1.0) / (nu_comp + 3.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        nu_d = np.where(gamma > 0, (D - 1) / np.square(gamma), np.inf)
        raw = np.where(gamma > 0, 1.0 / (1.0 / nu_d + 1.0 / nu_obs), nu_obs)
    raw = np.where(gamma >= 1.0, 0.0, raw)
    return raw, nu_d, nu_obs


def df_pdmi(gamma, D: int, nu_comp: float) -> DfEstimate:
    if D < 2:
        raise ValueError("the MI degrees of freedom need D >= 2")
    raw, nu_d, nu_obs = pdmi_df_raw(gamma, D, nu_comp)
    return DfEstimate(_scalar(raw), _scalar(bound_df(raw)), nu_comp, _scalar(nu_d), _scalar(nu_obs))


def ml_df_raw(nu_comp, gamma):
    return nu_comp * (1.0 - np.asarray(gamma, dtype=float)) * (nu_comp + 1.0) / (nu_comp + 3.0)


def ml_star_df_raw(n, k, gamma):
    return n * (1.0 - np.asarray(gamma, dtype=float)) - k


def df_ml(nu_comp: float, gamma) -> DfEstimate:
    """Limit of the MI df as D grows, with gamma from the ML information."""
    raw = ml_df_raw(nu_comp, gamma)
    return DfEstimate(_scalar(raw), _scalar(bound_df(raw)), nu_comp)


def df_ml_star(n: int, k: int, gamma) -> DfEstimate:
    """Complete-data regression df with n replaced by the effective sample size."""
    if not n > k >= 1:
        raise ValueError("need n > k >= 1")
    raw = ml_star_df_raw(n, k, gamma)
    return DfEstimate(_scalar(raw), _scalar(bound_df(raw)), n - k)


def t_quantile(df, prob):
    """Student t quantile through the inverse regularized incomplete beta.

    ``df`` may be infinite (normal limit) and broadcasts against ``prob``.
    Extremely small df overflow to ``inf``.
    """
    df = np.asarray(df, dtype=float)
    prob = np.asarray(prob, dtype=float)
    tail = np.minimum(prob, 1.0 - prob)
    sign = np.where(prob < 0.5, -1.0, 1.0)
    finite = np.isfinite(df)
    dfs = np.where(finite, df, 1.0)
    # |T| > t with probability 2*tail  <=>  df/(df+t^2) = I^{-1}(df/2, 1/2; 2*tail)
    x = special.betaincinv(dfs / 2.0, 0.5, 2.0 * tail)
    # complementary form keeps precision when x is close to 1
    y = special.betaincinv(0.5, dfs / 2.0, 1.0 - 2.0 * tail)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        t = np.where(x < 0.5, np.sqrt(dfs * (1.0 - x) / x), np.sqrt(dfs * y / (1.0 - y)))
    t = np.where(finite, t, -special.ndtri(tail))
    t = np.where(tail == 0.5, 0.0, t)
    return _scalar(sign * t)


def z_quantile(prob):
    return _scalar(special.ndtri(np.asarray(prob, dtype=float)))


def _upper_prob(level: float) -> float:
    if not 0.0 < level < 1.0:
        raise ValueError("level must lie in (0, 1)")
    return 1.0 - (1.0 - level) / 2.0


def interval_bounds(point, se, q, transformed):
    """Vectorized endpoints ``point +/- q*se``, optionally on the cube-root scale."""
    point = np.asarray(point, dtype=float)
    se = np.asarray(se, dtype=float)
    transformed = np.asarray(transformed, dtype=bool)
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        g = np.where(transformed, np.cbrt(point), point)
        se_g = np.where(transformed, se / (3.0 * np.cbrt(point) ** 2), se)
        half = np.where(se_g > 0, q * se_g, 0.0)
        lo, hi = g - half, g + half
        lo = np.where(transformed, lo**3, lo)
        hi = np.where(transformed, hi**3, hi)
    return lo, hi


def ci_normal(point: float, se: float, level: float = 0.95) -> Interval:
    if se < 0:
        raise ValueError("se must be nonnegative")
    lo, hi = interval_bounds(point, se, z_quantile(_upper_prob(level)), False)
    return Interval(float(lo), float(hi), None, level)


def ci_t(point: float, se: float, df: float, level: float = 0.95) -> Interval:
    if se < 0 or not df > 0:
        raise ValueError("need se >= 0 and df > 0")
    lo, hi = interval_bounds(point, se, t_quantile(df, _upper_prob(level)), False)
    return Interval(float(lo), float(hi), float(df), level)


def ci_variance_cuberoot(point: float, se: float, df: Optional[float] = None, level: float = 0.95) -> Interval:
    """Interval for a positive variance built on the cube-root scale.

    ``df=None`` uses the normal quantile.
    """
    if not point > 0:
        raise ValueError("cube-root intervals need a positive point estimate")
    if se < 0:
        raise ValueError("se must be nonnegative")
    prob = _upper_prob(level)
    q = z_quantile(prob) if df is None else t_quantile(df, prob)
    lo, hi = interval_bounds(point, se, q, True)
    return Interval(float(lo), float(hi), None if df is None else float(df), level, True)


ML_METHODS = ("normal", "tstar", "t")


def ml_df(method: str, n: int, gamma, bounded: bool):
    """df array for an ML interval method (``None`` for normal)."""
    if method == "normal":
        return None
    if method == "tstar":
        raw = ml_star_df_raw(n, REGRESSION_K, gamma)
    elif method == "t":
        raw = ml_df_raw(n - REGRESSION_K, gamma)
    else:
        raise ValueError(f"unknown ML interval method {method!r}; expected one of {ML_METHODS}")
    return bound_df(raw) if bounded else raw


def _build(point, se, df, level, transformed) -> Interval:
    if transformed:
        return ci_variance_cuberoot(point, se, df, level)
    if df is None:
        return ci_normal(point, se, level)
    return ci_t(point, se, df, level)


def ml_interval(dataset: Dataset, estimand: str, method: str = "tstar", bounded: bool = True, level: float = 0.95) -> Interval:
    """ML interval with SE from the observed information.

    ``method`` is ``"normal"``, ``"tstar"`` (effective-sample-size df) or
    ``"t"`` (large-D limit of the MI df); nu_comp = n - 2 for every estimand.
    """
    i = estimand_index(estimand)
    _, est = estimate_ml(dataset)
    report = information_report(dataset)
    point = est.to_array()[i] if i < len(ESTIMANDS) else None
    if point is None:
        raise ValueError("intervals are defined for the nine estimands only")
    gamma = report.gamma[estimand]
    df = ml_df(method, dataset.n, gamma, bounded)
    df = None if df is None else float(df)
    return _build(point, report.se_obs[estimand], df, level, estimand in VARIANCE_ESTIMANDS)


def pdmi_interval(mi: MIResult, n: int, estimand: str, bounded: bool = True, level: float = 0.95) -> Interval:
    """Rubin interval from a pooled PDMI result with Barnard-Rubin df."""
    if mi.D < 2:
        raise ValueError("PDMI intervals need D >= 2")
    i = ESTIMANDS.index(estimand)
    t_var = float(mi.t_var[i])
    gamma = float(mi.gamma[i]) if t_var > 0 else 0.0
    est = df_pdmi(gamma, mi.D, n - REGRESSION_K)
    df = est.bounded if bounded else est.raw
    if df <= 0:
        # all information missing; the t quantile is unbounded
        return Interval(-math.inf, math.inf, 0.0, level, estimand in VARIANCE_ESTIMANDS)
    return _build(float(mi.point[i]), math.sqrt(t_var), df, level, estimand in VARIANCE_ESTIMANDS)
