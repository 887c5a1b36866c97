"""Bivariate normal population with a missingness mechanism for Y.

X and Y are standard normal with correlation ``rho``.  X is always observed;
Y is missing either completely at random (MCAR, each case independently with
probability ``p``) or exactly when X is negative (MXN, so ``p = 1/2``).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np


class Pattern(str, enum.Enum):
    MCAR = "MCAR"
    MXN = "MXN"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class PopulationSpec:
    """Population correlation, missingness fraction, and mechanism."""

    rho: float = 0.5
    p: float = 0.5
    pattern: Pattern = Pattern.MCAR

    def __post_init__(self):
        object.__setattr__(self, "pattern", Pattern(str(self.pattern).upper()))
        if not -1.0 < self.rho < 1.0:
            raise ValueError(f"rho must lie strictly inside (-1, 1), got {self.rho}")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"p must lie in [0, 1], got {self.p}")
        if self.pattern is Pattern.MXN and self.p != 0.5:
            raise ValueError("the MXN pattern implies p = 0.5 exactly")

    @property
    def resid_var(self) -> float:
        return 1.0 - self.rho**2


@dataclass(frozen=True)
class BivariateMoments:
    mu_x: float
    mu_y: float
    var_x: float
    var_y: float
    cov_xy: float

    @property
    def mean(self) -> np.ndarray:
        return np.array([self.mu_x, self.mu_y])

    @property
    def cov(self) -> np.ndarray:
        return np.array([[self.var_x, self.cov_xy], [self.cov_xy, self.var_y]])


@dataclass(frozen=True)
class TruncatedMoments:
    """Mean and covariance of (X, Y) within one missingness stratum."""

    mu: np.ndarray
    sigma: np.ndarray
    m: int


@dataclass(frozen=True)
class XymxmMoments:
    """Mean and covariance of (X, Y, M, XM)."""

    mean: np.ndarray
    cov: np.ndarray

    @property
    def sigma_mxm(self) -> np.ndarray:
        """Covariance matrix of (M, XM)."""
        return self.cov[2:, 2:]


@dataclass
class Dataset:
    """One sample: X fully observed, Y with NaN marking missing cells."""

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=float)
        self.y = np.asarray(self.y, dtype=float)
        if self.x.ndim != 1 or self.x.shape != self.y.shape:
            raise ValueError("x and y must be 1-d arrays of equal length")
        if not np.all(np.isfinite(self.x)):
            raise ValueError("x must be fully observed and finite; only y may be missing")

    @classmethod
    def from_arrays(cls, x, y, mask) -> "Dataset":
        """Build from complete arrays plus a boolean mask (True = Y missing)."""
        y = np.where(np.asarray(mask, dtype=bool), np.nan, np.asarray(y, dtype=float))
        return cls(np.asarray(x, dtype=float), y)

    @property
    def mask(self) -> np.ndarray:
        return np.isnan(self.y)

    @property
    def observed(self) -> np.ndarray:
        return ~self.mask

    @property
    def n(self) -> int:
        return self.x.size

    @property
    def n0(self) -> int:
        return int(self.observed.sum())

    @property
    def n1(self) -> int:
        return self.n - self.n0


def unconditional_moments(spec: PopulationSpec) -> BivariateMoments:
    return BivariateMoments(0.0, 0.0, 1.0, 1.0, spec.rho)


def regression_params(spec: PopulationSpec, direction: str = "YonX") -> tuple[float, float, float]:
    """(intercept, slope, residual variance); identical in both directions."""
    if direction not in ("YonX", "XonY"):
        raise ValueError(f"unknown direction {direction!r}")
    return 0.0, spec.rho, spec.resid_var


def truncated_conditional_moments(spec: PopulationSpec, m: int) -> TruncatedMoments:
    """Moments of (X, Y) given M = m under MXN.

    Stratum m = 1 holds the cases with X < 0, so its means are negative;
    stratum m = 0 mirrors it.  Both strata share one covariance matrix.
    """
    if spec.pattern is not Pattern.MXN:
        raise ValueError("under MCAR the stratum moments equal unconditional_moments(spec)")
    if m not in (0, 1):
        raise ValueError("m must be 0 or 1")
    rho = spec.rho
    sign = -1.0 if m == 1 else 1.0
    mu = sign * math.sqrt(2.0 / math.pi) * np.array([1.0, rho])
    sigma = np.array(
        [[math.pi - 2.0, (math.pi - 2.0) * rho], [(math.pi - 2.0) * rho, math.pi - 2.0 * rho**2]]
    ) / math.pi
    return TruncatedMoments(mu, sigma, m)


def stratum_x_moments(spec: PopulationSpec, m: int) -> tuple[float, float]:
    """(mean, variance) of X among cases with M = m."""
    if spec.pattern is Pattern.MCAR:
        return 0.0, 1.0
    t = truncated_conditional_moments(spec, m)
    return float(t.mu[0]), float(t.sigma[0, 0])


def xymxm_moments(spec: PopulationSpec) -> XymxmMoments:
    p, rho = spec.p, spec.rho
    if spec.pattern is Pattern.MCAR:
        mu1 = np.zeros(2)
        s1 = np.array([[1.0, rho], [rho, 1.0]])
    else:
        t = truncated_conditional_moments(spec, 1)
        mu1, s1 = t.mu, t.sigma
    mx1, my1 = mu1
    vx1 = s1[0, 0]
    ex2_1 = vx1 + mx1**2  # E(X^2 | M=1)
    exy_1 = s1[0, 1] + mx1 * my1  # E(XY | M=1)
    mean = np.array([0.0, 0.0, p, p * mx1])
    cov = np.empty((4, 4))
    entries = {
        (0, 0): 1.0,
        (1, 0): rho,
        (1, 1): 1.0,
        (2, 0): p * mx1,
        (2, 1): p * my1,
        (2, 2): p * (1.0 - p),
        (3, 0): p * ex2_1,
        (3, 1): p * exy_1,
        (3, 2): mx1 * p * (1.0 - p),
        (3, 3): p * (vx1 + mx1**2 * (1.0 - p)),
    }
    for (i, j), v in entries.items():
        cov[i, j] = cov[j, i] = v
    return XymxmMoments(mean, cov)


def arrays_from_variates(spec: PopulationSpec, zx, ze, u):
    """Map standard normal and uniform variates to (x, y, mask).

    Works on any leading batch shape; the last axis indexes cases.
    """
    x = np.asarray(zx, dtype=float)
    y = spec.rho * x + math.sqrt(spec.resid_var) * np.asarray(ze, dtype=float)
    if spec.pattern is Pattern.MXN:
        mask = x < 0.0
    else:
        mask = np.asarray(u) < spec.p
    return x, y, mask


def sample_dataset(spec: PopulationSpec, n: int, rng: np.random.Generator) -> Dataset:
    if n < 1:
        raise ValueError("n must be positive")
    zx = rng.standard_normal(n)
    ze = rng.standard_normal(n)
    u = rng.random(n)
    return Dataset.from_arrays(*arrays_from_variates(spec, zx, ze, u))
