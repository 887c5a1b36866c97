"""Exception types raised by the estimators and the simulation harness."""


class MimlError(ValueError):
    """Base class for all recoverable errors in this package."""


class InsufficientCompleteCases(MimlError):
    """Fewer complete cases than the regression of Y on X needs."""


class DegenerateDesign(MimlError):
    """A regressor has zero spread, so the regression is not identified."""


class NonpositivePosteriorDf(MimlError):
    """The residual-variance posterior has nonpositive degrees of freedom."""


class UndefinedBias(MimlError):
    """The closed-form bias has a zero denominator for these inputs."""


class ConfigError(MimlError):
    """An experiment configuration is inconsistent or malformed."""
