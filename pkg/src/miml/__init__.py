"""ML and multiple-imputation estimators for a bivariate normal with Y partly missing."""

from .errors import MimlError
from .harness import EstimatorSpec, ExperimentConfig, IntervalSpec, run_experiment
from .imputation import ImputationConfig, run_mi
from .ml import ESTIMANDS, estimate_ml, information_report
from .population import Dataset, Pattern, PopulationSpec, sample_dataset

__version__ = "0.1.0"

__all__ = [
    "ESTIMANDS",
    "Dataset",
    "EstimatorSpec",
    "ExperimentConfig",
    "ImputationConfig",
    "IntervalSpec",
    "MimlError",
    "Pattern",
    "PopulationSpec",
    "estimate_ml",
    "information_report",
    "run_experiment",
    "run_mi",
    "sample_dataset",
]
