"""Hyperparameter optimisation for a target task seen only through unlabeled
features, using labeled source tasks under covariate shift."""

from .bo import Dim, HyperParams, SearchSpace, run_bo
from .config import EstimatorKind, RunConfig, SplitConfig
from .datasets import LabeledDataset, ToyConfig, UnlabeledDataset, generate_toy, load_csv, split_source
from .density_ratio import DensityRatioModel, UlsifConfig, evaluate_ratio, fit_ulsif
from .errors import ShiftHpoError
from .estimators import (
    analytic_variance,
    estimate_divergence,
    lambda_unbiased_estimate,
    uniform_weights,
    vr_weights,
)
from .harness import no_regret_sweep, run_mscs, run_toy_sweep, verify_table1
from .learners import LearnerKind, LearnerSpec, LossKind

__version__ = "0.1.0"

__all__ = [
    "Dim", "HyperParams", "SearchSpace", "run_bo",
    "EstimatorKind", "RunConfig", "SplitConfig",
    "LabeledDataset", "ToyConfig", "UnlabeledDataset", "generate_toy", "load_csv", "split_source",
    "DensityRatioModel", "UlsifConfig", "evaluate_ratio", "fit_ulsif",
    "ShiftHpoError",
    "analytic_variance", "estimate_divergence", "lambda_unbiased_estimate", "uniform_weights", "vr_weights",
    "no_regret_sweep", "run_mscs", "run_toy_sweep", "verify_table1",
    "LearnerKind", "LearnerSpec", "LossKind",
]
