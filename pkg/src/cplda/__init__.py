"""Low-rank tensor discriminant analysis.

Binary classification of tensor-valued observations under a two-class
tensor normal model.  The discriminant tensor is estimated from
per-mode sample moments, compressed to a low-rank form by a randomized
spectral warm start plus alternating refinement, and plugged into a
linear decision rule.
"""

from .bench import PRESETS, ReplicationResult, Scenario, ScenarioResult
from .bench import make_bases, make_scenario_params, preset_scenario
from .bench import run_scenario, write_bench_csv
from .classify import CpLdaRule, basis_error, decision_values
from .classify import misclassification_rate, predict, rel_tensor_error
from .classify import rule_from_estimate
from .discriminant import DiscriminantEstimate, mode_covariances
from .discriminant import safe_precisions, sample_discriminant
from .estimator import CpLdaClassifier, select_rank
from .exceptions import (
    DegenerateComponentError,
    DegenerateVarianceError,
    NotPositiveDefiniteError,
    ProjectionPoolError,
    SingularMatrixError,
)
from .io import read_dataset, read_dten, write_dataset, write_dten
from .io import load_estimate, load_model, save_estimate, save_model
from .refine import CpModel, FitReport, refine_cp
from .sampling import TgmmParams, bayes_error, fisher_discriminant
from .sampling import fisher_snr, make_rng, sample_tensor_normal
from .sampling import sample_tgmm, substream_seed
from .warmstart import InitConfig, WarmStart, rc_pca

__version__ = "0.1.0"

__all__ = [
    "CpLdaClassifier",
    "CpLdaRule",
    "CpModel",
    "DegenerateComponentError",
    "DegenerateVarianceError",
    "DiscriminantEstimate",
    "FitReport",
    "InitConfig",
    "NotPositiveDefiniteError",
    "PRESETS",
    "ProjectionPoolError",
    "ReplicationResult",
    "Scenario",
    "ScenarioResult",
    "SingularMatrixError",
    "TgmmParams",
    "WarmStart",
    "basis_error",
    "bayes_error",
    "decision_values",
    "fisher_discriminant",
    "fisher_snr",
    "load_estimate",
    "load_model",
    "make_bases",
    "make_rng",
    "make_scenario_params",
    "misclassification_rate",
    "mode_covariances",
    "predict",
    "preset_scenario",
    "rc_pca",
    "read_dataset",
    "read_dten",
    "refine_cp",
    "rel_tensor_error",
    "rule_from_estimate",
    "run_scenario",
    "safe_precisions",
    "sample_discriminant",
    "sample_tensor_normal",
    "sample_tgmm",
    "save_estimate",
    "save_model",
    "select_rank",
    "substream_seed",
    "write_bench_csv",
    "write_dataset",
    "write_dten",
]
