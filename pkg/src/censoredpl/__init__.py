"""Pathloss model fitting under noise-floor censoring.

Radio measurements saturate at the receiver noise limit: values at or
above the level c are only known to exceed it. Ordinary least squares on
such data underestimates both the pathloss exponent and the shadowing
spread; the censored maximum-likelihood estimator here does not, and it
comes with asymptotic standard errors. The package also ships the OLS
baseline (to quantify the bias), a repeated-experiment harness, CSV/JSON
plumbing, and a command-line front end.
"""

__version__ = "0.1.0"

from .exceptions import (
    AllCensoredError,
    AllReplicatesFailedError,
    CensoredPathlossError,
    DataError,
    DegenerateDesignError,
    DomainError,
    InvariantError,
    MissingMetadataError,
    NonFiniteObjectiveError,
    ParseError,
    SingularInformationError,
    SpecError,
    TooFewSamplesError,
    WriteError,
)
from .special import erfcx, log_normal_sf, mills_ratio, normal_cdf, normal_pdf
from .model import (
    SPEED_OF_LIGHT,
    CensoredSample,
    Dataset,
    PathlossParams,
    TransformedParams,
    apply_censoring,
    censoring_level_for_fraction,
    censoring_probability,
    distance_regressor,
    expected_censored_fraction,
    from_transformed,
    fspl_reference,
    generate_synthetic,
    mean_pathloss,
    to_transformed,
)
from .optimize import NelderMeadResult, nelder_mead
from .ols import CensoredHandling, OlsFit, ols_fit, ols_standard_errors
from .tobit import FitOptions, TobitFit, tobit_fit, tobit_nll
from .avar import (
    AvarMatrix,
    avar_coefficients,
    avar_matrix,
    estimate_standard_errors,
)
from .montecarlo import (
    ESTIMATORS,
    OLS_DROP,
    OLS_SUBSTITUTE,
    TOBIT,
    EstimatorSummary,
    ExperimentReport,
    ExperimentSpec,
    ReplicateRecord,
    make_distances,
    run_experiment,
)
from .dataio import (
    emit_plot_data,
    file_digest,
    read_dataset,
    result_document,
    write_dataset,
    write_result,
)
from .estimators import OlsPathloss, TobitPathloss

__all__ = [
    "SPEED_OF_LIGHT",
    "__version__",
    # model
    "CensoredSample",
    "Dataset",
    "PathlossParams",
    "TransformedParams",
    "apply_censoring",
    "censoring_level_for_fraction",
    "censoring_probability",
    "distance_regressor",
    "expected_censored_fraction",
    "from_transformed",
    "fspl_reference",
    "generate_synthetic",
    "mean_pathloss",
    "to_transformed",
    # numerics
    "erfcx",
    "log_normal_sf",
    "mills_ratio",
    "normal_cdf",
    "normal_pdf",
    # optimization
    "NelderMeadResult",
    "nelder_mead",
    # estimation
    "CensoredHandling",
    "OlsFit",
    "ols_fit",
    "ols_standard_errors",
    "FitOptions",
    "TobitFit",
    "tobit_fit",
    "tobit_nll",
    "AvarMatrix",
    "avar_coefficients",
    "avar_matrix",
    "estimate_standard_errors",
    # experiments
    "ESTIMATORS",
    "OLS_DROP",
    "OLS_SUBSTITUTE",
    "TOBIT",
    "EstimatorSummary",
    "ExperimentReport",
    "ExperimentSpec",
    "ReplicateRecord",
    "make_distances",
    "run_experiment",
    # io
    "emit_plot_data",
    "file_digest",
    "read_dataset",
    "result_document",
    "write_dataset",
    "write_result",
    # sklearn-style wrappers
    "OlsPathloss",
    "TobitPathloss",
    # exceptions
    "AllCensoredError",
    "AllReplicatesFailedError",
    "CensoredPathlossError",
    "DataError",
    "DegenerateDesignError",
    "DomainError",
    "InvariantError",
    "MissingMetadataError",
    "NonFiniteObjectiveError",
    "ParseError",
    "SingularInformationError",
    "SpecError",
    "TooFewSamplesError",
    "WriteError",
]
