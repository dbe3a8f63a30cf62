"""Repeated-experiment harness for estimator bias and SE calibration.

Runs many synthetic replicates on a fixed distance design, fits the
requested estimators on each, and aggregates moments. This is the tool
that exposes the censoring bias of plain least squares and checks that
the censored-likelihood standard errors are calibrated (empirical spread
of the estimates over replicates close to the mean reported SE).

Replicate r draws its generator from SeedSequence(seed, spawn_key=(r,)),
so reports are reproducible even if replicates run out of order or in
parallel.
"""

import dataclasses
import math
from dataclasses import dataclass, field

import numpy as np

from .avar import estimate_standard_errors
from .exceptions import (
    AllReplicatesFailedError,
    CensoredPathlossError,
    SingularInformationError,
    SpecError,
)
from .model import (
    PathlossParams,
    apply_censoring,
    censoring_level_for_fraction,
    generate_synthetic,
)
from .ols import CensoredHandling, ols_fit
from .tobit import FitOptions, tobit_fit

TOBIT = "tobit"
OLS_SUBSTITUTE = "ols-substitute"
OLS_DROP = "ols-drop"
ESTIMATORS = (TOBIT, OLS_SUBSTITUTE, OLS_DROP)

_SPACINGS = ("log", "linear")
_PARAM_KEYS = ("pl_d0", "n", "sigma")
_SE_KEYS = ("pl_d0", "n", "sigma_sq")


def make_distances(spacing: str, d_min: float, d_max: float, count: int) -> np.ndarray:
    """Distance design: ``count`` points from d_min to d_max, log or linear."""
    if spacing == "log":
        return np.geomspace(d_min, d_max, count)
    if spacing == "linear":
        return np.linspace(d_min, d_max, count)
    raise SpecError(f"spacing must be one of {_SPACINGS}, got {spacing!r}")


@dataclass(frozen=True)
class ExperimentSpec:
    """Full description of a repeated experiment; validate() checks it."""

    true_params: PathlossParams
    d0: float
    spacing: str
    d_min: float
    d_max: float
    count: int
    c: float
    replicates: int
    seed: int
    estimators: tuple[str, ...] = (TOBIT, OLS_SUBSTITUTE)

    def validate(self) -> None:
        if not isinstance(self.true_params, PathlossParams):
            raise SpecError("true_params must be a PathlossParams")
        if not self.d0 > 0:
            raise SpecError(f"d0 must be positive, got {self.d0}")
        if self.spacing not in _SPACINGS:
            raise SpecError(f"spacing must be one of {_SPACINGS}, got {self.spacing!r}")
        if self.d_min < self.d0:
            raise SpecError(f"d_min must be >= d0, got d_min={self.d_min} < d0={self.d0}")
        if self.d_max < self.d_min:
            raise SpecError(f"d_max must be >= d_min, got {self.d_max} < {self.d_min}")
        if self.count < 3:
            raise SpecError(f"count must be >= 3, got {self.count}")
        if math.isnan(self.c):
            raise SpecError("censoring level c must not be NaN")
        if self.replicates < 1:
            raise SpecError(f"replicates must be >= 1, got {self.replicates}")
        if not self.estimators:
            raise SpecError("estimators must not be empty")
        for name in self.estimators:
            if name not in ESTIMATORS:
                raise SpecError(f"unknown estimator {name!r}; choose from {ESTIMATORS}")

    def distances(self) -> np.ndarray:
        return make_distances(self.spacing, self.d_min, self.d_max, self.count)

    @classmethod
    def from_dict(cls, config: dict) -> "ExperimentSpec":
        """Build a spec from a plain-dict configuration (e.g. parsed JSON).

        ``censored_fraction`` may be given instead of ``c``; the level is
        then solved so the design's expected censored fraction matches.
        """
        known = {
            "true_params", "d0", "spacing", "d_min", "d_max", "count",
            "c", "censored_fraction", "replicates", "seed", "estimators",
        }
        unknown = set(config) - known
        if unknown:
            raise SpecError(f"unknown configuration keys: {sorted(unknown)}")
        missing = {"true_params", "d0", "spacing", "d_min", "d_max", "count",
                   "replicates", "seed"} - set(config)
        if missing:
            raise SpecError(f"missing configuration keys: {sorted(missing)}")
        tp = config["true_params"]
        try:
            params = PathlossParams(float(tp["pl_d0"]), float(tp["n"]), float(tp["sigma"]))
        except (KeyError, TypeError) as exc:
            raise SpecError(f"true_params must map pl_d0/n/sigma to numbers: {exc}")
        if ("c" in config) == ("censored_fraction" in config):
            raise SpecError("give exactly one of 'c' and 'censored_fraction'")
        if "c" in config:
            c = float(config["c"])
        else:
            distances = make_distances(
                str(config["spacing"]), float(config["d_min"]),
                float(config["d_max"]), int(config["count"]),
            )
            c = censoring_level_for_fraction(
                params, distances, float(config["d0"]), float(config["censored_fraction"])
            )
        estimators = tuple(config.get("estimators", (TOBIT, OLS_SUBSTITUTE)))
        spec = cls(
            true_params=params,
            d0=float(config["d0"]),
            spacing=str(config["spacing"]),
            d_min=float(config["d_min"]),
            d_max=float(config["d_max"]),
            count=int(config["count"]),
            c=c,
            replicates=int(config["replicates"]),
            seed=int(config["seed"]),
            estimators=estimators,
        )
        spec.validate()
        return spec


@dataclass(frozen=True)
class ReplicateRecord:
    """One estimator's outcome on one replicate; failures keep their message."""

    replicate: int
    estimator: str
    censored_fraction: float
    pl_d0: float | None = None
    n: float | None = None
    sigma: float | None = None
    se_pl_d0: float | None = None
    se_n: float | None = None
    se_sigma_sq: float | None = None
    converged: bool | None = None
    max_abs_gradient: float | None = None
    error: str | None = None

    @property
    def failed(self) -> bool:
        return self.error is not None


@dataclass(frozen=True)
class EstimatorSummary:
    """Moments of one estimator's sampling distribution over replicates.

    ``mean``/``std``/``bias`` are keyed by pl_d0/n/sigma and cover records
    that produced estimates. ``mean_se``/``calibration`` (censored-ML only)
    are keyed by pl_d0/n/sigma_sq; calibration is empirical std divided by
    mean reported SE, so 1.0 means perfectly calibrated.
    """

    estimator: str
    n_fits: int
    n_failures: int
    n_not_converged: int
    mean: dict = field(default_factory=dict)
    std: dict = field(default_factory=dict)
    bias: dict = field(default_factory=dict)
    mean_se: dict | None = None
    calibration: dict | None = None


@dataclass(frozen=True)
class ExperimentReport:
    """Everything run_experiment learned: per-record detail plus summaries."""

    spec: ExperimentSpec
    mean_censored_fraction: float
    summaries: dict
    records: tuple


def _fit_one(estimator: str, dataset) -> ReplicateRecord:
    kwargs = {"censored_fraction": dataset.censored_fraction}
    if estimator == TOBIT:
        fit = tobit_fit(dataset, FitOptions())
        if fit.converged:
            try:
                se_pl, se_n, se_s2 = estimate_standard_errors(fit, dataset)
            except SingularInformationError:
                pass  # the point estimates stand; only the SEs are lost
            else:
                kwargs.update(se_pl_d0=se_pl, se_n=se_n, se_sigma_sq=se_s2)
        return ReplicateRecord(
            replicate=-1,
            estimator=estimator,
            pl_d0=fit.params.pl_d0,
            n=fit.params.n,
            sigma=fit.params.sigma,
            converged=fit.converged,
            max_abs_gradient=fit.max_abs_gradient,
            **kwargs,
        )
    mode = CensoredHandling.SUBSTITUTE if estimator == OLS_SUBSTITUTE else CensoredHandling.DROP
    fit = ols_fit(dataset, mode)
    return ReplicateRecord(
        replicate=-1,
        estimator=estimator,
        pl_d0=fit.pl_d0,
        n=fit.n,
        sigma=fit.sigma,
        se_pl_d0=fit.se_pl_d0,
        se_n=fit.se_n,
        converged=True,
        **kwargs,
    )


def run_experiment(spec: ExperimentSpec) -> ExperimentReport:
    """Generate, censor, and fit ``spec.replicates`` synthetic datasets.

    Replicates where an estimator errors out (all samples censored, say)
    are recorded with the failure message and excluded from that
    estimator's moments; the failure count makes the exclusion visible.
    Raises AllReplicatesFailedError only when nothing at all was fit.
    """
    spec.validate()
    distances = spec.distances()

    records = []
    fractions = []
    for r in range(spec.replicates):
        seed = np.random.SeedSequence(spec.seed, spawn_key=(r,))
        values = generate_synthetic(spec.true_params, distances, spec.d0, seed)
        dataset = apply_censoring(values, spec.c, spec.d0)
        fractions.append(dataset.censored_fraction)
        for estimator in spec.estimators:
            try:
                record = _fit_one(estimator, dataset)
                record = _with_replicate(record, r)
            except CensoredPathlossError as exc:
                record = ReplicateRecord(
                    replicate=r,
                    estimator=estimator,
                    censored_fraction=dataset.censored_fraction,
                    error=f"{type(exc).__name__}: {exc}",
                )
            records.append(record)

    if all(rec.failed for rec in records):
        raise AllReplicatesFailedError(
            f"all {len(records)} estimator runs failed; first error: {records[0].error}"
        )

    summaries = {
        estimator: _summarize(estimator, [r for r in records if r.estimator == estimator],
                              spec.true_params)
        for estimator in spec.estimators
    }
    return ExperimentReport(
        spec=spec,
        mean_censored_fraction=float(np.mean(fractions)),
        summaries=summaries,
        records=tuple(records),
    )


def _with_replicate(record: ReplicateRecord, r: int) -> ReplicateRecord:
    return dataclasses.replace(record, replicate=r)


def _summarize(estimator, records, true_params: PathlossParams) -> EstimatorSummary:
    fits = [r for r in records if not r.failed]
    truth = {"pl_d0": true_params.pl_d0, "n": true_params.n, "sigma": true_params.sigma}

    mean, std, bias = {}, {}, {}
    for key in _PARAM_KEYS:
        values = np.array([getattr(r, key) for r in fits], dtype=float)
        if values.size:
            mean[key] = float(np.mean(values))
            std[key] = float(np.std(values, ddof=1)) if values.size > 1 else 0.0
            bias[key] = mean[key] - truth[key]

    mean_se = calibration = None
    if estimator == TOBIT:
        with_se = [r for r in fits if r.se_n is not None]
        if with_se:
            mean_se, calibration = {}, {}
            spread = {
                "pl_d0": np.array([r.pl_d0 for r in with_se]),
                "n": np.array([r.n for r in with_se]),
                "sigma_sq": np.array([r.sigma**2 for r in with_se]),
            }
            reported = {
                "pl_d0": np.array([r.se_pl_d0 for r in with_se]),
                "n": np.array([r.se_n for r in with_se]),
                "sigma_sq": np.array([r.se_sigma_sq for r in with_se]),
            }
            for key in _SE_KEYS:
                mean_se[key] = float(np.mean(reported[key]))
                if len(with_se) > 1 and mean_se[key] > 0:
                    calibration[key] = float(np.std(spread[key], ddof=1)) / mean_se[key]

    return EstimatorSummary(
        estimator=estimator,
        n_fits=len(fits),
        n_failures=len(records) - len(fits),
        n_not_converged=sum(1 for r in fits if r.converged is False),
        mean=mean,
        std=std,
        bias=bias,
        mean_se=mean_se,
        calibration=calibration,
    )
