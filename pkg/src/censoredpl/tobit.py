"""Censored maximum likelihood for the log-distance pathloss model.

Measurements at or above the receiver noise limit are recorded at the
censoring level c. Uncensored rows contribute Gaussian log densities;
censored rows contribute the log upper-tail probability ln(1 - Phi(z)).
The search runs over (PL(d0), n, ln sigma), so sigma > 0 by construction,
warm-started from the substitute-value OLS fit.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .exceptions import (
    AllCensoredError,
    DegenerateDesignError,
    DomainError,
    NonFiniteObjectiveError,
)
from .model import Dataset, PathlossParams
from .optimize import nelder_mead
from .special import LOG_SQRT_2PI, log_normal_sf

#: Censored fractions above this trigger a reliability warning.
HIGH_CENSORING_FRACTION = 0.9

# Fitted scales below this mean the search diverged to sigma -> 0
# (unbounded likelihood), not that shadowing is genuinely tiny.
_SIGMA_COLLAPSE = 1e-100


@dataclass(frozen=True)
class FitOptions:
    """Knobs for the likelihood search.

    ``fixed_pl_d0`` pins the intercept (e.g. to a free-space reference) and
    reduces the search to (n, ln sigma). ``restart`` re-runs the simplex
    once from the first solution when tolerances were not met.
    """

    fixed_pl_d0: float | None = None
    max_iter: int = 2000
    # Sized for NLL magnitudes up to ~1e6; tighter settings can sit below
    # the objective's floating-point resolution and never trigger.
    xtol: float = 1e-6
    ftol: float = 1e-9
    restart: bool = True

    def __post_init__(self):
        if self.fixed_pl_d0 is not None and not math.isfinite(self.fixed_pl_d0):
            raise DomainError(f"fixed_pl_d0 must be finite, got {self.fixed_pl_d0}")
        for name in ("xtol", "ftol"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0.0):
                raise DomainError(f"{name} must be finite and nonnegative, got {v}")
        if self.max_iter < 0:
            raise DomainError(f"max_iter must be nonnegative, got {self.max_iter}")


@dataclass(frozen=True)
class TobitFit:
    """Converged (or best-effort) censored ML estimates and diagnostics."""

    params: PathlossParams
    nll: float
    converged: bool
    iterations: int
    n_censored: int
    n_uncensored: int
    init: PathlossParams
    fixed_pl_d0: float | None
    #: Largest central-difference NLL gradient component at the solution.
    max_abs_gradient: float


def _split(dataset: Dataset):
    cen = dataset.censored
    x = dataset.regressor
    return x[~cen], dataset.values[~cen], x[cen]


def _nll(pl_d0: float, n: float, sigma: float, x_unc, y_unc, x_cen, c: float) -> float:
    r = y_unc - (pl_d0 + n * x_unc)
    denom = 2.0 * sigma * sigma
    if denom == 0.0:  # sigma^2 underflowed; the scale is out of numeric range
        return math.inf
    total = x_unc.size * (math.log(sigma) + LOG_SQRT_2PI) + float(r @ r) / denom
    if x_cen.size:
        z = (c - (pl_d0 + n * x_cen)) / sigma
        total -= sum(log_normal_sf(float(v)) for v in z)
    return total


def tobit_nll(params: PathlossParams, dataset: Dataset) -> float:
    """Negative log-likelihood of the censored pathloss model.

    Sum over uncensored rows of the Gaussian negative log density plus, for
    each censored row, -ln(1 - Phi((c - mean)/sigma)).
    """
    x_unc, y_unc, x_cen = _split(dataset)
    return _nll(params.pl_d0, params.n, params.sigma, x_unc, y_unc, x_cen, dataset.c)


def _warm_start(dataset: Dataset, fixed_pl_d0: float | None) -> PathlossParams:
    # Least squares on the recorded values, censored rows kept at c. With a
    # pinned intercept the slope regresses y - pl_d0 on x through the origin.
    x = dataset.regressor
    y = dataset.values
    with np.errstate(all="ignore"):
        if fixed_pl_d0 is not None:
            s_xx = float(x @ x)
            slope = float(x @ (y - fixed_pl_d0)) / s_xx if s_xx > 0.0 else 2.0
            intercept = fixed_pl_d0
        else:
            x_bar = float(np.mean(x))
            y_bar = float(np.mean(y))
            dx = x - x_bar
            s_xx = float(dx @ dx)
            slope = float(dx @ (y - y_bar)) / s_xx if s_xx > 0.0 else 2.0
            intercept = y_bar - slope * x_bar
        r = y - (intercept + slope * x)
        sigma = math.sqrt(float(r @ r) / max(y.size - 1, 1)) if np.all(np.isfinite(r)) else math.inf
    if not (math.isfinite(intercept) and math.isfinite(slope) and math.isfinite(sigma)):
        raise NonFiniteObjectiveError(
            "warm start overflowed; the data scale (or fixed_pl_d0) is out of range"
        )
    if sigma == 0.0:
        sigma = 1.0
    return PathlossParams(intercept, slope, sigma)


def tobit_fit(dataset: Dataset, options: FitOptions | None = None) -> TobitFit:
    """Maximize the censored likelihood with a warm-started simplex search.

    Raises AllCensoredError when no row is below the censoring level (the
    likelihood then has no interior optimum) and warns when more than 90%
    of rows are censored. When ``options.fixed_pl_d0`` is set only (n,
    ln sigma) are searched.
    """
    if options is None:
        options = FitOptions()

    if dataset.n_uncensored == 0:
        raise AllCensoredError(
            "every sample is censored; the shadowing scale is unidentifiable"
        )
    if options.fixed_pl_d0 is None:
        if np.unique(dataset.distances[~dataset.censored]).size < 2:
            raise DegenerateDesignError(
                "fewer than two distinct uncensored distances; intercept and "
                "exponent are not jointly identifiable (fix pl_d0 to proceed)"
            )
    if dataset.censored_fraction > HIGH_CENSORING_FRACTION:
        warnings.warn(
            f"{dataset.censored_fraction:.0%} of samples are censored; "
            "estimates may be unstable",
            RuntimeWarning,
            stacklevel=2,
        )

    x_unc, y_unc, x_cen = _split(dataset)
    c = dataset.c
    init = _warm_start(dataset, options.fixed_pl_d0)

    if options.fixed_pl_d0 is None:

        def objective(v):
            sigma = _safe_exp(v[2])
            if sigma == 0.0 or math.isinf(sigma):
                return math.inf
            return _nll(v[0], v[1], sigma, x_unc, y_unc, x_cen, c)

        v0 = np.array([init.pl_d0, init.n, math.log(init.sigma)])
    else:
        pl0 = options.fixed_pl_d0

        def objective(v):
            sigma = _safe_exp(v[1])
            if sigma == 0.0 or math.isinf(sigma):
                return math.inf
            return _nll(pl0, v[0], sigma, x_unc, y_unc, x_cen, c)

        v0 = np.array([init.n, math.log(init.sigma)])

    result = nelder_mead(
        objective, v0, xtol=options.xtol, ftol=options.ftol, max_iter=options.max_iter
    )
    iterations = result.iterations
    if not result.converged and options.restart:
        result = nelder_mead(
            objective,
            result.x,
            xtol=options.xtol,
            ftol=options.ftol,
            max_iter=options.max_iter,
        )
        iterations += result.iterations

    v = result.x
    if options.fixed_pl_d0 is None:
        params = PathlossParams(float(v[0]), float(v[1]), math.exp(float(v[2])))
    else:
        params = PathlossParams(options.fixed_pl_d0, float(v[0]), math.exp(float(v[1])))

    converged = result.converged
    if params.sigma < _SIGMA_COLLAPSE:
        # The search ran off to sigma -> 0: the uncensored rows are exactly
        # interpolable and every censored mean clears the level, so the
        # likelihood is unbounded and no maximum exists.
        warnings.warn(
            "shadowing scale collapsed toward zero; the censored likelihood "
            "is unbounded on this dataset",
            RuntimeWarning,
            stacklevel=2,
        )
        converged = False

    return TobitFit(
        params=params,
        nll=result.fun,
        converged=converged,
        iterations=iterations,
        n_censored=dataset.n_censored,
        n_uncensored=dataset.n_uncensored,
        init=init,
        fixed_pl_d0=options.fixed_pl_d0,
        max_abs_gradient=_max_abs_gradient(objective, v),
    )


def _safe_exp(s: float) -> float:
    try:
        return math.exp(s)
    except OverflowError:
        return math.inf


def _max_abs_gradient(objective, v: np.ndarray) -> float:
    # Central differences; a stationarity diagnostic, not a convergence test.
    worst = 0.0
    for i in range(v.size):
        h = 1e-4 * max(1.0, abs(float(v[i])))
        up = v.copy()
        dn = v.copy()
        up[i] += h
        dn[i] -= h
        g = (objective(up) - objective(dn)) / (2.0 * h)
        if math.isfinite(g):
            worst = max(worst, abs(g))
        else:
            worst = math.inf
    return worst
