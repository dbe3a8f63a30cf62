"""Ordinary least squares baseline for the log-distance pathloss model.

OLS ignores censoring, which is exactly why it is here: fitted on censored
data it produces the biased estimates that the censored-likelihood method
corrects. The 2x2 normal equations are solved in closed form.

Note the shadowing variance estimate divides the residual sum of squares by
L - 1, not the regression-conventional L - 2; the sampling-distribution
formulas used for the standard errors are stated with that divisor.
"""

import enum
import math
from dataclasses import dataclass

import numpy as np

from .exceptions import DegenerateDesignError, DomainError, TooFewSamplesError
from .model import Dataset, PathlossParams


class CensoredHandling(enum.Enum):
    """How OLS treats censored rows: keep them at value c, or drop them."""

    SUBSTITUTE = "substitute"
    DROP = "drop"


@dataclass(frozen=True)
class OlsFit:
    """Closed-form OLS estimates with their sampling standard errors.

    ``sigma_sq_hat`` may be exactly zero on collinear data, in which case
    ``params`` (which requires a positive shadowing std) is unavailable.
    """

    pl_d0: float
    n: float
    sigma_sq_hat: float
    se_pl_d0: float
    se_n: float
    residuals: np.ndarray
    x_bar: float
    s_xx: float
    n_used: int
    mode: CensoredHandling

    @property
    def sigma(self) -> float:
        return math.sqrt(self.sigma_sq_hat)

    @property
    def params(self) -> PathlossParams:
        return PathlossParams(pl_d0=self.pl_d0, n=self.n, sigma=self.sigma)


def _coerce_mode(mode) -> CensoredHandling:
    if isinstance(mode, CensoredHandling):
        return mode
    try:
        return CensoredHandling(str(mode).lower())
    except ValueError:
        choices = [m.value for m in CensoredHandling]
        raise DomainError(f"unknown censored-handling mode {mode!r}; choose from {choices}")


def ols_fit(dataset: Dataset, mode=CensoredHandling.SUBSTITUTE) -> OlsFit:
    """Fit intercept and slope by least squares on 10*log10(d/d0).

    SUBSTITUTE keeps censored rows at their recorded value c; DROP removes
    them. Requires at least 3 samples at 2 distinct distances after the
    mode filter.
    """
    mode = _coerce_mode(mode)
    keep = slice(None) if mode is CensoredHandling.SUBSTITUTE else ~dataset.censored
    x = dataset.regressor[keep]
    y = dataset.values[keep]
    d = dataset.distances[keep]

    count = int(x.size)
    if count < 3:
        raise TooFewSamplesError(f"need at least 3 samples after {mode.value} filtering, got {count}")
    if np.unique(d).size < 2:
        raise DegenerateDesignError("all sample distances are equal; the exponent is unidentifiable")

    x_bar = float(np.mean(x))
    y_bar = float(np.mean(y))
    dx = x - x_bar
    s_xx = float(dx @ dx)
    if s_xx <= 0.0:
        raise DegenerateDesignError("zero regressor spread; the exponent is unidentifiable")
    slope = float(dx @ (y - y_bar)) / s_xx
    intercept = y_bar - slope * x_bar

    residuals = y - (intercept + slope * x)
    rss = float(residuals @ residuals)
    sigma_sq_hat = rss / (count - 1)

    se_pl_d0, se_n = _standard_errors(sigma_sq_hat, x_bar, s_xx, count)
    return OlsFit(
        pl_d0=intercept,
        n=slope,
        sigma_sq_hat=sigma_sq_hat,
        se_pl_d0=se_pl_d0,
        se_n=se_n,
        residuals=residuals,
        x_bar=x_bar,
        s_xx=s_xx,
        n_used=count,
        mode=mode,
    )


def _standard_errors(sigma_sq_hat: float, x_bar: float, s_xx: float, count: int):
    sigma_hat = math.sqrt(sigma_sq_hat)
    se_n = sigma_hat * math.sqrt(1.0 / s_xx)
    se_pl_d0 = sigma_hat * math.sqrt(1.0 / count + x_bar * x_bar / s_xx)
    return se_pl_d0, se_n


def ols_standard_errors(fit: OlsFit, count: int | None = None):
    """Sampling-distribution standard errors (se_pl_d0, se_n) of an OLS fit.

    Plugs the estimated shadowing std into the Gaussian sampling formulas:
    se_n = sigma_hat * sqrt(1/S_xx), se_pl_d0 = sigma_hat *
    sqrt(1/L + x_bar^2/S_xx). ``count`` defaults to the sample count used
    in the fit.
    """
    if count is None:
        count = fit.n_used
    if count < 1:
        raise DomainError(f"count must be positive, got {count}")
    return _standard_errors(fit.sigma_sq_hat, fit.x_bar, fit.s_xx, count)
