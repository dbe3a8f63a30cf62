"""Scikit-learn style estimators wrapping the fitting routines.

X is the column of Tx-Rx distances in meters (shape (n, 1) or (n,)) and y
the measured pathloss in dB. Values at or above the censoring level ``c``
are treated as censored, exactly as a saturated receiver would record
them. Both estimators follow the sklearn contract: constructor arguments
are stored verbatim, fitting populates trailing-underscore attributes,
and get_params/set_params support cloning and grid search.
"""

import math

from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_is_fitted

from .avar import estimate_standard_errors
from .model import PathlossParams, apply_censoring, censoring_probability, mean_pathloss
from .ols import ols_fit
from .tobit import FitOptions, tobit_fit
from .validation import as_distance_array, as_value_array


class _PathlossRegressorBase(RegressorMixin, BaseEstimator):
    def _dataset(self, X, y):
        distances = as_distance_array(X)
        values = as_value_array(y, distances.size)
        return apply_censoring(zip(distances, values), self.c, self.d0)

    def predict(self, X):
        """Mean pathloss (dB) at the given distances."""
        check_is_fitted(self, "n_")
        return mean_pathloss(self._params_(), as_distance_array(X), self.d0)

    def predict_censoring_probability(self, X):
        """Probability that a measurement at each distance would censor."""
        check_is_fitted(self, "n_")
        return censoring_probability(self._params_(), as_distance_array(X), self.d0, self.c)


class TobitPathloss(_PathlossRegressorBase):
    """Censored maximum-likelihood pathloss regressor.

    Parameters
    ----------
    c : censoring level in dB (default +inf, i.e. nothing censored).
    d0 : reference distance in meters.
    fixed_pl_d0 : pin the intercept to this dB value and estimate only
        the exponent and shadowing spread.
    max_iter, xtol, ftol, restart : simplex search controls.

    Fitted attributes: pl_d0_, n_, sigma_, sigma_sq_, se_pl_d0_, se_n_,
    se_sigma_sq_, nll_, converged_, n_iter_, n_censored_, n_uncensored_,
    max_abs_gradient_.
    """

    def __init__(
        self,
        c: float = math.inf,
        d0: float = 1.0,
        fixed_pl_d0: float | None = None,
        max_iter: int = 2000,
        xtol: float = 1e-6,
        ftol: float = 1e-9,
        restart: bool = True,
    ):
        self.c = c
        self.d0 = d0
        self.fixed_pl_d0 = fixed_pl_d0
        self.max_iter = max_iter
        self.xtol = xtol
        self.ftol = ftol
        self.restart = restart

    def fit(self, X, y):
        dataset = self._dataset(X, y)
        options = FitOptions(
            fixed_pl_d0=self.fixed_pl_d0,
            max_iter=self.max_iter,
            xtol=self.xtol,
            ftol=self.ftol,
            restart=self.restart,
        )
        fit = tobit_fit(dataset, options)
        self.pl_d0_ = fit.params.pl_d0
        self.n_ = fit.params.n
        self.sigma_ = fit.params.sigma
        self.sigma_sq_ = fit.params.sigma**2
        self.nll_ = fit.nll
        self.converged_ = fit.converged
        self.n_iter_ = fit.iterations
        self.n_censored_ = fit.n_censored
        self.n_uncensored_ = fit.n_uncensored
        self.max_abs_gradient_ = fit.max_abs_gradient
        self.se_pl_d0_ = self.se_n_ = self.se_sigma_sq_ = None
        if fit.converged:
            self.se_pl_d0_, self.se_n_, self.se_sigma_sq_ = estimate_standard_errors(
                fit, dataset
            )
        self.fit_ = fit
        return self

    def _params_(self):
        return self.fit_.params


class OlsPathloss(_PathlossRegressorBase):
    """Least-squares pathloss regressor (the censoring-blind baseline).

    ``mode`` chooses what to do with censored rows: "substitute" keeps
    them at the level c, "drop" removes them. Fitted attributes: pl_d0_,
    n_, sigma_sq_, sigma_, se_pl_d0_, se_n_, n_used_, n_censored_.
    """

    def __init__(self, c: float = math.inf, d0: float = 1.0, mode: str = "substitute"):
        self.c = c
        self.d0 = d0
        self.mode = mode

    def fit(self, X, y):
        dataset = self._dataset(X, y)
        fit = ols_fit(dataset, self.mode)
        self.pl_d0_ = fit.pl_d0
        self.n_ = fit.n
        self.sigma_sq_ = fit.sigma_sq_hat
        self.sigma_ = fit.sigma
        self.se_pl_d0_ = fit.se_pl_d0
        self.se_n_ = fit.se_n
        self.n_used_ = fit.n_used
        self.n_censored_ = dataset.n_censored
        self.fit_ = fit
        return self

    def _params_(self):
        # The fit can be degenerate (zero residual variance); the mean
        # curve needs only the intercept and slope, so build directly.
        return PathlossParams(self.pl_d0_, self.n_, max(self.sigma_, 1e-300))
