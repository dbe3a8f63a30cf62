"""Asymptotic variance of the censored ML estimator.

Works in the transformed coordinates theta_t = (c - PL(d0), -n, sigma^2)
where censoring is at zero from the left; the variances are unchanged by
the sign/shift transform, so the standard errors apply to the natural
parameters directly. Each sample contributes a block

    A_i = [[a_i x_i^T x_i, b_i x_i^T], [b_i x_i, c_i]]

with x_i = (1, 10*log10(d_i/d0)) and scalar coefficients that depend only
on z_i = (c - mu(d_i))/sigma. The blocks are summed over every sample
(expected information, independent of which rows happened to censor), the
sum is inverted, and the diagonal is the asymptotic variance.
"""

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import DomainError, SingularInformationError
from .model import Dataset, PathlossParams, to_transformed
from .special import mills_ratio, normal_cdf, normal_pdf
from .tobit import TobitFit

#: Infinity-norm condition estimates above this are treated as singular.
CONDITION_LIMIT = 1e12

# Beyond this |z| every coefficient has saturated to its limit in double
# precision; clipping keeps c = +inf datasets finite (inf * 0 is nan).
_Z_SATURATION = 1e6


@dataclass(frozen=True)
class AvarMatrix:
    """Summed information matrix with its inverse diagonal and square roots.

    3x3 over (PL(d0), n, sigma^2), or 2x2 over (n, sigma^2) when the
    intercept is pinned; ``labels`` states the coordinate order.
    """

    a_matrix: np.ndarray
    inverse_diag: np.ndarray
    se: np.ndarray
    labels: tuple[str, ...]


def avar_coefficients(z: float, sigma: float) -> tuple[float, float, float]:
    """Per-sample information coefficients (a, b, c) at standardized margin z.

    z is the censoring margin (c - mean)/sigma. The hazard terms use
    phi^2/(1-Phi) = phi * mills_ratio(z), which stays finite where the
    direct quotient would hit 0/0. a and c are positive for all finite z;
    all three vanish as z -> -inf (sample always censored) and (a, b, c) ->
    (1/sigma^2, 0, 1/(2 sigma^4)) as z -> +inf (never censored).
    """
    if sigma <= 0.0:
        raise DomainError(f"sigma must be positive, got {sigma}")
    z = min(max(z, -_Z_SATURATION), _Z_SATURATION)
    phi = normal_pdf(z)
    cdf = normal_cdf(z)
    phi_mills = phi * mills_ratio(z)
    inv_s2 = 1.0 / (sigma * sigma)
    a = -inv_s2 * (z * phi - phi_mills - cdf)
    b = inv_s2 / sigma * (z * z * phi + phi - z * phi_mills) / 2.0
    c = -inv_s2 * inv_s2 * (z**3 * phi + z * phi - z * z * phi_mills - 2.0 * cdf) / 4.0
    return a, b, c


def avar_matrix(params: PathlossParams, dataset: Dataset, fixed_pl_d0: bool = False) -> AvarMatrix:
    """Sum the per-sample information blocks and invert.

    With ``fixed_pl_d0`` the intercept coordinate is removed before
    inversion, leaving a 2x2 system over (n, sigma^2). Raises
    SingularInformationError instead of regularizing when the summed
    matrix is numerically singular (condition estimate above 1e12) or not
    positive definite, since a doctored inverse would corrupt the
    standard errors.
    """
    alpha_t = to_transformed(params, dataset.c).alpha_t
    sigma = params.sigma
    x = dataset.regressor

    s_a0 = s_a1 = s_a2 = s_b0 = s_b1 = s_c = 0.0
    for xi in x:
        xi = float(xi)
        z = (alpha_t[0] + alpha_t[1] * xi) / sigma
        a, b, c = avar_coefficients(z, sigma)
        s_a0 += a
        s_a1 += a * xi
        s_a2 += a * xi * xi
        s_b0 += b
        s_b1 += b * xi
        s_c += c

    if fixed_pl_d0:
        matrix = np.array([[s_a2, s_b1], [s_b1, s_c]])
        labels = ("n", "sigma_sq")
    else:
        matrix = np.array(
            [
                [s_a0, s_a1, s_b0],
                [s_a1, s_a2, s_b1],
                [s_b0, s_b1, s_c],
            ]
        )
        labels = ("pl_d0", "n", "sigma_sq")

    inverse = _invert_symmetric(matrix)
    diag = np.diag(inverse).copy()
    if np.any(diag <= 0.0):
        raise SingularInformationError(
            "information matrix is not positive definite; variances undefined"
        )
    return AvarMatrix(a_matrix=matrix, inverse_diag=diag, se=np.sqrt(diag), labels=labels)


def estimate_standard_errors(fit: TobitFit, dataset: Dataset):
    """Standard errors (se_pl_d0, se_n, se_sigma_sq) at the fitted parameters.

    Plugs the estimates into the information matrix. When the fit pinned
    PL(d0) the first slot is None: a fixed quantity has no sampling error.
    """
    if not fit.converged:
        raise DomainError("standard errors require a converged fit")
    fixed = fit.fixed_pl_d0 is not None
    avm = avar_matrix(fit.params, dataset, fixed_pl_d0=fixed)
    if fixed:
        return None, float(avm.se[0]), float(avm.se[1])
    return float(avm.se[0]), float(avm.se[1]), float(avm.se[2])


def _invert_symmetric(m: np.ndarray) -> np.ndarray:
    if not np.all(np.isfinite(m)):
        raise SingularInformationError("information matrix has non-finite entries")
    if m.shape == (2, 2):
        det = m[0, 0] * m[1, 1] - m[0, 1] * m[0, 1]
        if det == 0.0:
            raise SingularInformationError("information matrix is exactly singular")
        inv = np.array([[m[1, 1], -m[0, 1]], [-m[0, 1], m[0, 0]]]) / det
    else:
        a00, a01, a02 = m[0]
        a11, a12 = m[1, 1], m[1, 2]
        a22 = m[2, 2]
        det = (
            a00 * (a11 * a22 - a12 * a12)
            - a01 * (a01 * a22 - a02 * a12)
            + a02 * (a01 * a12 - a02 * a11)
        )
        if det == 0.0:
            raise SingularInformationError("information matrix is exactly singular")
        adj = np.array(
            [
                [a11 * a22 - a12 * a12, a02 * a12 - a01 * a22, a01 * a12 - a02 * a11],
                [a02 * a12 - a01 * a22, a00 * a22 - a02 * a02, a01 * a02 - a00 * a12],
                [a01 * a12 - a02 * a11, a01 * a02 - a00 * a12, a00 * a11 - a01 * a01],
            ]
        )
        inv = adj / det
    norm = float(np.max(np.sum(np.abs(m), axis=1)))
    inv_norm = float(np.max(np.sum(np.abs(inv), axis=1)))
    condition = norm * inv_norm
    if not math.isfinite(condition) or condition > CONDITION_LIMIT:
        raise SingularInformationError(
            f"information matrix is numerically singular (condition estimate {condition:.3g})"
        )
    return inv
