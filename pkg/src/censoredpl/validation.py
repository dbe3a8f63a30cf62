"""Input validation for the estimator-facing API."""

import numpy as np

from .exceptions import DomainError


def as_distance_array(X) -> np.ndarray:
    """Coerce estimator input to a 1-d float array of distances.

    Accepts shape (n,) or the sklearn-conventional (n, 1); requires finite,
    strictly positive entries.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim == 2 and X.shape[1] == 1:
        X = X[:, 0]
    if X.ndim != 1:
        raise DomainError(
            f"distances must have shape (n,) or (n, 1), got {X.shape}"
        )
    if X.size == 0:
        raise DomainError("distances must not be empty")
    if not np.all(np.isfinite(X)):
        raise DomainError("distances must be finite")
    if np.any(X <= 0):
        raise DomainError("distances must be positive")
    return X


def as_value_array(y, length: int) -> np.ndarray:
    """Coerce target values to a 1-d float array matched to the distances."""
    y = np.asarray(y, dtype=float)
    if y.ndim != 1:
        raise DomainError(f"values must be 1-dimensional, got shape {y.shape}")
    if y.size != length:
        raise DomainError(f"got {y.size} values for {length} distances")
    if not np.all(np.isfinite(y)):
        raise DomainError("values must be finite")
    return y
