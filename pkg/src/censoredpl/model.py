"""Log-distance pathloss model: parameters, datasets, and synthetic data.

The model is ``PL(d) = PL(d0) + 10*n*log10(d/d0) + shadowing`` for d >= d0,
with shadowing zero-mean Gaussian (std ``sigma`` dB). A measurement system
with noise floor ``c`` records any pathloss at or above ``c`` as exactly
``c``; such samples are *censored* and keep only their distance information.
"""

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .exceptions import DomainError, InvariantError
from .special import normal_cdf

SPEED_OF_LIGHT = 299792458.0  # m/s


@dataclass(frozen=True)
class PathlossParams:
    """Parameter triple of the log-distance model.

    Attributes:
        pl_d0: pathloss at the reference distance, dB.
        n: pathloss exponent (dB per decade of distance, divided by 10).
        sigma: shadowing standard deviation, dB. Must be positive.
    """

    pl_d0: float
    n: float
    sigma: float

    def __post_init__(self):
        for name in ("pl_d0", "n", "sigma"):
            if not math.isfinite(getattr(self, name)):
                raise DomainError(f"{name} must be finite")
        if self.sigma <= 0.0:
            raise DomainError(f"sigma must be > 0, got {self.sigma}")


@dataclass(frozen=True)
class TransformedParams:
    """Parameters of the sign-flipped, censor-shifted data y_t = -y + c.

    ``alpha_t = (c - pl_d0, -n)`` so that censoring of the original data at
    level c becomes left-censoring of y_t at zero. Shadowing std is
    unchanged.
    """

    alpha_t: tuple[float, float]
    sigma: float


@dataclass(frozen=True)
class CensoredSample:
    """One measurement: distance in meters, recorded pathloss in dB.

    A censored sample records the censoring level itself; only its distance
    carries information.
    """

    distance: float
    value: float
    censored: bool = False

    def __post_init__(self):
        if not (self.distance > 0.0 and math.isfinite(self.distance)):
            raise InvariantError(f"distance must be positive and finite, got {self.distance}")
        if not math.isfinite(self.value):
            raise InvariantError(f"value must be finite, got {self.value}")


@dataclass(frozen=True)
class Dataset:
    """Ordered sample collection with its reference distance and censoring level.

    Invariants enforced at construction: d0 > 0, at least one sample, every
    distance >= d0, censored samples carry exactly the value ``c``, and
    uncensored values lie strictly below ``c``.
    """

    samples: tuple[CensoredSample, ...]
    d0: float
    c: float
    frequency_hz: float | None = field(default=None)

    def __post_init__(self):
        object.__setattr__(self, "samples", tuple(self.samples))
        if not (self.d0 > 0.0 and math.isfinite(self.d0)):
            raise InvariantError(f"d0 must be positive and finite, got {self.d0}")
        if math.isnan(self.c):
            raise InvariantError("censoring level c must not be NaN")
        if len(self.samples) < 1:
            raise InvariantError("dataset must contain at least one sample")
        if self.frequency_hz is not None and not self.frequency_hz > 0.0:
            raise InvariantError(f"frequency_hz must be positive, got {self.frequency_hz}")
        for i, s in enumerate(self.samples):
            if s.distance < self.d0:
                raise InvariantError(f"sample {i}: distance {s.distance} is below d0={self.d0}")
            if s.censored and s.value != self.c:
                raise InvariantError(
                    f"sample {i}: censored sample value {s.value} differs from c={self.c}"
                )
            if not s.censored and s.value >= self.c:
                raise InvariantError(
                    f"sample {i}: uncensored value {s.value} is at or above c={self.c}"
                )

    def __len__(self) -> int:
        return len(self.samples)

    @cached_property
    def distances(self) -> np.ndarray:
        return np.array([s.distance for s in self.samples], dtype=float)

    @cached_property
    def values(self) -> np.ndarray:
        return np.array([s.value for s in self.samples], dtype=float)

    @cached_property
    def censored(self) -> np.ndarray:
        return np.array([s.censored for s in self.samples], dtype=bool)

    @cached_property
    def regressor(self) -> np.ndarray:
        """Regressor column 10*log10(d/d0), one entry per sample."""
        return distance_regressor(self.distances, self.d0)

    @property
    def n_censored(self) -> int:
        return int(np.count_nonzero(self.censored))

    @property
    def n_uncensored(self) -> int:
        return len(self.samples) - self.n_censored

    @property
    def censored_fraction(self) -> float:
        return self.n_censored / len(self.samples)


def distance_regressor(d, d0: float):
    """10*log10(d/d0) for scalar or array d; requires d >= d0 > 0."""
    if d0 <= 0.0:
        raise DomainError(f"d0 must be positive, got {d0}")
    arr = np.asarray(d, dtype=float)
    if np.any(arr < d0):
        raise DomainError(f"distances below the reference distance d0={d0} are not modeled")
    out = 10.0 * np.log10(arr / d0)
    return float(out) if np.isscalar(d) or arr.ndim == 0 else out


def mean_pathloss(params: PathlossParams, d, d0: float):
    """Distance-dependent mean pathloss PL(d0) + 10*n*log10(d/d0), dB.

    Accepts a scalar distance or an array; raises DomainError below d0.
    """
    return params.pl_d0 + params.n * distance_regressor(d, d0)


def fspl_reference(frequency_hz: float, d0: float) -> float:
    """Free-space pathloss at the reference distance, 20*log10(4*pi*d0/lambda).

    Theoretically consistent as a fixed reference only when the pathloss
    exponent is 2 (line of sight).
    """
    if frequency_hz <= 0.0:
        raise DomainError(f"frequency_hz must be positive, got {frequency_hz}")
    if d0 <= 0.0:
        raise DomainError(f"d0 must be positive, got {d0}")
    wavelength = SPEED_OF_LIGHT / frequency_hz
    return 20.0 * math.log10(4.0 * math.pi * d0 / wavelength)


def generate_synthetic(
    params: PathlossParams,
    distances,
    d0: float,
    seed: int | np.random.SeedSequence,
) -> list[tuple[float, float]]:
    """Draw uncensored pathloss samples at the given distances.

    Each value is the mean pathloss plus a Gaussian shadowing draw from a
    PCG64 generator seeded with ``seed``; identical seeds reproduce the
    output exactly on the same build (cross-platform reproducibility is
    best effort, as for any compiled RNG).
    """
    mu = mean_pathloss(params, np.asarray(distances, dtype=float), d0)
    rng = np.random.Generator(np.random.PCG64(seed))
    values = mu + rng.normal(0.0, params.sigma, size=mu.shape)
    return list(zip((float(x) for x in np.asarray(distances, dtype=float)),
                    (float(v) for v in values)))


def apply_censoring(
    values,
    c: float,
    d0: float,
    frequency_hz: float | None = None,
) -> Dataset:
    """Censor (distance, pathloss) pairs at level c and build a Dataset.

    Values at or above c are recorded as exactly c with the censored flag
    set; values below c pass through unchanged. Order is preserved, and the
    operation is idempotent.
    """
    samples = tuple(
        CensoredSample(d, c, True) if v >= c else CensoredSample(d, v, False)
        for d, v in values
    )
    return Dataset(samples, d0=d0, c=c, frequency_hz=frequency_hz)


def censoring_probability(params: PathlossParams, d, d0: float, c: float):
    """Probability that a sample at distance d is censored: 1 - Phi((c - mu(d))/sigma)."""
    mu = mean_pathloss(params, d, d0)
    z = (c - mu) / params.sigma
    if np.isscalar(z):
        return 1.0 - normal_cdf(z)
    return np.array([1.0 - normal_cdf(float(v)) for v in np.atleast_1d(z)])


def expected_censored_fraction(params: PathlossParams, distances, d0: float, c: float) -> float:
    """Design-averaged censoring probability for a fixed set of distances."""
    p = censoring_probability(params, np.asarray(distances, dtype=float), d0, c)
    return float(np.mean(p))


def censoring_level_for_fraction(
    params: PathlossParams,
    distances,
    d0: float,
    fraction: float,
    tol: float = 1e-10,
) -> float:
    """Censoring level c whose expected censored fraction equals ``fraction``.

    Solved by bisection on the (monotone nonincreasing in c) expected
    fraction; requires 0 < fraction < 1.
    """
    if not 0.0 < fraction < 1.0:
        raise DomainError(f"fraction must be in (0, 1), got {fraction}")
    distances = np.asarray(distances, dtype=float)
    mu = mean_pathloss(params, distances, d0)
    lo = float(np.min(mu)) - 12.0 * params.sigma
    hi = float(np.max(mu)) + 12.0 * params.sigma
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if expected_censored_fraction(params, distances, d0, mid) > fraction:
            lo = mid  # too much censoring: raise the level
        else:
            hi = mid
        if hi - lo < tol:
            break
    return 0.5 * (lo + hi)


def to_transformed(params: PathlossParams, c: float) -> TransformedParams:
    """Map parameters to the flipped data space y_t = -y + c.

    There the model reads y_t = X*alpha_t - eps with
    alpha_t = (c - pl_d0, -n), and censoring happens at y_t <= 0.
    """
    return TransformedParams(alpha_t=(c - params.pl_d0, -params.n), sigma=params.sigma)


def from_transformed(tp: TransformedParams, c: float) -> PathlossParams:
    """Inverse of :func:`to_transformed`."""
    return PathlossParams(pl_d0=c - tp.alpha_t[0], n=-tp.alpha_t[1], sigma=tp.sigma)
