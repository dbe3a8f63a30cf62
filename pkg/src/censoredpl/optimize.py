"""Dependency-free Nelder-Mead simplex minimizer for low-dimensional objectives.

Uses the standard coefficients (reflection 1, expansion 2, contraction 0.5,
shrink 0.5) and the common convention for the initial simplex: each vertex
offsets one coordinate of the start point by max(5% of its magnitude,
0.00025). Deterministic: identical inputs produce identical iterate
sequences. Non-finite objective values at trial points are treated as +inf,
so a self-guarding objective (for example a likelihood that rejects invalid
scale parameters) needs no optimizer-specific coupling.
"""

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import DomainError, NonFiniteObjectiveError

_RHO = 1.0  # reflection
_CHI = 2.0  # expansion
_GAMMA = 0.5  # contraction (outside and inside)
_SIGMA = 0.5  # shrink


@dataclass(frozen=True)
class NelderMeadResult:
    x: np.ndarray
    fun: float
    converged: bool
    iterations: int
    best_history: list[float]


def _initial_simplex(x0: np.ndarray, initial_step) -> np.ndarray:
    n = x0.size
    if initial_step is None:
        steps = np.maximum(0.05 * np.abs(x0), 0.00025)
    else:
        steps = np.broadcast_to(np.asarray(initial_step, dtype=float), (n,)).copy()
        if np.any(steps <= 0.0):
            raise DomainError("initial_step entries must be positive")
    simplex = np.tile(x0, (n + 1, 1))
    for i in range(n):
        simplex[i + 1, i] += steps[i]
    return simplex


def nelder_mead(
    objective,
    x0,
    xtol: float = 1e-7,
    ftol: float = 1e-10,
    max_iter: int = 2000,
    initial_step=None,
) -> NelderMeadResult:
    """Minimize ``objective`` from ``x0``; dimension must be in [1, 8].

    Converged means the simplex has collapsed: every vertex lies within
    ``xtol`` (inf-norm) of the best vertex and every value within ``ftol``
    of the best value. Ties on the reflection step are resolved by
    accepting the reflected point, which keeps iterate sequences
    reproducible.

    The simplex diameter cannot shrink below the objective's rounding
    floor, roughly sqrt(ulp(f)/curvature); asking for xtol under that
    floor exhausts max_iter and reports converged=False. Callers with
    large-magnitude objectives (a likelihood over many samples, say)
    should size xtol accordingly.
    """
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    n = x0.size
    if not 1 <= n <= 8:
        raise DomainError(f"dimension must be in [1, 8], got {n}")

    def f(x: np.ndarray) -> float:
        v = float(objective(x))
        return v if math.isfinite(v) else math.inf

    f0 = float(objective(x0))
    if not math.isfinite(f0):
        raise NonFiniteObjectiveError(f"objective is {f0} at the start point")

    simplex = _initial_simplex(x0, initial_step)
    values = np.array([f0] + [f(simplex[i]) for i in range(1, n + 1)])

    def sort():
        order = np.argsort(values, kind="stable")
        return simplex[order], values[order]

    simplex, values = sort()
    best_history = [values[0]]
    iterations = 0
    converged = False

    while iterations < max_iter:
        if (np.max(np.abs(simplex[1:] - simplex[0])) <= xtol
                and values[-1] - values[0] <= ftol):
            converged = True
            break

        centroid = simplex[:-1].mean(axis=0)
        xr = centroid + _RHO * (centroid - simplex[-1])
        fr = f(xr)

        if fr < values[0]:
            xe = centroid + _CHI * (centroid - simplex[-1])
            fe = f(xe)
            if fe < fr:
                simplex[-1], values[-1] = xe, fe
            else:
                simplex[-1], values[-1] = xr, fr
        elif fr <= values[-2]:
            simplex[-1], values[-1] = xr, fr
        elif fr < values[-1]:
            xc = centroid + _GAMMA * (centroid - simplex[-1])
            fc = f(xc)
            if fc <= fr:
                simplex[-1], values[-1] = xc, fc
            else:
                simplex, values = _shrink(simplex, values, f)
        else:
            xc = centroid - _GAMMA * (centroid - simplex[-1])
            fc = f(xc)
            if fc < values[-1]:
                simplex[-1], values[-1] = xc, fc
            else:
                simplex, values = _shrink(simplex, values, f)

        simplex, values = sort()
        iterations += 1
        best_history.append(values[0])

    return NelderMeadResult(
        x=simplex[0].copy(),
        fun=float(values[0]),
        converged=converged,
        iterations=iterations,
        best_history=best_history,
    )


def _shrink(simplex, values, f):
    for i in range(1, simplex.shape[0]):
        simplex[i] = simplex[0] + _SIGMA * (simplex[i] - simplex[0])
        values[i] = f(simplex[i])
    return simplex, values
