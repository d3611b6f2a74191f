"""Conditioned evolution, quasi-stationary distribution, decay-rate fit.

Two independent routes to the conditioned law are provided on purpose: a
normalized uniformization of the killed flow (`conditioned_law`) and a
Runge-Kutta integration of the nonlinear forward equation (`forward_ode`).
They agree only if both are right, which is what the cross-validation tests
lean on.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .chain import AbsorbingChain, transient_vector
from .errors import (
    DistanceUnderflowError,
    NormalizationDriftError,
    StepTooLargeError,
    SurvivalUnderflowError,
    UnsortedTimesError,
)
from .measures import check_distribution, tv_distance

__all__ = [
    "QsdSolution",
    "DecayFit",
    "conditioned_law",
    "forward_ode",
    "qsd",
    "decay_rate_estimate",
]

# Below this survival mass, renormalization amplifies noise beyond repair.
SURVIVAL_FLOOR = 1e-300

# Unit-sum drift of the ODE solution beyond which the integration is
# declared unstable rather than silently renormalized.
DRIFT_LIMIT = 1e-6

# Distances at or below this are numerically zero for log-scale fitting.
DISTANCE_FLOOR = 1e-12


def conditioned_law(
    chain: AbsorbingChain, mu: ArrayLike, t: float, tol: float = 1e-12
) -> NDArray[np.float64]:
    """Law at time ``t`` of the killed chain started from ``mu``,
    conditioned on survival: the transient vector normalized to unit sum.
    """
    w = transient_vector(chain, mu, t, tol)
    survival = float(w.sum())
    if survival <= SURVIVAL_FLOOR:
        raise SurvivalUnderflowError(
            f"survival mass {survival!r} at t={t}; reduce t"
        )
    return w / survival


def forward_ode(
    chain: AbsorbingChain, mu: ArrayLike, t: float, step: float
) -> NDArray[np.float64]:
    """Conditioned law via RK4 on the nonlinear forward equation.

    The integrated field is dv/dt = v Q + (v . absorption) v, whose exact
    solutions stay on the probability simplex; the quadratic term replaces
    the mass lost to absorption.  Classical fixed-step fourth-order
    Runge-Kutta; the step must satisfy step <= 0.1 / max_x |q(x,x)|.  The
    result is renormalized once at output, and a unit-sum drift beyond
    ``DRIFT_LIMIT`` raises instead.
    """
    v = check_distribution(mu, chain.n)
    t = float(t)
    if not np.isfinite(t) or t < 0.0:
        raise ValueError("time must be finite and nonnegative")
    if not (step > 0.0):
        raise ValueError("step must be positive")
    max_rate = float(chain.site_rates.max())
    if max_rate > 0.0 and step > 0.1 / max_rate:
        raise StepTooLargeError(
            f"step {step:g} exceeds stability limit {0.1 / max_rate:g}"
        )
    if t == 0.0:
        return v

    rates = chain.rates
    absorption = chain.absorption

    def field(u: NDArray[np.float64]) -> NDArray[np.float64]:
        return u @ rates + (u @ absorption) * u

    n_steps = int(np.ceil(t / step))
    h = t / n_steps
    # A diverging run overflows before the drift check catches it; the
    # check below is the diagnostic, not the warning spray.
    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(n_steps):
            k1 = field(v)
            k2 = field(v + 0.5 * h * k1)
            k3 = field(v + 0.5 * h * k2)
            k4 = field(v + h * k3)
            v = v + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    drift = abs(float(v.sum()) - 1.0)
    # Written so a NaN drift (blown-up solution) also lands in the raise.
    if not (drift <= DRIFT_LIMIT):
        raise NormalizationDriftError(
            f"unit-sum drift {drift:g} after {n_steps} steps"
        )
    return v / v.sum()


@dataclass(frozen=True)
class QsdSolution:
    """Dominant left eigenpair of the sub-generator, normalized."""

    nu: NDArray[np.float64]
    alpha: float
    residual: float
    iterations: int
    converged: bool
    theta_estimate: float | None = None

    def with_theta(self, theta: float) -> "QsdSolution":
        return replace(self, theta_estimate=theta)


def qsd(
    chain: AbsorbingChain, tol: float = 1e-12, max_iter: int = 10**6
) -> QsdSolution:
    """Quasi-stationary distribution by power iteration.

    Iterates left multiplication by M = I + h Q with h = 0.5/max|q(x,x)|,
    renormalizing to unit 1-norm each step.  M is entrywise nonnegative, so
    the iteration converges to the dominant left eigenvector from the
    strictly positive uniform start.  Stops when successive iterates differ
    by less than ``tol`` in sup norm and the eigen-residual is at most
    ``tol``; hitting ``max_iter`` first returns the best iterate with
    ``converged=False`` rather than raising.  The eigenvalue of Q is
    recovered from the Rayleigh quotient of M as (rho - 1)/h.
    """
    if not (tol > 0.0):
        raise ValueError("tol must be positive")
    if max_iter < 1:
        raise ValueError("max_iter must be at least 1")
    n = chain.n
    max_rate = float(chain.site_rates.max())
    if max_rate == 0.0:
        # No motion and no absorption cannot pass validation; still, the
        # uniform vector is trivially invariant.
        nu = np.full(n, 1.0 / n)
        return QsdSolution(nu=nu, alpha=0.0, residual=0.0, iterations=0,
                           converged=True)
    h = 0.5 / max_rate
    m = np.eye(n) + h * chain.rates

    def residual_of(vec: NDArray[np.float64]) -> tuple[float, float]:
        rho = float((vec @ m) @ vec / (vec @ vec))
        alpha = (rho - 1.0) / h
        res = float(np.max(np.abs(vec @ chain.rates - alpha * vec)))
        return res, alpha

    v = np.full(n, 1.0 / n)
    iterations = 0
    converged = False
    while iterations < max_iter:
        w = v @ m
        w = w / w.sum()
        iterations += 1
        if np.max(np.abs(w - v)) < tol:
            v = w
            res, _ = residual_of(v)
            if res <= tol:
                converged = True
                break
        else:
            v = w
    res, alpha = residual_of(v)
    v = v.copy()
    v.flags.writeable = False
    return QsdSolution(
        nu=v,
        alpha=alpha,
        residual=res,
        iterations=iterations,
        converged=converged,
    )


@dataclass(frozen=True)
class DecayFit:
    """Least-squares fit of log ||T_t mu - nu|| against t."""

    theta: float
    intercept: float
    r_squared: float
    times: NDArray[np.float64]
    distances: NDArray[np.float64]


def decay_rate_estimate(
    chain: AbsorbingChain,
    mu: ArrayLike,
    t_grid: ArrayLike,
    solution: QsdSolution | None = None,
) -> DecayFit:
    """Empirical exponential-decay rate of the conditioned law toward the
    quasi-stationary distribution.

    Fits a straight line to log of the total-variation distance over the
    given increasing time grid (at least 4 points) and returns the
    sign-flipped slope together with the intercept and R^2.  Distances at
    the numerical floor raise DistanceUnderflowError; shrink the grid.
    """
    times = np.asarray(t_grid, dtype=np.float64)
    if times.ndim != 1 or times.size < 4:
        raise ValueError("t_grid must contain at least 4 times")
    if times[0] <= 0.0:
        raise ValueError("t_grid times must be positive")
    if np.any(np.diff(times) <= 0.0):
        raise UnsortedTimesError("t_grid must be strictly increasing")
    if solution is None:
        solution = qsd(chain)
    nu = solution.nu
    distances = np.array(
        [tv_distance(conditioned_law(chain, mu, t), nu) for t in times]
    )
    if np.any(distances <= DISTANCE_FLOOR):
        raise DistanceUnderflowError(
            "distance at or below 1e-12 on the grid; shrink the grid"
        )
    y = np.log(distances)
    t_centered = times - times.mean()
    slope = float(t_centered @ (y - y.mean()) / (t_centered @ t_centered))
    intercept = float(y.mean() - slope * times.mean())
    ss_res = float(np.sum((y - (slope * times + intercept)) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r_squared = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return DecayFit(
        theta=-slope,
        intercept=intercept,
        r_squared=r_squared,
        times=times,
        distances=distances,
    )
