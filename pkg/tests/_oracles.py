"""Independent reference computations used to cross-check the package.

Everything here is deliberately brute force and shares no code with the
implementations under test: the matrix exponential is a plain truncated
power series, eigenpairs come from numpy's dense solver, and the small
interacting system is collapsed to its exact occupancy-count master
equation.
"""
from __future__ import annotations

import numpy as np

# Golden 2-site chain: both internal rates 1, absorption (1, 0).
# Its dominant left eigenpair solves a^2 + 3a + 1 = 0 by hand.
GOLD_NU = np.array([(3.0 - np.sqrt(5.0)) / 2.0, (np.sqrt(5.0) - 1.0) / 2.0])
GOLD_ALPHA = (-3.0 + np.sqrt(5.0)) / 2.0
# Gap between the two eigenvalues; drives the decay-rate fit.
GOLD_GAP = np.sqrt(5.0)


def series_expm(q: np.ndarray, t: float, terms: int | None = None) -> np.ndarray:
    """expm(t*q) as a straight truncated power series.

    The raw series of a generator cancels catastrophically (terms grow to
    e^{t max|q_xx|} before shrinking), so the sum runs over the shifted
    matrix t*q + theta*I, which is entrywise nonnegative, and the result
    is damped by e^{-theta}.  The shift is deliberately not the smallest
    admissible one, so the grouping differs from uniformization.  The
    truncation check requires the last damped term below 1e-16.
    """
    n = q.shape[0]
    theta = 1.25 * t * float(np.max(-np.diag(q))) + 1.0
    m = t * q + theta * np.eye(n)
    if m.min() < 0.0:
        raise RuntimeError("shift too small, matrix not nonnegative")
    if terms is None:
        terms = max(200, int(theta + 12.0 * np.sqrt(theta) + 20.0))
    out = np.eye(n)
    term = np.eye(n)
    damp = np.exp(-theta)
    for k in range(1, terms + 1):
        term = term @ m / k
        out = out + term
    if damp * np.max(term) > 1e-16:
        raise RuntimeError("series truncation too coarse for this input")
    return damp * out


def dominant_left_eigenpair(rates: np.ndarray) -> tuple[float, np.ndarray]:
    """Top eigenvalue and normalized left eigenvector via the dense solver."""
    vals, vecs = np.linalg.eig(rates.T)
    k = int(np.argmax(vals.real))
    v = vecs[:, k].real
    v = np.abs(v)
    return float(vals[k].real), v / v.sum()


def occupancy_generator(chain, n_particles: int) -> np.ndarray:
    """Exact generator of the particle system collapsed to site-0 counts.

    Only valid for 2-site chains: the configuration law is a function of
    k = #particles at site 0.  Moves k -> k-1 when a site-0 particle jumps
    internally or is revived onto a site-1 particle, and symmetrically for
    k -> k+1.
    """
    if chain.n != 2:
        raise ValueError("occupancy collapse needs a 2-site chain")
    n = n_particles
    q01 = chain.rates[0, 1]
    q10 = chain.rates[1, 0]
    c0, c1 = chain.absorption
    g = np.zeros((n + 1, n + 1))
    for k in range(n + 1):
        down = k * q01 + k * c0 * (n - k) / (n - 1)
        up = (n - k) * q10 + (n - k) * c1 * k / (n - 1)
        if k > 0:
            g[k, k - 1] = down
        if k < n:
            g[k, k + 1] = up
        g[k, k] = -(down + up)
    return g


def occupancy_law(chain, n_particles: int, k0: int, t: float) -> np.ndarray:
    """Law of the site-0 count at time t, started from exactly k0 there."""
    g = occupancy_generator(chain, n_particles)
    p0 = np.zeros(n_particles + 1)
    p0[k0] = 1.0
    return p0 @ series_expm(g, t)


def occupancy_moments(law: np.ndarray, n_particles: int) -> tuple[float, float]:
    """(E[m_0], E[m_0^2]) under a site-0 count law."""
    k = np.arange(n_particles + 1)
    m = k / n_particles
    return float(law @ m), float(law @ m**2)
