"""Event-driven simulation of the interacting particle system.

N particles sit on the chain's live sites.  Each moves with the chain's
rates; when a particle draws an absorption event it is not killed but
instantly adopts the position of a uniformly chosen other particle.  The
event loop is exact (no time discretization): exponential holding times at
the configuration's total rate, then a rate-proportional pick of particle
and move.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

from . import _kernels
from .chain import AbsorbingChain
from .errors import UnsortedTimesError
from .measures import check_distribution, empirical_measure
from .seeding import ReplicaSeed

__all__ = [
    "TransitionTables",
    "transition_tables",
    "validate_configuration",
    "configuration_from_profile",
    "simulate",
    "simulate_trajectory",
    "stationary_sampler",
]


@dataclass(frozen=True)
class TransitionTables:
    """Per-site event tables consumed by the kernels.

    cum_move row x holds the cumulative probability of each internal
    target given an event at site x; a draw beyond the last entry is an
    absorption attempt.  Rows for sites with zero absorption have their
    last positive target's entry forced above 1, so rounding in the
    cumulative sum can never manufacture an absorption event there.
    """

    site_rate: NDArray[np.float64]
    cum_move: NDArray[np.float64]


def transition_tables(chain: AbsorbingChain) -> TransitionTables:
    n = chain.n
    off = chain.rates.copy()
    np.fill_diagonal(off, 0.0)
    site_rate = chain.site_rates.copy()
    cum_move = np.zeros((n, n))
    for x in range(n):
        if site_rate[x] > 0.0:
            cum_move[x] = np.cumsum(off[x]) / site_rate[x]
            if chain.absorption[x] == 0.0:
                positive = np.flatnonzero(off[x] > 0.0)
                if positive.size:
                    cum_move[x, positive[-1]] = 2.0
    site_rate.flags.writeable = False
    cum_move.flags.writeable = False
    return TransitionTables(site_rate=site_rate, cum_move=cum_move)


def validate_configuration(xi0: ArrayLike, n_states: int) -> NDArray[np.int64]:
    pos = np.asarray(xi0)
    if pos.ndim != 1 or pos.size < 2:
        raise ValueError("configuration needs at least 2 particles")
    if not np.issubdtype(pos.dtype, np.integer):
        raise ValueError("positions must be integer site indices")
    pos = pos.astype(np.int64)
    if pos.min() < 0 or pos.max() >= n_states:
        raise ValueError("position out of range")
    return pos


def configuration_from_profile(
    profile: ArrayLike, n_particles: int, states: tuple[str, ...] | None = None
) -> NDArray[np.int64]:
    """Deterministic configuration matching a target site profile.

    Places floor(n_particles * profile[x]) particles at each site, in site
    order; the leftover particles all go to the lexicographically first
    site name (or site 0 when no names are given).  Reproducible by
    construction: no randomness involved.
    """
    if n_particles < 2:
        raise ValueError("n_particles must be at least 2")
    p = check_distribution(profile)
    if states is not None and len(states) != p.size:
        raise ValueError("states and profile lengths differ")
    counts = np.floor(n_particles * p).astype(np.int64)
    remainder = n_particles - int(counts.sum())
    if remainder > 0:
        if states is not None:
            first = min(range(len(states)), key=lambda i: states[i])
        else:
            first = 0
        counts[first] += remainder
    return np.repeat(np.arange(p.size, dtype=np.int64), counts)


def _resolve_seed(seed: ReplicaSeed | int) -> ReplicaSeed:
    if isinstance(seed, ReplicaSeed):
        return seed
    return ReplicaSeed(int(seed))


def simulate(
    chain: AbsorbingChain,
    xi0: ArrayLike,
    t: float,
    seed: ReplicaSeed | int,
    tables: TransitionTables | None = None,
) -> NDArray[np.int64]:
    """One sample of the configuration at time ``t`` started from ``xi0``.

    Passing precomputed ``tables`` skips rebuilding the per-site event
    tables; experiments looping over replicas use that.
    """
    pos = validate_configuration(xi0, chain.n)
    t = float(t)
    if not np.isfinite(t) or t < 0.0:
        raise ValueError("time must be finite and nonnegative")
    if tables is None:
        tables = transition_tables(chain)
    gen = _resolve_seed(seed).generator()
    out = pos.copy()
    _kernels.run_events(gen, out, tables.site_rate, tables.cum_move, t)
    return out


def simulate_trajectory(
    chain: AbsorbingChain,
    xi0: ArrayLike,
    record_times: ArrayLike,
    seed: ReplicaSeed | int,
    tables: TransitionTables | None = None,
) -> NDArray[np.int64]:
    """Snapshots of one realization at the given times.

    Returns an array of shape (len(record_times), N).  Times must be
    nondecreasing and start at or after 0; snapshots are right-continuous.
    """
    pos = validate_configuration(xi0, chain.n)
    times = np.asarray(record_times, dtype=np.float64)
    if times.ndim != 1 or times.size == 0:
        raise UnsortedTimesError("record_times must be a nonempty 1-d array")
    if not np.all(np.isfinite(times)):
        raise UnsortedTimesError("record_times must be finite")
    if times[0] < 0.0 or np.any(np.diff(times) < 0.0):
        raise UnsortedTimesError("record_times must be sorted and start >= 0")
    if tables is None:
        tables = transition_tables(chain)
    gen = _resolve_seed(seed).generator()
    out = np.empty((times.size, pos.size), dtype=np.int64)
    work = pos.copy()
    _kernels.run_recorded(gen, work, tables.site_rate, tables.cum_move, times, out)
    return out


def stationary_sampler(
    chain: AbsorbingChain,
    n_particles: int,
    burn_in: float,
    n_samples: int,
    spacing: float,
    seed: ReplicaSeed | int,
) -> NDArray[np.float64]:
    """Empirical-measure samples along one long trajectory.

    Starts from the balanced profile, discards [0, burn_in], then records
    the empirical measure every ``spacing`` time units, ``n_samples``
    times (first sample at burn_in + spacing).  Successive samples are
    autocorrelated; use batch-means errors downstream.
    """
    if not (burn_in > 0.0):
        raise ValueError("burn_in must be positive")
    if not (spacing > 0.0):
        raise ValueError("spacing must be positive")
    if n_samples < 1:
        raise ValueError("n_samples must be at least 1")
    uniform = np.full(chain.n, 1.0 / chain.n)
    xi0 = configuration_from_profile(uniform, n_particles, chain.states)
    times = burn_in + spacing * np.arange(1, n_samples + 1)
    traj = simulate_trajectory(chain, xi0, times, seed)
    measures = np.empty((n_samples, chain.n))
    for k in range(n_samples):
        measures[k] = empirical_measure(traj[k], chain.n)
    return measures
