"""Monte Carlo experiments over the particle system.

Covariance of empirical-measure coordinates against the mean-field bound,
convergence of the particle profile to the conditioned law, stationary
profiles against the quasi-stationary distribution, and stationary product
moments.  Replica streams are derived from (master_seed, replica_index),
and reductions run over arrays ordered by replica index, so estimates are
bit-stable across thread counts.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .chain import AbsorbingChain
from .measures import (
    check_distribution,
    empirical_measure,
    l2_distance,
    tv_distance,
)
from .parallel import map_replicas
from .seeding import ReplicaSeed
from .semigroup import QsdSolution, conditioned_law, qsd
from .simulator import (
    configuration_from_profile,
    simulate,
    stationary_sampler,
    transition_tables,
)

__all__ = [
    "CorrelationEstimate",
    "ConvergenceCurve",
    "ProductMomentEstimate",
    "empirical_measure",
    "tv_distance",
    "l2_distance",
    "extreme_profiles",
    "configuration_from_profile",
    "covariance_bound",
    "correlation_experiment",
    "convergence_experiment",
    "qsd_profile_experiment",
    "product_moment_experiment",
    "batch_means_se",
]


def extreme_profiles(n: int) -> list[NDArray[np.float64]]:
    """Stress profiles standing in for a sup over configurations: every
    point mass, then the balanced profile."""
    if n < 1:
        raise ValueError("n must be positive")
    profiles = [np.eye(n)[x] for x in range(n)]
    profiles.append(np.full(n, 1.0 / n))
    return profiles


def batch_means_se(samples: ArrayLike, n_batches: int = 20) -> float:
    """Standard error for autocorrelated samples via batch means.

    Splits into contiguous batches (dropping any remainder) and returns
    std(batch means)/sqrt(n_batches).
    """
    x = np.asarray(samples, dtype=np.float64)
    if n_batches < 2:
        raise ValueError("n_batches must be at least 2")
    if x.size < 2 * n_batches:
        raise ValueError("need at least 2 samples per batch")
    size = x.size // n_batches
    means = x[: size * n_batches].reshape(n_batches, size).mean(axis=1)
    return float(means.std(ddof=1) / np.sqrt(n_batches))


def covariance_bound(
    chain: AbsorbingChain, n_particles: int, t: float, same_site: bool
) -> float:
    """Mean-field covariance envelope: 1{x=y}/N + (2/N)(e^{2Ct} - 1)."""
    c_rate = chain.max_absorption_rate
    bound = (2.0 / n_particles) * (np.exp(2.0 * c_rate * t) - 1.0)
    if same_site:
        bound += 1.0 / n_particles
    return float(bound)


def _resolve_site(chain: AbsorbingChain, site: int | str) -> int:
    if isinstance(site, str):
        return chain.index(site)
    site = int(site)
    if not (0 <= site < chain.n):
        raise ValueError(f"site index {site} out of range")
    return site


def _resolve_seed(seed: ReplicaSeed | int) -> ReplicaSeed:
    return seed if isinstance(seed, ReplicaSeed) else ReplicaSeed(int(seed))


@dataclass(frozen=True)
class CorrelationEstimate:
    site_x: str
    site_y: str
    covariance: float
    std_error: float
    bound: float
    replicas: int
    n_particles: int
    t: float


def correlation_experiment(
    chain: AbsorbingChain,
    xi0: ArrayLike,
    t: float,
    x: int | str,
    y: int | str,
    replicas: int,
    seed: ReplicaSeed | int,
    threads: int = 1,
) -> CorrelationEstimate:
    """Plug-in covariance of (m_x, m_y) at time t over independent replicas.

    The standard error is the i.i.d. SE of the centered product samples
    (the O(1/replicas) mean-estimation correction is negligible at the
    10^3+ replica counts this is meant for).  The bound field carries the
    mean-field envelope for the chain's maximal absorption rate.
    """
    if replicas < 2:
        raise ValueError("replicas must be at least 2")
    ix = _resolve_site(chain, x)
    iy = _resolve_site(chain, y)
    seed = _resolve_seed(seed)
    xi0 = np.asarray(xi0)
    n_particles = xi0.size
    tables = transition_tables(chain)
    master, base = seed.master_seed, seed.replica_index

    def one(r: int) -> tuple[float, float]:
        pos = simulate(chain, xi0, t, ReplicaSeed(master, base + r), tables)
        m = empirical_measure(pos, chain.n)
        return float(m[ix]), float(m[iy])

    pairs = np.array(map_replicas(one, replicas, threads))
    mx, my = pairs[:, 0], pairs[:, 1]
    centered = (mx - mx.mean()) * (my - my.mean())
    covariance = float(centered.mean())
    std_error = float(centered.std(ddof=1) / np.sqrt(replicas))
    return CorrelationEstimate(
        site_x=chain.states[ix],
        site_y=chain.states[iy],
        covariance=covariance,
        std_error=std_error,
        bound=covariance_bound(chain, n_particles, t, ix == iy),
        replicas=replicas,
        n_particles=n_particles,
        t=float(t),
    )


@dataclass(frozen=True)
class ConvergenceCurve:
    """Estimates indexed by particle count, N strictly increasing."""

    label: str
    n_values: NDArray[np.int64]
    estimates: NDArray[np.float64]
    std_errors: NDArray[np.float64]

    def __post_init__(self) -> None:
        if np.any(np.diff(self.n_values) <= 0):
            raise ValueError("n_values must be strictly increasing")

    def entries(self) -> list[tuple[int, float, float]]:
        return [
            (int(n), float(e), float(s))
            for n, e, s in zip(self.n_values, self.estimates, self.std_errors)
        ]


def convergence_experiment(
    chain: AbsorbingChain,
    profiles: list[ArrayLike],
    t: float,
    n_list: list[int],
    replicas: int,
    seed: ReplicaSeed | int,
    threads: int = 1,
) -> ConvergenceCurve:
    """Worst-profile mean distance between m(xi_t) and the conditioned law.

    For each particle count N, every profile is expanded to a deterministic
    configuration; the Monte Carlo mean of ||m(xi_t) - T_t m(xi_0)||_TV is
    taken over replicas, and the curve records the max over profiles (with
    that profile's SE).  The target uses the realized m(xi_0), not the
    requested profile, so rounding in the expansion cancels out.
    """
    if replicas < 2:
        raise ValueError("replicas must be at least 2")
    if not profiles:
        raise ValueError("need at least one profile")
    seed = _resolve_seed(seed)
    profiles = [check_distribution(p, chain.n) for p in profiles]
    n_arr = np.asarray(n_list, dtype=np.int64)
    tables = transition_tables(chain)
    master, base = seed.master_seed, seed.replica_index

    estimates = np.empty(n_arr.size)
    std_errors = np.empty(n_arr.size)
    cell = 0
    for k, n_particles in enumerate(n_arr):
        best = (-np.inf, 0.0)
        for profile in profiles:
            xi0 = configuration_from_profile(profile, int(n_particles), chain.states)
            target = conditioned_law(chain, empirical_measure(xi0, chain.n), t)
            cell_base = base + cell * replicas
            cell += 1

            def one(r: int) -> float:
                pos = simulate(chain, xi0, t, ReplicaSeed(master, cell_base + r), tables)
                return tv_distance(empirical_measure(pos, chain.n), target)

            dists = np.array(map_replicas(one, replicas, threads))
            mean = float(dists.mean())
            if mean > best[0]:
                best = (mean, float(dists.std(ddof=1) / np.sqrt(replicas)))
        estimates[k], std_errors[k] = best
    return ConvergenceCurve(
        label="profile_vs_conditioned_law",
        n_values=n_arr,
        estimates=estimates,
        std_errors=std_errors,
    )


def qsd_profile_experiment(
    chain: AbsorbingChain,
    n_list: list[int],
    burn_in: float,
    n_samples: int,
    spacing: float,
    seed: ReplicaSeed | int,
    solution: QsdSolution | None = None,
) -> ConvergenceCurve:
    """Stationary mean of ||m - nu||_TV per particle count.

    One long trajectory per N; batch-means standard errors since the
    samples are autocorrelated.
    """
    if solution is None:
        solution = qsd(chain)
    seed = _resolve_seed(seed)
    n_arr = np.asarray(n_list, dtype=np.int64)
    estimates = np.empty(n_arr.size)
    std_errors = np.empty(n_arr.size)
    for k, n_particles in enumerate(n_arr):
        samples = stationary_sampler(
            chain,
            int(n_particles),
            burn_in,
            n_samples,
            spacing,
            ReplicaSeed(seed.master_seed, seed.replica_index + k),
        )
        dists = np.array([tv_distance(m, solution.nu) for m in samples])
        estimates[k] = dists.mean()
        std_errors[k] = batch_means_se(dists)
    return ConvergenceCurve(
        label="stationary_profile_vs_qsd",
        n_values=n_arr,
        estimates=estimates,
        std_errors=std_errors,
    )


@dataclass(frozen=True)
class ProductMomentEstimate:
    sites: tuple[str, ...]
    estimate: float
    std_error: float
    reference: float
    n_particles: int
    n_samples: int


def product_moment_experiment(
    chain: AbsorbingChain,
    sites: list[int | str],
    n_particles: int,
    burn_in: float,
    n_samples: int,
    spacing: float,
    seed: ReplicaSeed | int,
    solution: QsdSolution | None = None,
) -> ProductMomentEstimate:
    """Stationary mean of the product of m over a site subset, with the
    matching product of quasi-stationary weights as reference."""
    if not sites:
        raise ValueError("need at least one site")
    idx = [_resolve_site(chain, s) for s in sites]
    if len(set(idx)) != len(idx):
        raise ValueError("sites must be distinct")
    if solution is None:
        solution = qsd(chain)
    samples = stationary_sampler(
        chain, n_particles, burn_in, n_samples, spacing, seed
    )
    stats = samples[:, idx].prod(axis=1)
    return ProductMomentEstimate(
        sites=tuple(chain.states[i] for i in idx),
        estimate=float(stats.mean()),
        std_error=batch_means_se(stats),
        reference=float(np.prod(solution.nu[idx])),
        n_particles=n_particles,
        n_samples=n_samples,
    )
