"""Finite Markov chains with killing.

A chain here is a finite set of named sites, nonnegative jump rates between
them, and a nonnegative absorption rate per site.  The object stores the
sub-generator restricted to the live sites; absorption is a separate vector.
Row x of ``rates`` has off-diagonal entries q(x, y) and diagonal
-(sum_y q(x, y) + absorption[x]), so rows sum to -absorption[x].
"""
from __future__ import annotations

import json
import os
from collections.abc import Mapping
from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .errors import (
    ChainFormatError,
    DimensionMismatchError,
    NegativeRateError,
    NoAbsorptionError,
    NotIrreducibleError,
    RateBoundError,
)
from .measures import check_distribution

__all__ = [
    "MAX_RATE",
    "AbsorbingChain",
    "InflowDominance",
    "validate_chain",
    "load_chain",
    "transient_vector",
    "inflow_dominance",
]

# Largest rate accepted anywhere in a chain spec.  Keeps uniformization
# constants and event counts in a numerically sane regime.
MAX_RATE = 1e6

# Uniformization is applied on subintervals with rate*length at most this,
# so the leading Poisson weight exp(-rate*length) never underflows.
_MAX_UNIFORMIZATION_MASS = 500.0


@dataclass(frozen=True, eq=False)
class AbsorbingChain:
    """Validated chain data.  Build via :func:`validate_chain` or
    :func:`load_chain`; direct construction skips semantic validation but
    still recomputes the diagonal from the off-diagonal rates and
    ``absorption``."""

    states: tuple[str, ...]
    rates: NDArray[np.float64]
    absorption: NDArray[np.float64]

    def __post_init__(self) -> None:
        states = tuple(str(s) for s in self.states)
        rates = np.array(self.rates, dtype=np.float64)
        absorption = np.array(self.absorption, dtype=np.float64)
        n = len(states)
        if rates.shape != (n, n):
            raise DimensionMismatchError(
                f"rates must be {n}x{n} for {n} states, got {rates.shape}"
            )
        if absorption.shape != (n,):
            raise DimensionMismatchError(
                f"absorption must have length {n}, got {absorption.shape}"
            )
        # The stored diagonal is definitional, whatever the caller passed.
        np.fill_diagonal(rates, 0.0)
        np.fill_diagonal(rates, -(rates.sum(axis=1) + absorption))
        rates.flags.writeable = False
        absorption.flags.writeable = False
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "rates", rates)
        object.__setattr__(self, "absorption", absorption)

    @property
    def n(self) -> int:
        return len(self.states)

    @cached_property
    def site_rates(self) -> NDArray[np.float64]:
        """Total outflow rate per site (internal moves plus absorption)."""
        out = -np.diag(self.rates).copy()
        out.flags.writeable = False
        return out

    @cached_property
    def max_absorption_rate(self) -> float:
        return float(self.absorption.max())

    @cached_property
    def max_internal_rate(self) -> float:
        """Largest total internal jump rate over sites."""
        off = self.rates.copy()
        np.fill_diagonal(off, 0.0)
        return float(off.sum(axis=1).max()) if self.n > 1 else 0.0

    @cached_property
    def jump_kernel(self) -> NDArray[np.float64]:
        """Row-stochastic internal jump matrix at the uniformized rate.

        p(x, y) = q(x, y) / max_internal_rate for y != x, with the leftover
        mass on the diagonal, so every row sums to one exactly.  For a
        single-site chain this is the identity.
        """
        qbar = self.max_internal_rate
        if qbar == 0.0:
            p = np.eye(self.n)
        else:
            p = self.rates / qbar
            np.fill_diagonal(p, 0.0)
            np.fill_diagonal(p, np.maximum(0.0, 1.0 - p.sum(axis=1)))
        p.flags.writeable = False
        return p

    def index(self, name: str) -> int:
        try:
            return self.states.index(name)
        except ValueError:
            raise KeyError(f"unknown state {name!r}") from None


class InflowDominance(NamedTuple):
    holds: bool
    guaranteed_inflow: float
    max_absorption: float


def _require(condition: bool, exc: type[Exception], message: str) -> None:
    if not condition:
        raise exc(message)


def _as_rate_matrix(raw: object, n: int) -> NDArray[np.float64]:
    arr = np.asarray(raw, dtype=np.float64)
    if arr.ndim != 2 or arr.shape != (n, n):
        raise DimensionMismatchError(
            f"rates must be an {n}x{n} matrix, got shape {arr.shape}"
        )
    return arr


def validate_chain(spec: Mapping[str, object]) -> AbsorbingChain:
    """Check a raw chain mapping and build the validated object.

    The mapping must carry exactly the keys ``states``, ``rates`` and
    ``absorption``.  Off-diagonal rates and absorption rates must be finite,
    nonnegative and at most ``MAX_RATE``; the diagonal of ``rates`` is
    ignored and recomputed.  The live sites must form one communicating
    class and at least one site must have positive absorption.
    """
    if not isinstance(spec, Mapping):
        raise ChainFormatError("chain spec must be a JSON object")
    required = {"states", "rates", "absorption"}
    unknown = set(spec) - required
    if unknown:
        raise ChainFormatError(f"unknown chain field(s): {sorted(unknown)}")
    missing = required - set(spec)
    if missing:
        raise ChainFormatError(f"missing chain field(s): {sorted(missing)}")

    states_raw = spec["states"]
    if (
        not isinstance(states_raw, (list, tuple))
        or not states_raw
        or not all(isinstance(s, str) for s in states_raw)
    ):
        raise ChainFormatError("states must be a nonempty list of strings")
    states = tuple(states_raw)
    if len(set(states)) != len(states):
        raise ChainFormatError("state names must be unique")
    n = len(states)

    try:
        rates = _as_rate_matrix(spec["rates"], n)
        absorption = np.asarray(spec["absorption"], dtype=np.float64)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, DimensionMismatchError):
            raise
        raise ChainFormatError(f"non-numeric rate entry: {exc}") from exc
    if absorption.shape != (n,):
        raise DimensionMismatchError(
            f"absorption must have length {n}, got shape {absorption.shape}"
        )

    off = rates.copy()
    np.fill_diagonal(off, 0.0)
    _require(bool(np.all(np.isfinite(off))), NegativeRateError,
             "jump rates must be finite")
    _require(bool(np.all(np.isfinite(absorption))), NegativeRateError,
             "absorption rates must be finite")
    _require(bool(np.all(off >= 0.0)), NegativeRateError,
             "off-diagonal jump rates must be nonnegative")
    _require(bool(np.all(absorption >= 0.0)), NegativeRateError,
             "absorption rates must be nonnegative")
    _require(bool(np.all(off <= MAX_RATE)), RateBoundError,
             f"jump rates must not exceed {MAX_RATE:g}")
    _require(bool(np.all(absorption <= MAX_RATE)), RateBoundError,
             f"absorption rates must not exceed {MAX_RATE:g}")
    _require(bool(np.any(absorption > 0.0)), NoAbsorptionError,
             "at least one site must have positive absorption rate")

    adjacency = off > 0.0
    if not (_all_reachable(adjacency, 0) and _all_reachable(adjacency.T, 0)):
        raise NotIrreducibleError(
            "live sites must form a single communicating class"
        )
    return AbsorbingChain(states=states, rates=off, absorption=absorption)


def _all_reachable(adjacency: NDArray[np.bool_], start: int) -> bool:
    n = adjacency.shape[0]
    seen = np.zeros(n, dtype=bool)
    seen[start] = True
    frontier = [start]
    while frontier:
        nxt = adjacency[frontier].any(axis=0) & ~seen
        seen |= nxt
        frontier = list(np.flatnonzero(nxt))
    return bool(seen.all())


def load_chain(path: str | os.PathLike) -> AbsorbingChain:
    """Read a chain from a JSON file and validate it."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            spec = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ChainFormatError(
                f"{os.fspath(path)}: invalid JSON at line {exc.lineno}, "
                f"column {exc.colno}: {exc.msg}"
            ) from exc
    return validate_chain(spec)


def transient_vector(
    chain: AbsorbingChain,
    initial: ArrayLike,
    t: float,
    tol: float = 1e-12,
) -> NDArray[np.float64]:
    """Unnormalized law of the killed chain at time ``t``.

    Returns the row vector ``initial @ expm(t * rates)`` computed by
    uniformization: the matrix exponential is expanded as a Poisson mixture
    of powers of the substochastic matrix I + rates / r, with r the largest
    total site rate.  Every term is nonnegative, so the result is too, and
    the series is truncated once the remaining Poisson mass is below
    ``tol``.  Long intervals are split so the leading Poisson weight stays
    representable.  The sum of the result is the survival probability.
    """
    mu = check_distribution(initial, chain.n)
    t = float(t)
    if not np.isfinite(t):
        raise ValueError("time must be finite")
    if t < 0.0:
        raise ValueError("time must be nonnegative")
    if not (tol > 0.0):
        raise ValueError("tol must be positive")
    if t == 0.0:
        return mu

    rate = float(chain.site_rates.max())
    if rate == 0.0:
        return mu
    sub = np.eye(chain.n) + chain.rates / rate

    n_steps = max(1, int(np.ceil(rate * t / _MAX_UNIFORMIZATION_MASS)))
    dt = t / n_steps
    a = rate * dt
    step_tol = tol / n_steps

    w = mu
    for _ in range(n_steps):
        term_weight = np.exp(-a)
        accumulated = term_weight
        power = w
        out = term_weight * power
        k = 0
        while 1.0 - accumulated > step_tol:
            k += 1
            power = power @ sub
            term_weight *= a / k
            accumulated += term_weight
            out = out + term_weight * power
        w = out
    return w


def inflow_dominance(chain: AbsorbingChain) -> InflowDominance:
    """Diagnostic: does guaranteed inflow strictly exceed worst absorption?

    The guaranteed inflow is the sum over sites z of the smallest rate into
    z from any other single site, min_{x != z} q(x, z).  When that total
    strictly exceeds the largest absorption rate, revival pressure into
    every site beats worst-case killing.  For a single-site chain the inner
    minimum runs over an empty set and is taken as 0, so the condition
    reads false.  Purely diagnostic; nothing downstream requires it.
    """
    max_absorption = chain.max_absorption_rate
    if chain.n == 1:
        guaranteed = 0.0
    else:
        off = chain.rates.copy()
        # Exclude the diagonal from the per-column minimum.
        np.fill_diagonal(off, np.inf)
        guaranteed = float(off.min(axis=0).sum())
    return InflowDominance(
        holds=bool(guaranteed > max_absorption),
        guaranteed_inflow=guaranteed,
        max_absorption=max_absorption,
    )
