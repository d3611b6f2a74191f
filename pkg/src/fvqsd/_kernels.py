"""Hot inner loops, compiled with numba unless FVQSD_DISABLE_JIT is set.

Each kernel is written once as a plain function in the numba-compatible
subset and wrapped by @njit(cache=True, nogil=True) at import time.  Setting
the environment variable FVQSD_DISABLE_JIT=1 (before import) keeps the pure
Python versions; both paths draw randomness exclusively through
np.random.Generator methods, whose bit streams are identical under numba and
plain numpy, so the two paths produce identical trajectories, not merely
equal in distribution.
"""
from __future__ import annotations

import os

import numpy as np

__all__ = [
    "USING_JIT",
    "run_events",
    "run_recorded",
    "apply_marks",
    "influence_matrix_kernel",
]

USING_JIT = os.environ.get("FVQSD_DISABLE_JIT", "").strip() not in ("1", "true", "yes")

if USING_JIT:
    try:
        from numba import njit as _njit
    except ImportError:  # pragma: no cover - numba is a hard dep, belt and braces
        USING_JIT = False

if USING_JIT:
    def _jit(fn):
        return _njit(cache=True, nogil=True)(fn)
else:
    def _jit(fn):
        return fn


def _pick_particle(gen, positions, site_rate, total):
    # Linear scan over cumulative site rates; clamp to the last particle so
    # a rounding overshoot of total cannot fall off the end.
    u = gen.random() * total
    acc = 0.0
    last = len(positions) - 1
    for k in range(last):
        acc += site_rate[positions[k]]
        if u < acc:
            return k
    return last


def _pick_move(gen, cum_move, x, n_states):
    # Returns the internal target index, or -1 for an absorption attempt.
    u = gen.random()
    for j in range(n_states):
        if u < cum_move[x, j]:
            return j
    return -1


def run_events(gen, positions, site_rate, cum_move, horizon):
    """Drive the interacting-particle dynamics over [0, horizon].

    positions is modified in place.  Each particle at site x waits an
    exponential time at rate site_rate[x]; the chosen particle either does
    an internal jump (rows of cum_move hold the cumulative split) or, on an
    absorption attempt, adopts the position of a uniformly chosen other
    particle.  Returns the number of events applied.
    """
    n_particles = len(positions)
    n_states = cum_move.shape[0]
    total = 0.0
    for k in range(n_particles):
        total += site_rate[positions[k]]
    t = 0.0
    n_events = 0
    while True:
        if total <= 0.0:
            break
        dt = gen.exponential(1.0) / total
        if t + dt > horizon:
            break
        t += dt
        i = _pick_particle(gen, positions, site_rate, total)
        x = positions[i]
        y = _pick_move(gen, cum_move, x, n_states)
        if y < 0:
            while True:
                j = gen.integers(0, n_particles)
                if j != i:
                    break
            y = positions[j]
        positions[i] = y
        total += site_rate[y] - site_rate[x]
        n_events += 1
    return n_events


def run_recorded(gen, positions, site_rate, cum_move, record_times, out):
    """Same dynamics as run_events, snapshotting at the given sorted times.

    out has shape (len(record_times), n_particles).  Snapshots are
    right-continuous: a record time equal to an event time sees the
    post-event configuration.
    """
    n_particles = len(positions)
    n_states = cum_move.shape[0]
    n_rec = len(record_times)
    total = 0.0
    for k in range(n_particles):
        total += site_rate[positions[k]]
    t = 0.0
    rec = 0
    while rec < n_rec:
        if total <= 0.0:
            break
        dt = gen.exponential(1.0) / total
        while rec < n_rec and record_times[rec] < t + dt:
            for k in range(n_particles):
                out[rec, k] = positions[k]
            rec += 1
        if rec >= n_rec:
            break
        t += dt
        i = _pick_particle(gen, positions, site_rate, total)
        x = positions[i]
        y = _pick_move(gen, cum_move, x, n_states)
        if y < 0:
            while True:
                j = gen.integers(0, n_particles)
                if j != i:
                    break
            y = positions[j]
        positions[i] = y
        total += site_rate[y] - site_rate[x]
    while rec < n_rec:
        for k in range(n_particles):
            out[rec, k] = positions[k]
        rec += 1
    return positions


def apply_marks(
    positions,
    event_kind,
    event_particle,
    event_index,
    internal_maps,
    voter_targets,
    voter_fields,
):
    """Replay a mark realization over an initial configuration in place.

    Events arrive pre-merged in time order.  Kind 0 is an internal jump:
    the particle's site is pushed through its sampled full map.  Kind 1 is
    a neighbor-copy attempt: it fires only where the sampled indicator
    field is set at the particle's current site.
    """
    for e in range(len(event_kind)):
        i = event_particle[e]
        idx = event_index[e]
        if event_kind[e] == 0:
            positions[i] = internal_maps[idx, positions[i]]
        else:
            if voter_fields[idx, positions[i]]:
                positions[i] = positions[voter_targets[idx]]
    return positions


def influence_matrix_kernel(
    roots, n_particles, voter_times, voter_particle, voter_targets, t_start, out
):
    """Membership matrix of backward influence sets.

    out is a (len(roots), n_particles) boolean matrix; row r collects the
    labels whose initial coordinate can affect particle roots[r] at the
    horizon.  Voter arrays are sorted by time ascending; the scan walks
    them backward and, whenever a current member has a copy attempt, adds
    the copied label, whether or not the attempt fires at runtime.  Events
    before t_start are ignored.
    """
    n_events = len(voter_times)
    for r in range(len(roots)):
        for k in range(n_particles):
            out[r, k] = False
        out[r, roots[r]] = True
        for e in range(n_events - 1, -1, -1):
            if voter_times[e] < t_start:
                break
            if out[r, voter_particle[e]]:
                out[r, voter_targets[e]] = True
    return out


# Helpers must be wrapped before the kernels that call them so the jitted
# kernels resolve jitted callees at compile time.
_pick_particle = _jit(_pick_particle)
_pick_move = _jit(_pick_move)
run_events = _jit(run_events)
run_recorded = _jit(run_recorded)
apply_marks = _jit(apply_marks)
influence_matrix_kernel = _jit(influence_matrix_kernel)
