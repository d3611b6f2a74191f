"""Config-driven command line front end.

Every experiment subcommand reads a JSON config, runs the corresponding
solver or Monte Carlo experiment, and writes three artifacts into the
output directory: results.csv (fixed column set), summary.json (resolved
config echoed back plus results and bound checks), plot.svg.  Exit codes:
0 success, 1 input or runtime error, 2 a scientific bound check failed.
"""
from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from pathlib import Path
from typing import Any

import numpy as np

from . import svgplot
from .chain import AbsorbingChain, inflow_dominance, load_chain, validate_chain
from .errors import ChainValidationError, ConfigError, FvqsdError
from .estimators import (
    convergence_experiment,
    correlation_experiment,
    extreme_profiles,
    qsd_profile_experiment,
    product_moment_experiment,
)
from .graphical import influence_experiment
from .measures import check_distribution, empirical_measure
from .parallel import default_threads, map_replicas
from .seeding import ReplicaSeed
from .semigroup import decay_rate_estimate, qsd
from .simulator import (
    configuration_from_profile,
    simulate_trajectory,
    transition_tables,
)

EXPERIMENT_KINDS = (
    "qsd",
    "semigroup",
    "simulate",
    "correlation",
    "convergence",
    "qsd_profile",
    "overlap",
    "product_moment",
)

CSV_COLUMNS = (
    "experiment", "N", "t", "x", "y", "estimate", "se", "bound",
    "replicas", "seed",
)

_REQUIRED = object()


def _fail(message: str) -> ConfigError:
    return ConfigError(message)


def _param(params: dict, name: str, default: Any = _REQUIRED) -> Any:
    if name in params:
        return params[name]
    if default is _REQUIRED:
        raise _fail(f"parameters.{name} is required")
    return default


def _int_param(params: dict, name: str, default: Any = _REQUIRED,
               minimum: int | None = None) -> int:
    raw = _param(params, name, default)
    if isinstance(raw, bool) or not isinstance(raw, int):
        raise _fail(f"parameters.{name} must be an integer")
    if minimum is not None and raw < minimum:
        raise _fail(f"parameters.{name} must be at least {minimum}")
    return raw


def _float_param(params: dict, name: str, default: Any = _REQUIRED,
                 positive: bool = False, nonnegative: bool = False) -> float:
    raw = _param(params, name, default)
    if isinstance(raw, bool) or not isinstance(raw, (int, float)):
        raise _fail(f"parameters.{name} must be a number")
    value = float(raw)
    if positive and not value > 0.0:
        raise _fail(f"parameters.{name} must be positive")
    if nonnegative and value < 0.0:
        raise _fail(f"parameters.{name} must be nonnegative")
    return value


def _n_list_param(params: dict, name: str = "n_list") -> list[int]:
    raw = _param(params, name)
    if not isinstance(raw, list) or not raw:
        raise _fail(f"parameters.{name} must be a nonempty list of integers")
    out = []
    for v in raw:
        if isinstance(v, bool) or not isinstance(v, int) or v < 2:
            raise _fail(f"parameters.{name} entries must be integers >= 2")
        out.append(v)
    if any(b <= a for a, b in zip(out, out[1:])):
        raise _fail(f"parameters.{name} must be strictly increasing")
    return out


def _profile(spec: Any, chain: AbsorbingChain, where: str) -> np.ndarray:
    """A profile is 'uniform', a site name (point mass), or a weight list."""
    if spec == "uniform":
        return np.full(chain.n, 1.0 / chain.n)
    if isinstance(spec, str):
        try:
            return np.eye(chain.n)[chain.index(spec)]
        except KeyError:
            raise _fail(f"{where}: unknown site {spec!r}") from None
    if isinstance(spec, list):
        try:
            return check_distribution(spec, chain.n)
        except ValueError as exc:
            raise _fail(f"{where}: {exc}") from None
    raise _fail(f"{where} must be 'uniform', a site name, or a weight list")


def _site_param(params: dict, name: str, chain: AbsorbingChain) -> str:
    raw = _param(params, name)
    if not isinstance(raw, str):
        raise _fail(f"parameters.{name} must be a site name")
    try:
        chain.index(raw)
    except KeyError:
        raise _fail(f"parameters.{name}: unknown site {raw!r}") from None
    return raw


def load_config(path: str | os.PathLike) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            cfg = json.load(fh)
        except json.JSONDecodeError as exc:
            raise _fail(
                f"{os.fspath(path)}: invalid JSON at line {exc.lineno}, "
                f"column {exc.colno}: {exc.msg}"
            ) from exc
    if not isinstance(cfg, dict):
        raise _fail("config must be a JSON object")
    return cfg


def _resolve_chain(cfg: dict, config_dir: Path) -> tuple[AbsorbingChain, dict]:
    spec = cfg.get("chain")
    if isinstance(spec, str):
        chain = load_chain(config_dir / spec)
    elif isinstance(spec, dict):
        chain = validate_chain(spec)
    else:
        raise _fail("chain must be a file path or an inline chain object")
    off = chain.rates.copy()
    np.fill_diagonal(off, 0.0)
    echo = {
        "states": list(chain.states),
        "rates": [[float(v) for v in row] for row in off],
        "absorption": [float(v) for v in chain.absorption],
    }
    return chain, echo


class RunContext:
    """Everything a kind handler needs, resolved once."""

    def __init__(self, chain: AbsorbingChain, params: dict, master_seed: int,
                 threads: int):
        self.chain = chain
        self.params = params
        self.master_seed = master_seed
        self.threads = threads

    def seed(self, replica_base: int = 0) -> ReplicaSeed:
        return ReplicaSeed(self.master_seed, replica_base)


def _row(**kw) -> dict:
    row = {c: "" for c in CSV_COLUMNS}
    row.update(kw)
    return row


def _check(name: str, value: float, limit: float) -> dict:
    return {
        "name": name,
        "value": float(value),
        "limit": float(limit),
        "passed": bool(value <= limit),
    }


def _run_qsd(ctx: RunContext):
    tol = _float_param(ctx.params, "tol", 1e-12, positive=True)
    max_iter = _int_param(ctx.params, "max_iter", 10**6, minimum=1)
    sol = qsd(ctx.chain, tol=tol, max_iter=max_iter)
    rows = [
        _row(experiment="qsd", x=state, estimate=float(sol.nu[k]),
             seed=ctx.master_seed)
        for k, state in enumerate(ctx.chain.states)
    ]
    results = {
        "nu": [float(v) for v in sol.nu],
        "alpha": sol.alpha,
        "residual": sol.residual,
        "iterations": sol.iterations,
        "converged": sol.converged,
    }
    plot = svgplot.line_plot(
        np.arange(ctx.chain.n),
        {"nu": sol.nu},
        xlabel="site index",
        ylabel="weight",
        title="quasi-stationary distribution",
    )
    return {"tol": tol, "max_iter": max_iter}, rows, results, [], plot


def _run_semigroup(ctx: RunContext):
    initial = _param(ctx.params, "initial")
    t_grid = _param(ctx.params, "t_grid")
    if (not isinstance(t_grid, list) or len(t_grid) < 4
            or not all(isinstance(v, (int, float)) and not isinstance(v, bool)
                       for v in t_grid)):
        raise _fail("parameters.t_grid must be a list of at least 4 numbers")
    times = np.asarray(t_grid, dtype=np.float64)
    if np.any(np.diff(times) <= 0.0) or times[0] <= 0.0:
        raise _fail("parameters.t_grid must be positive and strictly increasing")
    mu = _profile(initial, ctx.chain, "parameters.initial")
    sol = qsd(ctx.chain)
    fit = decay_rate_estimate(ctx.chain, mu, times, solution=sol)
    sol = sol.with_theta(fit.theta)
    rows = [
        _row(experiment="semigroup", t=float(t), estimate=float(d),
             seed=ctx.master_seed)
        for t, d in zip(fit.times, fit.distances)
    ]
    results = {
        "theta": fit.theta,
        "intercept": fit.intercept,
        "r_squared": fit.r_squared,
        "alpha": sol.alpha,
        "nu": [float(v) for v in sol.nu],
        "distances": [float(d) for d in fit.distances],
    }
    plot = svgplot.line_plot(
        fit.times,
        {"||T_t mu - nu||": fit.distances},
        xlabel="t",
        ylabel="total variation distance",
        title="decay toward the quasi-stationary distribution",
        logy=True,
    )
    resolved = {"initial": initial, "t_grid": [float(v) for v in times]}
    return resolved, rows, results, [], plot


def _run_simulate(ctx: RunContext):
    n_particles = _int_param(ctx.params, "n_particles", minimum=2)
    replicas = _int_param(ctx.params, "replicas", minimum=1)
    initial = _param(ctx.params, "initial", "uniform")
    raw_times = _param(ctx.params, "record_times")
    if not isinstance(raw_times, list) or not raw_times:
        raise _fail("parameters.record_times must be a nonempty list")
    times = np.asarray(raw_times, dtype=np.float64)
    profile = _profile(initial, ctx.chain, "parameters.initial")
    chain = ctx.chain
    xi0 = configuration_from_profile(profile, n_particles, chain.states)
    tables = transition_tables(chain)
    master = ctx.master_seed

    def one(r: int) -> np.ndarray:
        traj = simulate_trajectory(chain, xi0, times, ReplicaSeed(master, r), tables)
        return np.stack([empirical_measure(row, chain.n) for row in traj])

    stacked = np.stack(map_replicas(one, replicas, ctx.threads))
    means = stacked.mean(axis=0)
    if replicas > 1:
        ses = stacked.std(axis=0, ddof=1) / np.sqrt(replicas)
    else:
        ses = np.zeros_like(means)
    rows = []
    for k, t in enumerate(times):
        for s, state in enumerate(chain.states):
            rows.append(_row(
                experiment="simulate", N=n_particles, t=float(t), x=state,
                estimate=float(means[k, s]), se=float(ses[k, s]),
                replicas=replicas, seed=master,
            ))
    results = {
        "mean_profile": {
            state: [float(v) for v in means[:, s]]
            for s, state in enumerate(chain.states)
        },
    }
    plot = svgplot.line_plot(
        times,
        {state: means[:, s] for s, state in enumerate(chain.states)},
        xlabel="t",
        ylabel="mean occupation fraction",
        title=f"mean particle profile, N={n_particles}",
    )
    resolved = {
        "n_particles": n_particles, "replicas": replicas, "initial": initial,
        "record_times": [float(v) for v in times],
    }
    return resolved, rows, results, [], plot


def _run_correlation(ctx: RunContext):
    n_particles = _int_param(ctx.params, "n_particles", minimum=2)
    replicas = _int_param(ctx.params, "replicas", minimum=2)
    t = _float_param(ctx.params, "t", nonnegative=True)
    x = _site_param(ctx.params, "x", ctx.chain)
    y = _site_param(ctx.params, "y", ctx.chain)
    initial = _param(ctx.params, "initial", "uniform")
    bound_override = _param(ctx.params, "bound_override", None)
    if bound_override is not None and not isinstance(bound_override, (int, float)):
        raise _fail("parameters.bound_override must be a number")
    profile = _profile(initial, ctx.chain, "parameters.initial")
    xi0 = configuration_from_profile(profile, n_particles, ctx.chain.states)
    est = correlation_experiment(
        ctx.chain, xi0, t, x, y, replicas, ctx.seed(), ctx.threads
    )
    bound = float(bound_override) if bound_override is not None else est.bound
    rows = [_row(
        experiment="correlation", N=n_particles, t=t, x=x, y=y,
        estimate=est.covariance, se=est.std_error, bound=bound,
        replicas=replicas, seed=ctx.master_seed,
    )]
    checks = [_check(
        "covariance_within_bound",
        abs(est.covariance),
        bound + 3.0 * est.std_error,
    )]
    results = {
        "covariance": est.covariance,
        "std_error": est.std_error,
        "bound": bound,
    }
    plot = svgplot.line_plot(
        np.array([float(n_particles)]),
        {"|covariance|": np.array([abs(est.covariance)]),
         "bound": np.array([bound])},
        xlabel="N",
        ylabel="covariance magnitude",
        title=f"covariance of (m_{x}, m_{y}) at t={t:g}",
    )
    resolved = {
        "n_particles": n_particles, "replicas": replicas, "t": t,
        "x": x, "y": y, "initial": initial,
    }
    if bound_override is not None:
        resolved["bound_override"] = float(bound_override)
    return resolved, rows, checks_to_results(results, checks), checks, plot


def checks_to_results(results: dict, checks: list[dict]) -> dict:
    results = dict(results)
    results["checks_passed"] = all(c["passed"] for c in checks)
    return results


def _run_convergence(ctx: RunContext):
    n_list = _n_list_param(ctx.params)
    t = _float_param(ctx.params, "t", positive=True)
    replicas = _int_param(ctx.params, "replicas", minimum=2)
    raw_profiles = _param(ctx.params, "profiles", None)
    if raw_profiles is None:
        profiles = extreme_profiles(ctx.chain.n)
        resolved_profiles = "extreme"
    else:
        if not isinstance(raw_profiles, list) or not raw_profiles:
            raise _fail("parameters.profiles must be a nonempty list")
        profiles = [
            _profile(p, ctx.chain, f"parameters.profiles[{k}]")
            for k, p in enumerate(raw_profiles)
        ]
        resolved_profiles = raw_profiles
    curve = convergence_experiment(
        ctx.chain, profiles, t, n_list, replicas, ctx.seed(), ctx.threads
    )
    rows = [
        _row(experiment="convergence", N=int(n), t=t, estimate=e, se=s,
             replicas=replicas, seed=ctx.master_seed)
        for n, e, s in curve.entries()
    ]
    results = {
        "n_list": [int(v) for v in curve.n_values],
        "estimates": [float(v) for v in curve.estimates],
        "std_errors": [float(v) for v in curve.std_errors],
    }
    plot = svgplot.line_plot(
        curve.n_values.astype(float),
        {"worst-profile distance": curve.estimates},
        xlabel="N",
        ylabel="E ||m - conditioned law||",
        title=f"profile convergence at t={t:g}",
        logy=bool(np.all(curve.estimates > 0.0)),
    )
    resolved = {
        "n_list": n_list, "t": t, "replicas": replicas,
        "profiles": resolved_profiles,
    }
    return resolved, rows, results, [], plot


def _run_qsd_profile(ctx: RunContext):
    n_list = _n_list_param(ctx.params)
    burn_in = _float_param(ctx.params, "burn_in", positive=True)
    n_samples = _int_param(ctx.params, "n_samples", minimum=40)
    spacing = _float_param(ctx.params, "spacing", positive=True)
    curve = qsd_profile_experiment(
        ctx.chain, n_list, burn_in, n_samples, spacing, ctx.seed()
    )
    rows = [
        _row(experiment="qsd_profile", N=int(n), estimate=e, se=s,
             replicas=n_samples, seed=ctx.master_seed)
        for n, e, s in curve.entries()
    ]
    results = {
        "n_list": [int(v) for v in curve.n_values],
        "estimates": [float(v) for v in curve.estimates],
        "std_errors": [float(v) for v in curve.std_errors],
    }
    plot = svgplot.line_plot(
        curve.n_values.astype(float),
        {"stationary distance": curve.estimates},
        xlabel="N",
        ylabel="mean ||m - nu||",
        title="stationary profile vs quasi-stationary distribution",
        logy=bool(np.all(curve.estimates > 0.0)),
    )
    resolved = {
        "n_list": n_list, "burn_in": burn_in, "n_samples": n_samples,
        "spacing": spacing,
    }
    return resolved, rows, results, [], plot


def _run_product_moment(ctx: RunContext):
    raw_sites = _param(ctx.params, "sites")
    if (not isinstance(raw_sites, list) or not raw_sites
            or not all(isinstance(s, str) for s in raw_sites)):
        raise _fail("parameters.sites must be a nonempty list of site names")
    n_particles = _int_param(ctx.params, "n_particles", minimum=2)
    burn_in = _float_param(ctx.params, "burn_in", positive=True)
    n_samples = _int_param(ctx.params, "n_samples", minimum=40)
    spacing = _float_param(ctx.params, "spacing", positive=True)
    est = product_moment_experiment(
        ctx.chain, list(raw_sites), n_particles, burn_in, n_samples, spacing,
        ctx.seed(),
    )
    x = est.sites[0]
    y = est.sites[1] if len(est.sites) > 1 else ""
    if len(est.sites) > 2:
        x = ",".join(est.sites)
        y = ""
    rows = [_row(
        experiment="product_moment", N=n_particles, x=x, y=y,
        estimate=est.estimate, se=est.std_error, replicas=n_samples,
        seed=ctx.master_seed,
    )]
    results = {
        "estimate": est.estimate,
        "std_error": est.std_error,
        "reference": est.reference,
        "sites": list(est.sites),
    }
    plot = svgplot.line_plot(
        np.array([float(n_particles)]),
        {"product moment": np.array([est.estimate]),
         "reference": np.array([est.reference])},
        xlabel="N",
        ylabel="stationary product moment",
        title="product moment vs quasi-stationary reference",
    )
    resolved = {
        "sites": list(raw_sites), "n_particles": n_particles,
        "burn_in": burn_in, "n_samples": n_samples, "spacing": spacing,
    }
    return resolved, rows, results, [], plot


def _run_overlap(ctx: RunContext):
    if "n_list" in ctx.params:
        n_values = _n_list_param(ctx.params)
    else:
        n_values = [_int_param(ctx.params, "n_particles", minimum=2)]
    if "t_grid" in ctx.params:
        raw = _param(ctx.params, "t_grid")
        if not isinstance(raw, list) or not raw:
            raise _fail("parameters.t_grid must be a nonempty list")
        t_values = [float(v) for v in raw]
    else:
        t_values = [_float_param(ctx.params, "t", nonnegative=True)]
    replicas = _int_param(ctx.params, "replicas", minimum=2)
    rows = []
    checks = []
    cell_results = []
    cell = 0
    for n_particles in n_values:
        for t in t_values:
            size, overlap = influence_experiment(
                ctx.chain, n_particles, t, replicas,
                ctx.seed(cell * replicas), ctx.threads,
            )
            cell += 1
            rows.append(_row(
                experiment="overlap", N=n_particles, t=t,
                estimate=overlap.probability, se=overlap.std_error,
                bound=overlap.bound, replicas=replicas, seed=ctx.master_seed,
            ))
            rows.append(_row(
                experiment="influence_size", N=n_particles, t=t,
                estimate=size.mean_size, se=size.std_error, bound=size.bound,
                replicas=replicas, seed=ctx.master_seed,
            ))
            checks.append(_check(
                f"overlap_within_bound[N={n_particles},t={t:g}]",
                overlap.probability,
                overlap.bound + 3.0 * overlap.std_error,
            ))
            checks.append(_check(
                f"influence_size_within_bound[N={n_particles},t={t:g}]",
                size.mean_size,
                size.bound + 3.0 * size.std_error,
            ))
            cell_results.append({
                "n_particles": n_particles, "t": t,
                "overlap": overlap.probability, "overlap_bound": overlap.bound,
                "overlap_ci": [overlap.ci_low, overlap.ci_high],
                "mean_influence_size": size.mean_size,
                "size_bound": size.bound,
            })
    if len(t_values) > 1 and len(n_values) == 1:
        xs = np.asarray(t_values)
        xlabel = "t"

        def pick(key: str) -> np.ndarray:
            return np.array([c[key] for c in cell_results])
    else:
        xs = np.asarray([float(n) for n in n_values])
        xlabel = "N"

        def pick(key: str) -> np.ndarray:
            return np.array(
                [c[key] for c in cell_results if c["t"] == t_values[0]]
            )
    plot = svgplot.line_plot(
        xs,
        {"overlap frequency": pick("overlap"), "bound": pick("overlap_bound")},
        xlabel=xlabel,
        ylabel="probability",
        title="influence-set overlap vs bound",
    )
    results = {"cells": cell_results}
    resolved = {"replicas": replicas, "n_list": n_values, "t_grid": t_values}
    return resolved, rows, checks_to_results(results, checks), checks, plot


_RUNNERS = {
    "qsd": _run_qsd,
    "semigroup": _run_semigroup,
    "simulate": _run_simulate,
    "correlation": _run_correlation,
    "convergence": _run_convergence,
    "qsd_profile": _run_qsd_profile,
    "product_moment": _run_product_moment,
    "overlap": _run_overlap,
}


def _fmt_cell(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{float(value):.17g}"


def _jsonable(value):
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    return value


def _out_dir(cli_out: str | None, cfg: dict) -> Path:
    if cli_out:
        return Path(cli_out)
    if isinstance(cfg.get("output_dir"), str):
        return Path(cfg["output_dir"])
    env = os.environ.get("FVQSD_OUT")
    if env:
        return Path(env)
    return Path(".")


def run(
    config_path: str | os.PathLike,
    kind: str | None = None,
    out: str | None = None,
    threads: int | None = None,
    seed: int | None = None,
) -> int:
    """Run one experiment config; returns the process exit code."""
    cfg = load_config(config_path)
    known = {"kind", "chain", "master_seed", "output_dir", "parameters"}
    unknown = set(cfg) - known
    if unknown:
        raise _fail(f"unknown config field(s): {sorted(unknown)}")
    cfg_kind = cfg.get("kind")
    if cfg_kind is not None and kind is not None and cfg_kind != kind:
        raise _fail(f"config kind {cfg_kind!r} conflicts with subcommand {kind!r}")
    resolved_kind = kind or cfg_kind
    if resolved_kind not in EXPERIMENT_KINDS:
        raise _fail(f"kind must be one of {EXPERIMENT_KINDS}")

    master_seed = cfg.get("master_seed", 0)
    if isinstance(master_seed, bool) or not isinstance(master_seed, int):
        raise _fail("master_seed must be an integer")
    if seed is not None:
        master_seed = seed
    params = cfg.get("parameters", {})
    if not isinstance(params, dict):
        raise _fail("parameters must be an object")

    chain, chain_echo = _resolve_chain(cfg, Path(os.fspath(config_path)).parent)
    ctx = RunContext(
        chain=chain,
        params=params,
        master_seed=master_seed,
        threads=threads if threads is not None else default_threads(),
    )
    resolved_params, rows, results, checks, plot = _RUNNERS[resolved_kind](ctx)

    out_path = _out_dir(out, cfg)
    out_path.mkdir(parents=True, exist_ok=True)
    with open(out_path / "results.csv", "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for row in rows:
            writer.writerow([_fmt_cell(row[c]) for c in CSV_COLUMNS])
    status = "ok" if all(c["passed"] for c in checks) else "bound_violation"
    summary = {
        "kind": resolved_kind,
        "chain": chain_echo,
        "master_seed": master_seed,
        "parameters": _jsonable(resolved_params),
        "results": _jsonable(results),
        "checks": _jsonable(checks),
        "status": status,
    }
    with open(out_path / "summary.json", "w", encoding="utf-8", newline="\n") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    with open(out_path / "plot.svg", "w", encoding="utf-8", newline="\n") as fh:
        fh.write(plot)
    return 0 if status == "ok" else 2


def _validate_command(chain_path: str) -> int:
    try:
        chain = load_chain(chain_path)
    except (ChainValidationError, OSError) as exc:
        print(f"invalid chain: {exc}", file=sys.stderr)
        return 1
    dom = inflow_dominance(chain)
    print(f"states: {chain.n} ({', '.join(chain.states)})")
    print(f"max absorption rate: {chain.max_absorption_rate:.17g}")
    print(f"max internal jump rate: {chain.max_internal_rate:.17g}")
    print("irreducible on live sites: yes")
    print(
        "guaranteed inflow exceeds max absorption: "
        f"{'yes' if dom.holds else 'no'} "
        f"(inflow {dom.guaranteed_inflow:.17g}, "
        f"absorption {dom.max_absorption:.17g})"
    )
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fvqsd",
        description="Absorbing-chain numerics and particle-system experiments",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for kind in EXPERIMENT_KINDS:
        p = sub.add_parser(kind, help=f"run a {kind} experiment config")
        p.add_argument("--config", required=True, help="experiment config JSON")
        p.add_argument("--out", help="output directory")
        p.add_argument("--threads", type=int, help="worker thread count")
        p.add_argument("--seed", type=int, help="override master_seed")
    v = sub.add_parser("validate", help="validate a chain JSON file")
    v.add_argument("--config", required=True, help="chain JSON to validate")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "validate":
        return _validate_command(args.config)
    try:
        return run(
            args.config,
            kind=args.command,
            out=args.out,
            threads=args.threads,
            seed=args.seed,
        )
    except (ConfigError, ChainValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FvqsdError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entrypoint() -> None:
    sys.exit(main(sys.argv[1:]))
