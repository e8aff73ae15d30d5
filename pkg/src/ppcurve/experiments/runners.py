"""Seeded Monte Carlo experiments.

Every runner derives its random streams from ``config.master_seed`` and its own tag: replicate i at
sample size n uses stream (n, i), limit draws use stream (0,). Replicates are reduced in index
order, so a report does not depend on the number of worker threads.
"""

import logging
import math
import time
from dataclasses import replace
from typing import Any, Callable

import numpy as np

from ppcurve.bootstrap.replicates import WeightsHook, bootstrap_replicates, l1_to_plot
from ppcurve.copulas.models import Product
from ppcurve.empirical.data import SampleData, draw_sample_data
from ppcurve.empirical.plots import empirical_cdf_step
from ppcurve.errors import DomainError, InvalidStateError
from ppcurve.experiments.config import ExperimentConfig, Tolerances
from ppcurve.experiments.reports import ExperimentReport, FloatArray, describe, sample_rows
from ppcurve.functionals.distances import (
    GridFunction,
    ks_distance,
    l1_step_vs_curve,
    midpoint_grid,
    shift_modulus_l1,
    sup_step_vs_curve,
)
from ppcurve.limit.sampler import (
    NORM_CHUNK,
    LimitSampler,
    build_limit_sampler,
    draw_bridges,
    expected_limit_norm,
    limit_norm_samples,
    limit_paths,
)
from ppcurve.margins.curve import PPCurve
from ppcurve.margins.models import Uniform
from ppcurve.parallel import ReplicatePool
from ppcurve.rng import SubstreamFactory, open_uniform

logger = logging.getLogger(__name__)

DKW_BOUND = math.sqrt(math.pi / 2.0)

type DataStatistic = Callable[[SampleData], float]


def _require_ac(curve: PPCurve, experiment: str) -> None:
    if not curve.is_absolutely_continuous:
        raise InvalidStateError(
            f"The {experiment} experiment needs an absolutely continuous P-P curve, got {curve.ac_class} for "
            f"{curve!r}; run the divergence diagnostic (mc-divergence) for this configuration instead"
        )


def _replicate_statistics(
    config: ExperimentConfig,
    streams: SubstreamFactory,
    pool: ReplicatePool,
    n: int,
    statistic: DataStatistic,
) -> FloatArray:
    m = config.m_for(n)

    def _replicate(index: int) -> float:
        rng = streams.stream(n, index)
        data = draw_sample_data(config.f_model, config.g_model, config.copula, n, rng, m=m)
        return statistic(data)

    return np.asarray(pool.map(_replicate, range(config.replicates)), dtype=np.float64)


def compare_to_limit(values: FloatArray, limit: FloatArray, tolerances: Tolerances) -> dict[str, Any]:
    """KS distance to the limit sample, or the gap between means when the limit law sits at 0."""
    if float(np.max(limit)) <= tolerances.degenerate_limit:
        logger.warning("Limit law is degenerate (max norm <= %.0e), comparing means", tolerances.degenerate_limit)
        gap = abs(float(np.mean(values)) - float(np.mean(limit)))
        return {"degenerate_limit": True, "ks": None, "mean_gap": gap, "distance": gap}

    ks = ks_distance(values, limit)
    return {"degenerate_limit": False, "ks": ks, "mean_gap": None, "distance": ks}


def _limit_results(sampler: LimitSampler, limit: FloatArray) -> dict[str, Any]:
    return {
        "expected_limit_mean": expected_limit_norm(sampler),
        "limit": describe(limit),
        "limit_rank": sampler.rank,
        "limit_jitter": sampler.jitter,
    }


def _finish(report: ExperimentReport, started: float) -> ExperimentReport:
    report.wall_clock = time.perf_counter() - started
    logger.info(
        "Finished %s experiment in %.1fs: %s",
        report.experiment,
        report.wall_clock,
        ", ".join(f"{k}={v}" for k, v in report.flags.items()),
    )
    return report


def run_convergence_experiment(config: ExperimentConfig) -> ExperimentReport:
    """Sampling law of sqrt(n) ||R_n - R||_1 against the law of the L1 norm of the limit process."""
    started = time.perf_counter()
    curve = config.curve()
    _require_ac(curve, "convergence")
    logger.info("Starting convergence experiment for %r", curve)

    streams = SubstreamFactory(config.master_seed, "convergence")
    sampler = build_limit_sampler(config.limit_spec(curve))
    limit = limit_norm_samples(sampler, config.limit_draws, streams.stream(0))
    expected = expected_limit_norm(sampler)

    report = ExperimentReport("convergence", config, results=_limit_results(sampler, limit))
    report.samples.extend(sample_rows(0, limit))
    tol = config.tolerances

    with ReplicatePool.create(config.threads) as pool:
        for n in config.n_list:
            scale = math.sqrt(n)
            values = _replicate_statistics(
                config, streams, pool, n, lambda data: scale * l1_step_vs_curve(data.pp_plot(), curve)
            )
            summary = {"n": n, "m": config.m_for(n), **describe(values), **compare_to_limit(values, limit, tol)}
            report.summaries.append(summary)
            report.samples.extend(sample_rows(n, values))
            logger.debug("n=%d: mean=%.5f distance=%.5f", n, summary["mean"], summary["distance"])

    first, final = report.summaries[0], report.summaries[-1]
    distances = [it["distance"] for it in report.summaries]

    if final["degenerate_limit"]:
        mean_ok = final["mean_gap"] <= tol.ks_convergence
    else:
        mean_ok = abs(final["mean"] - expected) <= tol.sigma_band * final["se"]

    report.flags = {
        "distance_within_tolerance": final["distance"] <= tol.ks_convergence,
        "distance_non_increasing": all(b <= a + tol.monotone_slack for a, b in zip(distances, distances[1:])),
        "mean_within_band": bool(mean_ok),
        "p99_bounded": final["p99"] <= (1.0 + tol.growth_slack) * first["p99"],
    }
    return _finish(report, started)


def run_bootstrap_validity_experiment(
    config: ExperimentConfig,
    *,
    sampling: ExperimentReport | None = None,
    weights_hook: WeightsHook | None = None,
) -> ExperimentReport:
    """Bootstrap law of sqrt(n) ||R_n* - R_n||_1 on one dataset per n against the limit law.

    Parameters:
     - sampling : a convergence report for the same configuration; adds the KS distance to its samples
     - weights_hook : fixed bootstrap weights, see ``bootstrap_replicates``
    """
    started = time.perf_counter()
    curve = config.curve()
    _require_ac(curve, "bootstrap validity")
    logger.info("Starting bootstrap validity experiment for %r", curve)

    streams = SubstreamFactory(config.master_seed, "bootstrap")
    sampler = build_limit_sampler(config.limit_spec(curve))
    limit = limit_norm_samples(sampler, config.limit_draws, streams.stream(0))

    report = ExperimentReport("bootstrap", config, results=_limit_results(sampler, limit))
    report.samples.extend(sample_rows(0, limit))
    tol = config.tolerances
    data_streams = streams.child("data")

    for n in config.n_list:
        data = draw_sample_data(
            config.f_model, config.g_model, config.copula, n, data_streams.stream(n), m=config.m_for(n)
        )
        values = bootstrap_replicates(
            data,
            config.bootstrap_b,
            l1_to_plot,
            streams.child(f"replicates/{n}"),
            weights_hook=weights_hook,
            threads=config.threads,
        )
        summary = {"n": n, "m": config.m_for(n), **describe(values), **compare_to_limit(values, limit, tol)}
        summary["max"] = float(np.max(values))
        if sampling is not None and (reference := sampling.samples_for(n)).size:
            summary["ks_to_sampling"] = ks_distance(values, reference)
        report.summaries.append(summary)
        report.samples.extend(sample_rows(n, values))

    final = report.summaries[-1]
    report.flags = {"distance_within_tolerance": final["distance"] <= tol.ks_bootstrap}
    if final["degenerate_limit"]:
        report.flags["concentrated_near_zero"] = final["max"] <= tol.degenerate_bootstrap
    return _finish(report, started)


def _shift_moduli(
    config: ExperimentConfig,
    curve: PPCurve,
    streams: SubstreamFactory,
    pool: ReplicatePool,
    n: int,
) -> FloatArray:
    grid = midpoint_grid(config.grid_size)
    on_grid = curve(grid)
    scale = math.sqrt(n)

    def _modulus(data: SampleData) -> float:
        path = GridFunction(scale * (data.pp_plot()(grid) - on_grid))
        return shift_modulus_l1(path, config.shift)

    return _replicate_statistics(config, streams, pool, n, _modulus)


def reference_config(config: ExperimentConfig) -> ExperimentConfig:
    """Uniform margins under the product copula: an AC configuration with the same sizes and seeds."""
    return replace(config, f_model=Uniform(), g_model=Uniform(), copula=Product())


def run_divergence_diagnostic(config: ExperimentConfig, reference: ExperimentConfig | None = None) -> ExperimentReport:
    """Mean shift modulus of the grid path sqrt(n) (R_n - R) per n, next to an AC reference run.

    Under absolute continuity the modulus stays small; without it a spike of height sqrt(n) keeps
    the modulus from shrinking as n grows.
    """
    started = time.perf_counter()
    curve = config.curve()
    reference = reference or reference_config(config)
    reference_curve = reference.curve()
    logger.info("Starting divergence diagnostic for %r against %r", curve, reference_curve)

    report = ExperimentReport("divergence", config)
    report.results = {"ac_class": curve.ac_class, "reference": reference.to_dict(), "shift": config.shift}
    tol = config.tolerances
    streams = SubstreamFactory(config.master_seed, "divergence")

    with ReplicatePool.create(config.threads) as pool:
        for n in config.n_list:
            values = _shift_moduli(config, curve, streams, pool, n)
            reference_values = _shift_moduli(reference, reference_curve, streams, pool, n)

            mean, reference_mean = float(np.mean(values)), float(np.mean(reference_values))
            summary = {"n": n, "m": config.m_for(n), **describe(values)}
            summary["reference_mean"] = reference_mean
            summary["ratio"] = mean / reference_mean if reference_mean > 0 else None
            report.summaries.append(summary)
            report.samples.extend(sample_rows(n, values))

    final = report.summaries[-1]
    means = [it["mean"] for it in report.summaries]

    if curve.is_absolutely_continuous:
        ratio_ok = final["ratio"] is None or final["ratio"] < tol.divergence_ratio
        report.flags = {"modulus_comparable_to_reference": bool(ratio_ok)}
    else:
        witnessed = final["mean"] > 0 if final["ratio"] is None else final["ratio"] >= tol.divergence_ratio
        report.flags = {
            "divergence_witnessed": bool(witnessed),
            "modulus_not_decreasing": all(b >= (1.0 - tol.growth_slack) * a for a, b in zip(means, means[1:])),
        }
    return _finish(report, started)


def _unit_identity(u: FloatArray) -> FloatArray:
    return np.asarray(u, dtype=np.float64)


def run_dkw_check(config: ExperimentConfig) -> ExperimentReport:
    """Mean of sqrt(n) ||F_n - F||_sup against the DKW moment bound sqrt(pi / 2)."""
    started = time.perf_counter()
    f_model = config.f_model
    if f_model.atoms:
        raise DomainError(f"The DKW check needs a continuous margin, got {f_model}")
    logger.info("Starting DKW check for %s", f_model)

    streams = SubstreamFactory(config.master_seed, "dkw")
    report = ExperimentReport("dkw", config, results={"bound": DKW_BOUND})
    band = config.tolerances.sigma_band

    with ReplicatePool.create(config.threads) as pool:
        for n in config.n_list:
            scale = math.sqrt(n)

            def _statistic(index: int) -> float:
                x = f_model.qf(open_uniform(streams.stream(n, index), n))
                return scale * sup_step_vs_curve(empirical_cdf_step(f_model.cdf(x)), _unit_identity)

            values = np.asarray(pool.map(_statistic, range(config.replicates)), dtype=np.float64)
            summary = {"n": n, **describe(values)}
            summary["below_bound"] = summary["mean"] <= DKW_BOUND + band * summary["se"]
            report.summaries.append(summary)
            report.samples.extend(sample_rows(n, values))

    report.flags = {"mean_below_bound": all(it["below_bound"] for it in report.summaries)}
    return _finish(report, started)


def run_inequality_check(config: ExperimentConfig, a: float = 0.25, b: float = 0.75) -> ExperimentReport:
    """Compare E int_[a,b] |B2| dR with E int_a^b |path| du + sqrt(pi/2) (b - a) on limit draws.

    The samples sidecar holds the per-draw difference of the two integrals.
    """
    if not 0.0 < a < b < 1.0:
        raise DomainError(f"Inequality check needs 0 < a < b < 1, got a={a}, b={b}")

    started = time.perf_counter()
    curve = config.curve()
    _require_ac(curve, "inequality")
    logger.info("Starting inequality check on [%s, %s] for %r", a, b, curve)

    streams = SubstreamFactory(config.master_seed, "inequality")
    sampler = build_limit_sampler(config.limit_spec(curve))
    rng = streams.stream(0)

    inside = (sampler.grid >= a) & (sampler.grid <= b)
    increments = sampler.curve_increments()[inside]
    lhs = np.empty(config.limit_draws)
    rhs = np.empty(config.limit_draws)

    for start in range(0, config.limit_draws, NORM_CHUNK):
        count = min(NORM_CHUNK, config.limit_draws - start)
        b1, b2 = draw_bridges(sampler, rng, count)
        paths = limit_paths(sampler, b1, b2)
        lhs[start : start + count] = np.abs(b2[:, inside]) @ increments
        rhs[start : start + count] = np.sum(np.abs(paths[:, inside]), axis=1) / sampler.size

    constant = DKW_BOUND * (b - a)
    left, right = describe(lhs), describe(rhs)
    combined_se = math.hypot(left["se"], right["se"])
    margin = right["mean"] + constant + config.tolerances.inequality_band * combined_se - left["mean"]

    report = ExperimentReport("inequality", config)
    report.results = {
        "a": a,
        "b": b,
        "grid_points": int(inside.sum()),
        "lhs": left,
        "rhs_integral": right,
        "rhs_constant": constant,
        "combined_se": combined_se,
        "margin": margin,
    }
    report.samples.extend(sample_rows(0, lhs - rhs))
    report.flags = {"inequality_holds": margin >= 0.0}
    return _finish(report, started)


def run_limit_simulation(config: ExperimentConfig) -> ExperimentReport:
    """Draw ``limit_draws`` L1 norms of the limit process for the first configured curve."""
    started = time.perf_counter()
    curve = config.curve()
    _require_ac(curve, "limit simulation")

    streams = SubstreamFactory(config.master_seed, "limit")
    sampler = build_limit_sampler(config.limit_spec(curve))
    limit = limit_norm_samples(sampler, config.limit_draws, streams.stream(0))

    report = ExperimentReport("limit", config, results=_limit_results(sampler, limit))
    report.samples.extend(sample_rows(0, limit))
    return _finish(report, started)
