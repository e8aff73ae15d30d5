"""Bootstrap test of H0: F = G for continuous margins.

T = sqrt(n) ||R_n - I||_1 is compared with the bootstrap law of T* = sqrt(n) ||R_n* - R_n||_1, and
p = (1 + #{T* >= T}) / (B + 1).
"""

import logging
import math
from typing import NamedTuple

import numpy as np

from ppcurve.bootstrap.replicates import bootstrap_replicates, l1_to_plot
from ppcurve.empirical.data import SampleData, draw_sample_data
from ppcurve.errors import DataError, DomainError
from ppcurve.experiments.config import ExperimentConfig
from ppcurve.functionals.distances import l1_step_vs_curve
from ppcurve.margins.curve import PPCurve
from ppcurve.rng import SubstreamFactory

logger = logging.getLogger(__name__)

MIN_SAMPLE_SIZE = 20
MIN_REPLICATES = 200


class EqualityTestResult(NamedTuple):
    statistic: float
    p_value: float
    n: int
    replicates: int


class CalibrationResult(NamedTuple):
    rejection_rate: float
    rejections: int
    datasets: int
    level: float


def equality_statistic(data: SampleData) -> float:
    return math.sqrt(data.n) * l1_step_vs_curve(data.pp_plot(), PPCurve.identity())


def _check_data(data: SampleData, replicates: int) -> None:
    if min(data.m, data.n) < MIN_SAMPLE_SIZE:
        raise DomainError(f"Equality test needs at least {MIN_SAMPLE_SIZE} observations per sample, got {data!r}")
    if replicates < MIN_REPLICATES:
        raise DomainError(f"Equality test needs B >= {MIN_REPLICATES}, got {replicates}")
    for name, column in (("x", data.x), ("y", data.y)):
        if np.ptp(column) == 0.0:
            raise DataError(f"Column {name} is constant")


def _equality_test(
    data: SampleData,
    replicates: int,
    streams: SubstreamFactory,
    threads: int | None = None,
) -> EqualityTestResult:
    statistic = equality_statistic(data)
    values = bootstrap_replicates(data, replicates, l1_to_plot, streams, threads=threads)
    exceed = int(np.count_nonzero(values >= statistic))
    p_value = (1 + exceed) / (replicates + 1)
    return EqualityTestResult(statistic=statistic, p_value=p_value, n=data.n, replicates=replicates)


def run_equality_test(
    data: SampleData,
    replicates: int,
    seed: int,
    *,
    threads: int | None = None,
) -> EqualityTestResult:
    _check_data(data, replicates)
    result = _equality_test(data, replicates, SubstreamFactory(seed, "equality"), threads)
    logger.info("Equality test on %r: T=%.6f p=%.6f", data, result.statistic, result.p_value)
    return result


def run_equality_calibration(
    config: ExperimentConfig,
    datasets: int = 500,
    level: float = 0.05,
    replicates: int | None = None,
) -> CalibrationResult:
    """Rejection rate of the equality test at ``level`` over datasets simulated from ``config``.

    Uses the largest size in ``config.n_list``; the rate estimates the size under F = G and the power
    otherwise.
    """
    if datasets < 1:
        raise DomainError(f"Need at least one dataset, got {datasets}")
    if not 0.0 < level < 1.0:
        raise DomainError(f"Level must lie in (0, 1), got {level}")

    replicates = replicates or config.bootstrap_b
    n = config.n_list[-1]
    m = config.m_for(n)
    streams = SubstreamFactory(config.master_seed, "equality-calibration")

    rejections = 0
    for index in range(datasets):
        data = draw_sample_data(config.f_model, config.g_model, config.copula, n, streams.stream(n, index), m=m)
        _check_data(data, replicates)
        result = _equality_test(data, replicates, streams.child(f"dataset/{index}"), config.threads)
        rejections += result.p_value <= level

    rate = rejections / datasets
    logger.info("Equality test rejected %d of %d datasets at level %s", rejections, datasets, level)
    return CalibrationResult(rejection_rate=rate, rejections=rejections, datasets=datasets, level=level)
