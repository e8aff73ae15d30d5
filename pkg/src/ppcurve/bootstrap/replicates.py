"""Bootstrap P-P plots and replicate distributions.

Paired data are resampled as pairs: one weight vector enters both F_n* and G_n*. Independent samples
get one weight vector each. Replicate b draws its weights from substream ``b`` of the given factory,
so the replicate array does not depend on the worker count.
"""

import logging
import math
from typing import Callable

import numpy as np

from ppcurve.bootstrap.weights import BootstrapWeights, FloatArray, draw_multinomial_weights, weighted_cdf_eval
from ppcurve.empirical.data import SampleData
from ppcurve.empirical.steps import StepFunction
from ppcurve.errors import DomainError
from ppcurve.functionals.distances import Curve, l1_step_vs_curve, l1_step_vs_step
from ppcurve.parallel import ReplicatePool
from ppcurve.rng import SubstreamFactory

logger = logging.getLogger(__name__)

type BootstrapStatistic = Callable[[StepFunction, StepFunction], float]
type WeightsHook = Callable[[int], tuple[BootstrapWeights, BootstrapWeights]]


def bootstrap_pp_plot(
    x_values: FloatArray,
    y_values: FloatArray,
    wx: BootstrapWeights,
    wy: BootstrapWeights,
) -> StepFunction:
    """R_n* = F_n* o Q_n*, with (lo, hi] cells.

    Q_n* steps through the y values carrying positive weight in ascending order; the cell of the
    k-th such value ends at the cumulative weight share G_n*(Y_(k)).
    """
    x_values = np.asarray(x_values, dtype=np.float64)
    y_values = np.asarray(y_values, dtype=np.float64)
    if x_values.shape != wx.counts.shape or y_values.shape != wy.counts.shape:
        raise DomainError(
            f"Weight lengths ({wx.n}, {wy.n}) do not match sample lengths ({x_values.size}, {y_values.size})"
        )

    order = np.argsort(y_values, kind="stable")
    y_sorted = y_values[order]
    counts = wy.counts[order]
    kept = counts > 0

    breakpoints = np.cumsum(counts[kept]) / wy.n
    values = weighted_cdf_eval(x_values, wx, y_sorted[kept])
    return StepFunction(breakpoints, values, closed="right")


def l1_to_plot(boot_plot: StepFunction, plot: StepFunction) -> float:
    return l1_step_vs_step(boot_plot, plot)


def l1_to_curve(curve: Curve) -> BootstrapStatistic:
    def _statistic(boot_plot: StepFunction, plot: StepFunction) -> float:
        return l1_step_vs_curve(boot_plot, curve)

    return _statistic


def draw_replicate_weights(data: SampleData, rng: np.random.Generator) -> tuple[BootstrapWeights, BootstrapWeights]:
    wx = draw_multinomial_weights(data.m, rng)
    if data.is_paired:
        return wx, wx
    return wx, draw_multinomial_weights(data.n, rng)


def bootstrap_replicates(
    data: SampleData,
    replicates: int,
    statistic: BootstrapStatistic,
    streams: SubstreamFactory,
    *,
    weights_hook: WeightsHook | None = None,
    threads: int | None = None,
) -> FloatArray:
    """sqrt(n) * statistic(R_n*, R_n) for ``replicates`` fresh weight draws, in replicate order.

    Parameters:
     - weights_hook : replaces the random weights of replicate ``b`` with ``weights_hook(b)``
    """
    if replicates < 1:
        raise DomainError(f"Bootstrap needs at least one replicate, got {replicates}")

    plot = data.pp_plot()
    scale = math.sqrt(data.n)

    def _replicate(index: int) -> float:
        if weights_hook is not None:
            wx, wy = weights_hook(index)
        else:
            wx, wy = draw_replicate_weights(data, streams.stream(index))
        return scale * statistic(bootstrap_pp_plot(data.x, data.y, wx, wy), plot)

    with ReplicatePool.create(threads) as pool:
        values = pool.map(_replicate, range(replicates))

    logger.debug("Drew %d bootstrap replicates for %r", replicates, data)
    return np.asarray(values, dtype=np.float64)
