import numpy as np

from ppcurve.empirical.samples import ArrayLike, SortedSample
from ppcurve.empirical.steps import StepFunction
from ppcurve.errors import DomainError


def build_pp_plot(x_sample: SortedSample, y_sample: SortedSample) -> StepFunction:
    """P-P plot R_n = F_m o Q_n as a step function with (lo, hi] cells.

    Q_n equals the k-th order statistic of the y sample on ((k - 1)/n, k/n], so R_n takes the value
    F_m(Y_(k)) there. Cells with equal values are kept separate.
    """
    n = y_sample.n
    breakpoints = np.arange(1, n + 1, dtype=np.float64) / n
    values = np.searchsorted(x_sample.values, y_sample.values, side="right") / x_sample.n
    return StepFunction(breakpoints, values, closed="right")


def left_continuous_version(step: StepFunction) -> StepFunction:
    """R-bar(u) = sup of R over (0, u), the left-continuous modification of a nondecreasing step."""
    if not step.is_nondecreasing():
        raise DomainError("Left-continuous version needs a nondecreasing step function")
    if step.closed == "right":
        return step
    return step.with_closure("right")


def empirical_cdf_step(sample: ArrayLike) -> StepFunction:
    """Right-continuous empirical cdf of a sample in [0, 1], with [lo, hi) cells.

    The last cell holds F_n(1-), so mass sitting exactly at 1 is not represented.
    """
    values = SortedSample.from_values(sample).values
    if values[0] < 0.0 or values[-1] > 1.0:
        raise DomainError("Empirical cdf step needs a sample in [0, 1]")

    jumps = np.unique(values[(values > 0.0) & (values < 1.0)])
    breakpoints = np.concatenate((jumps, [1.0]))
    lo = np.concatenate(([0.0], jumps))
    cell_values = np.searchsorted(values, lo, side="right") / values.size
    return StepFunction(breakpoints, cell_values, closed="left")
