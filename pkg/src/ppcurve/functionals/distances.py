"""Distances between step functions, curves and statistic samples.

Curves are passed as nondecreasing vectorised callables on [0, 1]; a ``PPCurve`` qualifies.
"""

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from ppcurve.empirical.steps import StepFunction
from ppcurve.errors import DomainError
from ppcurve.functionals.quadrature import adaptive_simpson, bisect_crossing

type FloatArray = np.ndarray
type Curve = Callable[[FloatArray], FloatArray]

L1_TOLERANCE = 1e-9
CROSSING_TOLERANCE = 1e-12
GRID_ALIGN_TOLERANCE = 1e-9


def midpoint_grid(size: int) -> FloatArray:
    """u_j = (j - 1/2) / J for j = 1..J."""
    return (np.arange(size, dtype=np.float64) + 0.5) / size


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Values of a function on the midpoint grid of [0, 1]."""

    values: FloatArray

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 1 or values.size < 2:
            raise DomainError(f"Grid function needs at least 2 grid points, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise DomainError("Grid function values must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_function(cls, func: Curve, size: int) -> "GridFunction":
        return cls(func(midpoint_grid(size)))

    def __repr__(self) -> str:
        return f"<GridFunction (J={self.size})>"

    @property
    def size(self) -> int:
        return self.values.size

    @property
    def grid(self) -> FloatArray:
        return midpoint_grid(self.size)

    def l1_norm(self) -> float:
        return float(np.mean(np.abs(self.values)))


def l1_step_vs_curve(step: StepFunction, curve: Curve, tol: float = L1_TOLERANCE) -> float:
    """Integral of |step - curve| over [0, 1].

    In each cell the curve crosses the cell value at most once, so the cell splits into a piece
    below and a piece above the value, and |step - curve| integrates as a signed integral of the
    curve on each piece. The pieces are integrated by adaptive Simpson to ``tol`` per cell count.
    """
    if not tol > 0:
        raise DomainError(f"Tolerance must be positive, got {tol}")

    lo, hi, level = step.cells
    at_lo = curve(lo)
    at_hi = curve(hi)

    crossing = np.where(at_lo >= level, lo, hi)
    inside = (at_lo < level) & (at_hi > level)
    if np.any(inside):
        crossing[inside] = bisect_crossing(curve, lo[inside], hi[inside], level[inside], xtol=CROSSING_TOLERANCE)

    piece_tol = tol / step.size
    below = adaptive_simpson(curve, lo, crossing, piece_tol)
    above = adaptive_simpson(curve, crossing, hi, piece_tol)

    # |int (c - R)| over the lower piece plus |int (R - c)| over the upper piece
    lower = np.abs(level * (crossing - lo) - below)
    upper = np.abs(above - level * (hi - crossing))
    return float(math.fsum(lower + upper))


def merged_cells(a: StepFunction, b: StepFunction) -> tuple[FloatArray, FloatArray]:
    """Midpoints and widths of the common refinement of two step partitions."""
    edges = np.union1d(a.breakpoints, b.breakpoints)
    lo = np.concatenate(([0.0], edges[:-1]))
    return 0.5 * (lo + edges), edges - lo


def l1_step_vs_step(a: StepFunction, b: StepFunction) -> float:
    mid, widths = merged_cells(a, b)
    return float(math.fsum(np.abs(a(mid) - b(mid)) * widths))


def sup_step_vs_curve(step: StepFunction, curve: Curve) -> float:
    """sup |step - curve| for a nondecreasing curve.

    Inside a cell the sup is reached at the one-sided limits of the curve at the cell ends, taken from
    within the cell. The values at 0 and at the breakpoints are compared separately.
    """
    lo, hi, level = step.cells
    from_right = curve(np.nextafter(lo, 1.0))
    from_left = curve(np.nextafter(hi, 0.0))
    inner = np.concatenate((np.abs(level - from_right), np.abs(level - from_left)))
    points = np.concatenate(([0.0], step.breakpoints))
    return float(max(np.max(inner), np.max(np.abs(step(points) - curve(points)))))


def shift_modulus_l1(g: GridFunction, h: float) -> float:
    """Riemann sum of |g(u + h) - g(u)| over u in [0, 1 - h]; ``h`` must be a multiple of 1/J."""
    steps = h * g.size
    shift = round(steps)
    if not (0.0 < h < 1.0) or abs(steps - shift) > GRID_ALIGN_TOLERANCE or not 1 <= shift < g.size:
        raise DomainError(f"Shift h={h} is not a multiple of the grid spacing 1/{g.size} in (0, 1)")

    return float(np.sum(np.abs(g.values[shift:] - g.values[:-shift])) / g.size)


def ks_distance(a: FloatArray | list[float], b: FloatArray | list[float]) -> float:
    """Sup distance between the empirical cdfs of two samples."""
    a = np.sort(np.asarray(a, dtype=np.float64))
    b = np.sort(np.asarray(b, dtype=np.float64))
    if a.size == 0 or b.size == 0:
        raise DomainError("KS distance needs two nonempty samples")

    points = np.concatenate((a, b))
    cdf_a = np.searchsorted(a, points, side="right") / a.size
    cdf_b = np.searchsorted(b, points, side="right") / b.size
    return float(np.max(np.abs(cdf_a - cdf_b)))
