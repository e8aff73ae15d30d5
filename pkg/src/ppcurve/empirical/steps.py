from dataclasses import dataclass
from typing import Literal, NamedTuple

import numpy as np

from ppcurve.errors import DomainError

type FloatArray = np.ndarray
type ArrayLike = float | FloatArray | list[float]
type StepClosure = Literal["right", "left"]


class Cells(NamedTuple):
    lo: FloatArray
    hi: FloatArray
    values: FloatArray

    @property
    def widths(self) -> FloatArray:
        return self.hi - self.lo


@dataclass(frozen=True, eq=False)
class StepFunction:
    """Piecewise-constant function on [0, 1].

    ``breakpoints`` b_1 < ... < b_K = 1 split [0, 1] into K cells, one value per cell. With
    ``closed="right"`` the cells are (b_{k-1}, b_k] and the value at 0 is the first cell value
    (P-P plots). With ``closed="left"`` the cells are [b_{k-1}, b_k) and the value at 1 is the last
    cell value (empirical cdfs).
    """

    breakpoints: FloatArray
    values: FloatArray
    closed: StepClosure = "right"

    def __post_init__(self) -> None:
        breakpoints = np.asarray(self.breakpoints, dtype=np.float64)
        values = np.asarray(self.values, dtype=np.float64)

        if breakpoints.ndim != 1 or breakpoints.size == 0:
            raise DomainError("Step function needs at least one breakpoint")
        if values.shape != breakpoints.shape:
            raise DomainError(f"Step function needs one value per cell, got {values.size} for {breakpoints.size}")
        if breakpoints[0] <= 0.0 or breakpoints[-1] != 1.0 or np.any(np.diff(breakpoints) <= 0.0):
            raise DomainError("Breakpoints must be strictly increasing in (0, 1] and end at 1")
        if not np.all(np.isfinite(values)):
            raise DomainError("Step function values must be finite")
        if self.closed not in ("right", "left"):
            raise DomainError(f"Unsupported cell closure: {self.closed!r}")

        breakpoints.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, "breakpoints", breakpoints)
        object.__setattr__(self, "values", values)

    def __repr__(self) -> str:
        return f"<StepFunction (cells={self.size}, closed={self.closed!r})>"

    @property
    def size(self) -> int:
        return self.breakpoints.size

    @property
    def cells(self) -> Cells:
        lo = np.concatenate(([0.0], self.breakpoints[:-1]))
        return Cells(lo=lo, hi=self.breakpoints, values=self.values)

    def cell_index(self, u: ArrayLike) -> np.ndarray:
        u = np.asarray(u, dtype=np.float64)
        if np.any((u < 0.0) | (u > 1.0)):
            raise DomainError("Step functions are defined on [0, 1] only")

        if self.closed == "right":
            return np.searchsorted(self.breakpoints, u, side="left")
        return np.minimum(np.searchsorted(self.breakpoints, u, side="right"), self.size - 1)

    def __call__(self, u: ArrayLike) -> FloatArray:
        return self.values[self.cell_index(u)]

    def evaluate(self, u: ArrayLike) -> float | FloatArray:
        values = self(u)
        return float(values) if np.ndim(values) == 0 else values

    def integral(self) -> float:
        return float(np.dot(self.values, self.cells.widths))

    def is_nondecreasing(self) -> bool:
        return bool(np.all(np.diff(self.values) >= 0.0))

    def with_closure(self, closed: StepClosure) -> "StepFunction":
        return StepFunction(self.breakpoints, self.values, closed=closed)
