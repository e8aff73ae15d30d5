"""Sorted samples and their empirical cdf and quantile function.

Ties are kept with multiplicity: the empirical cdf counts every copy.
"""

from dataclasses import dataclass

import numpy as np

from ppcurve.errors import DomainError

type FloatArray = np.ndarray
type ArrayLike = float | FloatArray | list[float]

_SPLITTER = 2.0**27 + 1.0


def _split(a: FloatArray) -> tuple[FloatArray, FloatArray]:
    c = _SPLITTER * a
    hi = c - (c - a)
    return hi, a - hi


def exact_ceil_product(n: int, u: FloatArray) -> FloatArray:
    """ceil(n * u) of the exact product, for an integer n < 2**53 and u in (0, 1).

    The rounded product p and its error e satisfy p + e = n * u exactly. A non-integer p has its
    ceiling at least one ulp away, so only an integral p needs the sign of e.
    """
    a = np.full_like(u, float(n))
    p = a * u
    a_hi, a_lo = _split(a)
    u_hi, u_lo = _split(u)
    e = ((a_hi * u_hi - p) + a_hi * u_lo + a_lo * u_hi) + a_lo * u_lo
    ceiling = np.ceil(p)
    return ceiling + ((p == ceiling) & (e > 0.0))


@dataclass(frozen=True, eq=False)
class SortedSample:
    values: FloatArray

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 1 or values.size == 0:
            raise DomainError("Sample must be a nonempty one-dimensional array")
        if np.any(np.diff(values) < 0.0):
            raise DomainError("Sample values must be sorted ascending, use SortedSample.from_values")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_values(cls, values: ArrayLike) -> "SortedSample":
        values = np.asarray(values, dtype=np.float64)
        if not np.all(np.isfinite(values)):
            raise DomainError("Sample values must be finite")
        return cls(np.sort(values, kind="stable"))

    def __repr__(self) -> str:
        return f"<SortedSample (n={self.n})>"

    def __len__(self) -> int:
        return self.n

    @property
    def n(self) -> int:
        return self.values.size

    def cdf(self, x: ArrayLike) -> FloatArray:
        return np.searchsorted(self.values, np.asarray(x, dtype=np.float64), side="right") / self.n

    def qf(self, u: ArrayLike) -> FloatArray:
        """Order statistic number ceil(n u), i.e. inf{y : G_n(y) >= u}, for u in (0, 1)."""
        u = np.asarray(u, dtype=np.float64)
        if not np.all((u > 0.0) & (u < 1.0)):
            raise DomainError("Empirical quantile function is defined on (0, 1) only")

        rank = exact_ceil_product(self.n, u).astype(np.int64)
        return self.values[np.clip(rank, 1, self.n) - 1]


def empirical_cdf_eval(sample: SortedSample, x: ArrayLike) -> float | FloatArray:
    value = sample.cdf(x)
    return float(value) if np.ndim(value) == 0 else value


def empirical_qf_eval(sample: SortedSample, u: ArrayLike) -> float | FloatArray:
    value = sample.qf(u)
    return float(value) if np.ndim(value) == 0 else value

