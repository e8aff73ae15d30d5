from dataclasses import dataclass

import numpy as np

from ppcurve.errors import DomainError

type IntArray = np.ndarray
type FloatArray = np.ndarray


@dataclass(frozen=True, eq=False)
class BootstrapWeights:
    """Efron multinomial counts W_1..W_n; they always sum to n."""

    counts: IntArray

    def __post_init__(self) -> None:
        counts = np.asarray(self.counts)
        if counts.ndim != 1 or counts.size == 0:
            raise DomainError("Bootstrap weights need at least one coordinate")
        if not np.issubdtype(counts.dtype, np.integer):
            if not np.all(counts == np.round(counts)):
                raise DomainError("Bootstrap weights must be integers")
            counts = counts.astype(np.int64)
        if np.any(counts < 0):
            raise DomainError("Bootstrap weights must be nonnegative")
        if int(counts.sum()) != counts.size:
            raise DomainError(f"Bootstrap weights must sum to n={counts.size}, got {int(counts.sum())}")

        counts.setflags(write=False)
        object.__setattr__(self, "counts", counts)

    @classmethod
    def ones(cls, n: int) -> "BootstrapWeights":
        return cls(np.ones(n, dtype=np.int64))

    def __repr__(self) -> str:
        return f"<BootstrapWeights (n={self.n})>"

    def __len__(self) -> int:
        return self.n

    @property
    def n(self) -> int:
        return self.counts.size


def draw_multinomial_weights(n: int, rng: np.random.Generator) -> BootstrapWeights:
    """Multinomial(n; 1/n, ..., 1/n) counts, drawn by numpy's sequential conditional binomials."""
    if n < 1:
        raise DomainError(f"Bootstrap needs n >= 1, got {n}")
    return BootstrapWeights(rng.multinomial(n, np.full(n, 1.0 / n)))


def weighted_cdf_eval(values: FloatArray, weights: BootstrapWeights, x: FloatArray | float) -> FloatArray:
    """F_n*(x) = (1/n) sum_i W_i 1{X_i <= x}."""
    values = np.asarray(values, dtype=np.float64)
    if values.shape != weights.counts.shape:
        raise DomainError(f"Got {weights.n} weights for {values.size} values")

    order = np.argsort(values, kind="stable")
    cumulative = np.concatenate(([0], np.cumsum(weights.counts[order])))
    idx = np.searchsorted(values[order], np.asarray(x, dtype=np.float64), side="right")
    return cumulative[idx] / weights.n
