"""Grid simulation of the Gaussian limit of the P-P process.

The limit is kappa * B1(R(u)) - r(u) * B2(u), where B1 = B(., 1) and B2 = B(1, .) are the edges of
the tied-down Brownian sheet of the copula. On the midpoint grid u_1..u_J the pair
(B1(R(u_j)), B2(u_j)) is a 2J-dimensional centred Gaussian vector. Its covariance has bridge
blocks s ^ s' - ss' and the cross block C(R(u_j), u_k) - R(u_j) u_k.
"""

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg
from scipy.linalg import lapack

from ppcurve.copulas.models import CopulaModel, Product
from ppcurve.errors import DomainError, InvalidStateError, NumericError
from ppcurve.functionals.distances import GridFunction, midpoint_grid
from ppcurve.margins.curve import PPCurve

logger = logging.getLogger(__name__)

type FloatArray = np.ndarray

DEFAULT_GRID_SIZE = 512
EIGENVALUE_FLOOR = -1e-9
RESIDUAL_TOLERANCE = 1e-8
INITIAL_JITTER = 1e-12
MAX_JITTER = 1e-8
NORM_CHUNK = 1024


@dataclass(frozen=True)
class LimitSpec:
    curve: PPCurve
    copula: CopulaModel = field(default_factory=Product)
    kappa: float = 1.0
    grid_size: int = DEFAULT_GRID_SIZE

    def __post_init__(self) -> None:
        if not (math.isfinite(self.kappa) and self.kappa >= 0):
            raise DomainError(f"kappa must be a nonnegative number, got {self.kappa}")
        if self.grid_size < 2:
            raise DomainError(f"Grid needs J >= 2, got {self.grid_size}")
        if self.kappa != 1.0 and not isinstance(self.copula, Product):
            raise DomainError(f"Two-sample limits (kappa={self.kappa}) need the product copula, got {self.copula}")
        if not self.curve.is_absolutely_continuous:
            raise InvalidStateError(
                f"The limit process needs an absolutely continuous P-P curve, "
                f"got {self.curve.ac_class} for {self.curve!r}"
            )


@dataclass(frozen=True, eq=False)
class LimitSampler:
    spec: LimitSpec
    grid: FloatArray
    covariance: FloatArray
    factor: FloatArray
    r: FloatArray
    path_variance: FloatArray
    rank: int
    jitter: float

    def __repr__(self) -> str:
        return f"<LimitSampler (J={self.size}, kappa={self.kappa}, rank={self.rank}, jitter={self.jitter})>"

    @property
    def size(self) -> int:
        return self.grid.size

    @property
    def kappa(self) -> float:
        return self.spec.kappa

    def curve_increments(self) -> FloatArray:
        """R(u_j + 1/(2J)) - R(u_j - 1/(2J)), the mass dR puts on each grid cell."""
        edges = np.arange(self.size + 1, dtype=np.float64) / self.size
        return np.diff(self.spec.curve(edges))


def _bridge_block(s: FloatArray, t: FloatArray) -> FloatArray:
    return np.minimum.outer(s, t) - np.multiply.outer(s, t)


def assemble_covariance(spec: LimitSpec, grid: FloatArray) -> FloatArray:
    s = spec.curve(grid)
    cross = spec.copula.cdf(s[:, None], grid[None, :]) - np.multiply.outer(s, grid)
    return np.block(
        [
            [_bridge_block(s, s), cross],
            [cross.T, _bridge_block(grid, grid)],
        ]
    )


def _pivoted_factor(covariance: FloatArray) -> tuple[FloatArray, int] | None:
    c, piv, rank, info = lapack.dpstrf(covariance, lower=1)
    if info < 0:
        return None

    factor = np.zeros_like(covariance)
    factor[piv - 1, :rank] = np.tril(c)[:, :rank]
    return factor, int(rank)


def _residual(covariance: FloatArray, factor: FloatArray) -> float:
    return float(np.max(np.abs(factor @ factor.T - covariance)))


def factor_covariance(covariance: FloatArray) -> tuple[FloatArray, int, float]:
    """Return (L, rank, jitter) with L L^T = covariance + jitter * I up to ``RESIDUAL_TOLERANCE``.

    Pivoted Cholesky handles the rank-deficient kernels exactly. If its factor misses the residual
    check, plain Cholesky is retried with ridge jitter from 1e-12 up to 1e-8.
    """
    if not np.allclose(covariance, covariance.T, rtol=0.0, atol=1e-15):
        raise NumericError("Covariance matrix is not symmetric")

    smallest = float(np.linalg.eigvalsh(covariance)[0])
    if smallest < EIGENVALUE_FLOOR:
        raise NumericError(f"Covariance matrix is not positive semidefinite: smallest eigenvalue {smallest:.3e}")

    pivoted = _pivoted_factor(covariance)
    if pivoted is not None and _residual(covariance, pivoted[0]) <= RESIDUAL_TOLERANCE:
        return pivoted[0], pivoted[1], 0.0

    identity = np.eye(covariance.shape[0])
    jitter = INITIAL_JITTER
    while jitter <= MAX_JITTER * (1.0 + 1e-9):
        try:
            factor = linalg.cholesky(covariance + jitter * identity, lower=True)
        except linalg.LinAlgError:
            logger.debug("Cholesky failed with jitter %.0e", jitter)
        else:
            if _residual(covariance, factor) <= RESIDUAL_TOLERANCE + jitter:
                logger.warning("Covariance factored with ridge jitter %.0e", jitter)
                return factor, covariance.shape[0], jitter
        jitter *= 10.0

    raise NumericError(f"Cholesky factorisation failed up to jitter {MAX_JITTER:.0e}")


def build_limit_sampler(spec: LimitSpec) -> LimitSampler:
    grid = midpoint_grid(spec.grid_size)
    r = np.asarray(spec.curve.density(grid), dtype=np.float64)
    if not np.all(np.isfinite(r)):
        bad = grid[~np.isfinite(r)]
        raise NumericError(f"Density r is not finite at {bad.size} grid points (first at u={bad[0]!r})")

    covariance = assemble_covariance(spec, grid)
    factor, rank, jitter = factor_covariance(covariance)

    j = spec.grid_size
    diag = np.diagonal(covariance)
    cross_diag = np.diagonal(covariance[:j, j:])
    path_variance = spec.kappa**2 * diag[:j] + r**2 * diag[j:] - 2.0 * spec.kappa * r * cross_diag

    logger.debug("Built limit sampler for %r: J=%d, rank=%d, jitter=%.0e", spec.curve, j, rank, jitter)
    return LimitSampler(
        spec=spec,
        grid=grid,
        covariance=covariance,
        factor=factor,
        r=r,
        path_variance=np.maximum(path_variance, 0.0),
        rank=rank,
        jitter=jitter,
    )


def draw_bridges(
    sampler: LimitSampler,
    rng: np.random.Generator | None = None,
    size: int | None = None,
    *,
    normals: FloatArray | None = None,
) -> tuple[FloatArray, FloatArray]:
    """(B1(R(u_j)), B2(u_j)) on the grid, one row per draw when ``size`` is given.

    Parameters:
     - normals : standard normals of shape (2J,) or (size, 2J) to use instead of drawing from ``rng``
    """
    if normals is None:
        if rng is None:
            raise DomainError("draw_bridges needs an rng or explicit normals")
        shape = (2 * sampler.size,) if size is None else (size, 2 * sampler.size)
        normals = rng.standard_normal(shape)

    normals = np.asarray(normals, dtype=np.float64)
    if normals.shape[-1] != 2 * sampler.size:
        raise DomainError(f"Expected {2 * sampler.size} normals per draw, got {normals.shape[-1]}")

    values = normals @ sampler.factor.T
    return values[..., : sampler.size], values[..., sampler.size :]


def limit_paths(sampler: LimitSampler, b1: FloatArray, b2: FloatArray) -> FloatArray:
    return sampler.kappa * b1 - sampler.r * b2


def simulate_limit_path(
    sampler: LimitSampler,
    rng: np.random.Generator | None = None,
    *,
    normals: FloatArray | None = None,
) -> GridFunction:
    b1, b2 = draw_bridges(sampler, rng, normals=normals)
    return GridFunction(limit_paths(sampler, b1, b2))


def limit_norm_samples(sampler: LimitSampler, draws: int, rng: np.random.Generator) -> FloatArray:
    """Midpoint-rule L1 norms of ``draws`` independent limit paths."""
    if draws < 1:
        raise DomainError(f"Need at least one draw, got {draws}")

    norms = np.empty(draws)
    for start in range(0, draws, NORM_CHUNK):
        count = min(NORM_CHUNK, draws - start)
        b1, b2 = draw_bridges(sampler, rng, count)
        norms[start : start + count] = np.mean(np.abs(limit_paths(sampler, b1, b2)), axis=1)

    return norms


def expected_limit_norm(sampler: LimitSampler) -> float:
    """E of the L1 norm of the limit path: the grid mean of sqrt(2/pi) * sd(path(u_j))."""
    return float(np.mean(math.sqrt(2.0 / math.pi) * np.sqrt(sampler.path_variance)))
