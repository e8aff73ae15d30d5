import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Literal

from ppcurve.copulas.models import CopulaModel, Product
from ppcurve.empirical.data import SampleMode
from ppcurve.errors import DomainError
from ppcurve.limit.sampler import LimitSpec
from ppcurve.margins.curve import PPCurve
from ppcurve.margins.models import MarginModel, Uniform

type ExperimentName = Literal[
    "convergence",
    "bootstrap",
    "divergence",
    "dkw",
    "inequality",
    "limit",
]

DEFAULT_N_LIST = (256, 1024, 4096)
MIN_REPLICATES = 100


@dataclass(frozen=True)
class Tolerances:
    """Pass thresholds; every report echoes them next to the numbers they judge."""

    ks_convergence: float = 0.06
    ks_bootstrap: float = 0.08
    sigma_band: float = 3.0
    monotone_slack: float = 0.01
    growth_slack: float = 0.10
    divergence_ratio: float = 3.0
    inequality_band: float = 2.0
    degenerate_limit: float = 1e-6
    degenerate_bootstrap: float = 0.05

    def to_dict(self) -> dict[str, float]:
        return asdict(self)


@dataclass(frozen=True)
class ExperimentConfig:
    """Parameters of a Monte Carlo experiment.

    ``rho`` selects the two-sample mode: the X sample has m(n) = round(n (1 - rho) / rho) points and the
    limit law scales the first bridge by kappa = sqrt(rho / (1 - rho)). ``rho=None`` means paired data.
    """

    f_model: MarginModel = field(default_factory=Uniform)
    g_model: MarginModel = field(default_factory=Uniform)
    copula: CopulaModel = field(default_factory=Product)
    n_list: tuple[int, ...] = DEFAULT_N_LIST
    rho: float | None = None
    replicates: int = 2000
    bootstrap_b: int = 2000
    grid_size: int = 512
    shift: float = 1.0 / 64.0
    limit_draws: int = 20000
    master_seed: int = 0
    threads: int | None = None
    output: Path | None = None
    tolerances: Tolerances = field(default_factory=Tolerances)

    def __post_init__(self) -> None:
        object.__setattr__(self, "n_list", tuple(int(n) for n in self.n_list))

        if not self.n_list or any(n < 1 for n in self.n_list):
            raise DomainError(f"n_list needs positive sample sizes, got {self.n_list}")
        if any(b <= a for a, b in zip(self.n_list, self.n_list[1:])):
            raise DomainError(f"n_list must be strictly ascending, got {self.n_list}")
        if self.replicates < MIN_REPLICATES:
            raise DomainError(f"Need at least {MIN_REPLICATES} replicates, got {self.replicates}")
        if self.bootstrap_b < 1:
            raise DomainError(f"Bootstrap B must be positive, got {self.bootstrap_b}")
        if self.grid_size < 2:
            raise DomainError(f"Grid needs J >= 2, got {self.grid_size}")
        if self.limit_draws < 1:
            raise DomainError(f"Limit draws must be positive, got {self.limit_draws}")
        if self.master_seed < 0 or self.master_seed >= 2**64:
            raise DomainError(f"Seed must be a 64-bit unsigned integer, got {self.master_seed}")

        steps = self.shift * self.grid_size
        if not 0.0 < self.shift < 1.0 or abs(steps - round(steps)) > 1e-9:
            raise DomainError(f"Shift h={self.shift} is not a multiple of the grid spacing 1/{self.grid_size}")

        if self.rho is not None:
            if not 0.0 < self.rho < 1.0:
                raise DomainError(f"Two-sample ratio rho must lie in (0, 1), got {self.rho}")
            if not isinstance(self.copula, Product):
                raise DomainError(f"Independent samples are coupled by the product copula, got {self.copula}")

    @property
    def mode(self) -> SampleMode:
        return "paired" if self.rho is None else "independent"

    @property
    def kappa(self) -> float:
        if self.rho is None:
            return 1.0
        return math.sqrt(self.rho / (1.0 - self.rho))

    def m_for(self, n: int) -> int | None:
        """X sample size paired with a Y sample of size ``n``; None in paired mode."""
        if self.rho is None:
            return None
        return max(1, round(n * (1.0 - self.rho) / self.rho))

    def curve(self) -> PPCurve:
        return PPCurve(self.f_model, self.g_model)

    def limit_spec(self, curve: PPCurve | None = None) -> LimitSpec:
        return LimitSpec(
            curve=curve or self.curve(),
            copula=self.copula,
            kappa=self.kappa,
            grid_size=self.grid_size,
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "fx": self.f_model.spec,
            "gy": self.g_model.spec,
            "copula": self.copula.spec,
            "mode": self.mode,
            "rho": self.rho,
            "kappa": self.kappa,
            "n_list": list(self.n_list),
            "m_list": [self.m_for(n) for n in self.n_list],
            "replicates": self.replicates,
            "bootstrap_b": self.bootstrap_b,
            "grid_size": self.grid_size,
            "shift": self.shift,
            "limit_draws": self.limit_draws,
            "seed": self.master_seed,
        }
