"""Univariate margin models.

The catalog is closed: uniform, normal, exponential, finitely many atoms, and one atom mixed with a
uniform. Every model is an immutable value object that evaluates its cdf, left cdf limit, quantile
function and (for the continuous families) its density on scalars or numpy arrays.

The quantile function is the left-continuous generalised inverse ``Q(u) = inf{x : F(x) >= u}``.

Spec strings (CLI and report echo)::

    uniform:A,B        normal:MU,SIGMA        exponential:RATE
    atoms:X1=P1,X2=P2,...                    atomunif:POINT,MASS,A,B

To add a family: subclass ``MarginModel``, implement the abstract methods and register a parser in
``_MARGIN_FAMILIES_MAP``.
"""

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Callable, ClassVar, Literal, NamedTuple, TypedDict

import numpy as np
from scipy import stats

from ppcurve.errors import DomainError

type FloatArray = np.ndarray
type ArrayLike = float | FloatArray | list[float]
type MarginFamily = Literal["uniform", "normal", "exponential", "atoms", "atomunif"]
type PieceKind = Literal["flat", "increasing"]


class QuantilePiece(NamedTuple):
    """A stretch of the quantile function: constant at ``lo == hi`` or strictly increasing over ``(lo, hi)``."""

    kind: PieceKind
    lo: float
    hi: float


def _as_array(x: ArrayLike) -> FloatArray:
    return np.asarray(x, dtype=np.float64)


def _check_unit_open(u: FloatArray) -> None:
    if not np.all((u > 0.0) & (u < 1.0)):
        raise DomainError("Quantile function is defined on (0, 1) only")


def _fmt(value: float) -> str:
    return repr(float(value))


@dataclass(frozen=True)
class MarginModel(ABC):
    family: ClassVar[MarginFamily]

    @abstractmethod
    def cdf(self, x: ArrayLike) -> FloatArray:
        """P(X <= x)."""

    @abstractmethod
    def cdf_left(self, x: ArrayLike) -> FloatArray:
        """P(X < x)."""

    @abstractmethod
    def _qf(self, u: FloatArray) -> FloatArray: ...

    def qf(self, u: ArrayLike) -> FloatArray:
        """inf{x : F(x) >= u} for u in (0, 1)."""
        u = _as_array(u)
        _check_unit_open(u)
        return self._qf(u)

    def pdf(self, x: ArrayLike) -> FloatArray:
        raise DomainError(f"Margin {self.spec} has no density")

    @property
    def has_density(self) -> bool:
        return False

    @property
    @abstractmethod
    def atoms(self) -> tuple[float, ...]: ...

    @property
    @abstractmethod
    def support(self) -> tuple[float, float]:
        """Closure of the support as (lowest point, highest point); infinite ends allowed."""

    @abstractmethod
    def quantile_pieces(self) -> tuple[QuantilePiece, ...]:
        """Decomposition of Q over (0, 1) into flat and strictly increasing stretches, in u order."""

    @property
    @abstractmethod
    def spec(self) -> str: ...

    def __str__(self) -> str:
        return self.spec


@dataclass(frozen=True)
class Uniform(MarginModel):
    a: float = 0.0
    b: float = 1.0

    family: ClassVar[MarginFamily] = "uniform"

    def __post_init__(self) -> None:
        if not (math.isfinite(self.a) and math.isfinite(self.b) and self.b > self.a):
            raise DomainError(f"Uniform margin needs finite a < b, got a={self.a}, b={self.b}")

    def cdf(self, x: ArrayLike) -> FloatArray:
        return np.clip((_as_array(x) - self.a) / (self.b - self.a), 0.0, 1.0)

    def cdf_left(self, x: ArrayLike) -> FloatArray:
        return self.cdf(x)

    def _qf(self, u: FloatArray) -> FloatArray:
        return self.a + u * (self.b - self.a)

    def pdf(self, x: ArrayLike) -> FloatArray:
        x = _as_array(x)
        return np.where((x >= self.a) & (x <= self.b), 1.0 / (self.b - self.a), 0.0)

    @property
    def has_density(self) -> bool:
        return True

    @property
    def atoms(self) -> tuple[float, ...]:
        return ()

    @property
    def support(self) -> tuple[float, float]:
        return self.a, self.b

    def quantile_pieces(self) -> tuple[QuantilePiece, ...]:
        return (QuantilePiece("increasing", self.a, self.b),)

    @property
    def spec(self) -> str:
        return f"uniform:{_fmt(self.a)},{_fmt(self.b)}"


@dataclass(frozen=True)
class Normal(MarginModel):
    mu: float = 0.0
    sigma: float = 1.0

    family: ClassVar[MarginFamily] = "normal"

    def __post_init__(self) -> None:
        if not (math.isfinite(self.mu) and math.isfinite(self.sigma) and self.sigma > 0):
            raise DomainError(f"Normal margin needs finite mu and sigma > 0, got mu={self.mu}, sigma={self.sigma}")

    def cdf(self, x: ArrayLike) -> FloatArray:
        return stats.norm.cdf(_as_array(x), loc=self.mu, scale=self.sigma)

    def cdf_left(self, x: ArrayLike) -> FloatArray:
        return self.cdf(x)

    def _qf(self, u: FloatArray) -> FloatArray:
        return stats.norm.ppf(u, loc=self.mu, scale=self.sigma)

    def pdf(self, x: ArrayLike) -> FloatArray:
        return stats.norm.pdf(_as_array(x), loc=self.mu, scale=self.sigma)

    @property
    def has_density(self) -> bool:
        return True

    @property
    def atoms(self) -> tuple[float, ...]:
        return ()

    @property
    def support(self) -> tuple[float, float]:
        return -math.inf, math.inf

    def quantile_pieces(self) -> tuple[QuantilePiece, ...]:
        return (QuantilePiece("increasing", -math.inf, math.inf),)

    @property
    def spec(self) -> str:
        return f"normal:{_fmt(self.mu)},{_fmt(self.sigma)}"


@dataclass(frozen=True)
class Exponential(MarginModel):
    rate: float = 1.0

    family: ClassVar[MarginFamily] = "exponential"

    def __post_init__(self) -> None:
        if not (math.isfinite(self.rate) and self.rate > 0):
            raise DomainError(f"Exponential margin needs rate > 0, got rate={self.rate}")

    def cdf(self, x: ArrayLike) -> FloatArray:
        x = _as_array(x)
        return np.where(x > 0.0, -np.expm1(-self.rate * np.maximum(x, 0.0)), 0.0)

    def cdf_left(self, x: ArrayLike) -> FloatArray:
        return self.cdf(x)

    def _qf(self, u: FloatArray) -> FloatArray:
        return -np.log1p(-u) / self.rate

    def pdf(self, x: ArrayLike) -> FloatArray:
        x = _as_array(x)
        return np.where(x >= 0.0, self.rate * np.exp(-self.rate * np.maximum(x, 0.0)), 0.0)

    @property
    def has_density(self) -> bool:
        return True

    @property
    def atoms(self) -> tuple[float, ...]:
        return ()

    @property
    def support(self) -> tuple[float, float]:
        return 0.0, math.inf

    def quantile_pieces(self) -> tuple[QuantilePiece, ...]:
        return (QuantilePiece("increasing", 0.0, math.inf),)

    @property
    def spec(self) -> str:
        return f"exponential:{_fmt(self.rate)}"


@dataclass(frozen=True)
class DiscreteAtoms(MarginModel):
    points: tuple[float, ...]
    probs: tuple[float, ...]

    family: ClassVar[MarginFamily] = "atoms"

    def __post_init__(self) -> None:
        object.__setattr__(self, "points", tuple(float(p) for p in self.points))
        object.__setattr__(self, "probs", tuple(float(p) for p in self.probs))

        if not self.points or len(self.points) != len(self.probs):
            raise DomainError("Atoms margin needs matching, nonempty points and probs")
        if not all(math.isfinite(p) for p in self.points):
            raise DomainError(f"Atom points must be finite, got {self.points}")
        if any(q <= p for p, q in zip(self.points, self.points[1:])):
            raise DomainError(f"Atom points must be strictly increasing, got {self.points}")
        if any(not p > 0 for p in self.probs):
            raise DomainError(f"Atom probabilities must be positive, got {self.probs}")
        if abs(math.fsum(self.probs) - 1.0) > 1e-12:
            raise DomainError(f"Atom probabilities must sum to 1, got {math.fsum(self.probs)!r}")

    @property
    def _points(self) -> FloatArray:
        return np.asarray(self.points)

    @property
    def _cumulative(self) -> FloatArray:
        cum = np.cumsum(self.probs)
        cum[-1] = 1.0
        return cum

    def _cdf_at_index(self, idx: FloatArray) -> FloatArray:
        padded = np.concatenate(([0.0], self._cumulative))
        return padded[idx]

    def cdf(self, x: ArrayLike) -> FloatArray:
        return self._cdf_at_index(np.searchsorted(self._points, _as_array(x), side="right"))

    def cdf_left(self, x: ArrayLike) -> FloatArray:
        return self._cdf_at_index(np.searchsorted(self._points, _as_array(x), side="left"))

    def _qf(self, u: FloatArray) -> FloatArray:
        idx = np.minimum(np.searchsorted(self._cumulative, u, side="left"), len(self.points) - 1)
        return self._points[idx]

    @property
    def atoms(self) -> tuple[float, ...]:
        return self.points

    @property
    def support(self) -> tuple[float, float]:
        return self.points[0], self.points[-1]

    def quantile_pieces(self) -> tuple[QuantilePiece, ...]:
        return tuple(QuantilePiece("flat", p, p) for p in self.points)

    @property
    def spec(self) -> str:
        return "atoms:" + ",".join(f"{_fmt(x)}={_fmt(p)}" for x, p in zip(self.points, self.probs))


@dataclass(frozen=True)
class MixtureAtomUniform(MarginModel):
    """An atom of mass ``atom_mass`` at ``atom_point``, the remaining mass uniform on [a, b]."""

    atom_point: float
    atom_mass: float
    a: float = 0.0
    b: float = 1.0

    family: ClassVar[MarginFamily] = "atomunif"

    def __post_init__(self) -> None:
        if not math.isfinite(self.atom_point):
            raise DomainError(f"Atom point must be finite, got {self.atom_point}")
        if not 0.0 < self.atom_mass < 1.0:
            raise DomainError(f"Atom mass must lie in (0, 1), got {self.atom_mass}")
        if not (math.isfinite(self.a) and math.isfinite(self.b) and self.b > self.a):
            raise DomainError(f"Uniform part needs finite a < b, got a={self.a}, b={self.b}")

    def _uniform_cdf(self, x: FloatArray) -> FloatArray:
        return np.clip((x - self.a) / (self.b - self.a), 0.0, 1.0)

    def _uniform_qf(self, t: FloatArray) -> FloatArray:
        return self.a + np.clip(t, 0.0, 1.0) * (self.b - self.a)

    def cdf(self, x: ArrayLike) -> FloatArray:
        x = _as_array(x)
        return self.atom_mass * (x >= self.atom_point) + (1.0 - self.atom_mass) * self._uniform_cdf(x)

    def cdf_left(self, x: ArrayLike) -> FloatArray:
        x = _as_array(x)
        return self.atom_mass * (x > self.atom_point) + (1.0 - self.atom_mass) * self._uniform_cdf(x)

    def _qf(self, u: FloatArray) -> FloatArray:
        w = self.atom_mass
        below_atom = float(self.cdf_left(self.atom_point))
        at_atom = float(self.cdf(self.atom_point))

        return np.where(
            u <= below_atom,
            self._uniform_qf(u / (1.0 - w)),
            np.where(u <= at_atom, self.atom_point, self._uniform_qf((u - w) / (1.0 - w))),
        )

    @property
    def atoms(self) -> tuple[float, ...]:
        return (self.atom_point,)

    @property
    def support(self) -> tuple[float, float]:
        return min(self.a, self.atom_point), max(self.b, self.atom_point)

    def quantile_pieces(self) -> tuple[QuantilePiece, ...]:
        p, a, b = self.atom_point, self.a, self.b
        atom = QuantilePiece("flat", p, p)

        if p <= a:
            return atom, QuantilePiece("increasing", a, b)
        if p >= b:
            return QuantilePiece("increasing", a, b), atom
        return QuantilePiece("increasing", a, p), atom, QuantilePiece("increasing", p, b)

    @property
    def spec(self) -> str:
        return f"atomunif:{_fmt(self.atom_point)},{_fmt(self.atom_mass)},{_fmt(self.a)},{_fmt(self.b)}"


def _parse_numbers(raw: str, count: int | None = None) -> list[float]:
    try:
        numbers = [float(it) for it in raw.split(",")] if raw else []
    except ValueError:
        raise DomainError(f"Expected comma-separated numbers, got {raw!r}")

    if count is not None and len(numbers) != count:
        raise DomainError(f"Expected {count} numbers, got {len(numbers)} in {raw!r}")

    return numbers


def _parse_atoms(raw: str) -> DiscreteAtoms:
    points, probs = [], []
    for item in raw.split(","):
        if len(pair := [it.strip() for it in item.split("=")]) != 2:
            raise DomainError(f"Expected POINT=PROB, got {item!r}")
        try:
            points.append(float(pair[0]))
            probs.append(float(pair[1]))
        except ValueError:
            raise DomainError(f"Expected numeric POINT=PROB, got {item!r}")

    return DiscreteAtoms(points=tuple(points), probs=tuple(probs))


class MarginFamilyParams(TypedDict):
    model_type: type[MarginModel]
    parse: Callable[[str], MarginModel]


_MARGIN_FAMILIES_MAP: dict[MarginFamily, MarginFamilyParams] = {
    "uniform": {
        "model_type": Uniform,
        "parse": lambda raw: Uniform(*_parse_numbers(raw, 2)),
    },
    "normal": {
        "model_type": Normal,
        "parse": lambda raw: Normal(*_parse_numbers(raw, 2)),
    },
    "exponential": {
        "model_type": Exponential,
        "parse": lambda raw: Exponential(*_parse_numbers(raw, 1)),
    },
    "atoms": {
        "model_type": DiscreteAtoms,
        "parse": _parse_atoms,
    },
    "atomunif": {
        "model_type": MixtureAtomUniform,
        "parse": lambda raw: MixtureAtomUniform(*_parse_numbers(raw, 4)),
    },
}


CATALOG_TYPES: tuple[type[MarginModel], ...] = tuple(it["model_type"] for it in _MARGIN_FAMILIES_MAP.values())


def create_margin(spec: str) -> MarginModel:
    """Parse a margin spec string such as ``normal:0,1`` into a model."""
    family, _, raw = spec.strip().partition(":")
    try:
        family_params = _MARGIN_FAMILIES_MAP[family.strip().lower()]  # type: ignore[index]
    except KeyError:
        raise DomainError(f"Unsupported margin family: {family!r} (in {spec!r})")

    return family_params["parse"](raw.strip())


def _scalar_or_array(value: FloatArray) -> float | FloatArray:
    return float(value) if np.ndim(value) == 0 else value


def margin_cdf(model: MarginModel, x: ArrayLike) -> float | FloatArray:
    return _scalar_or_array(model.cdf(x))


def margin_qf(model: MarginModel, u: ArrayLike) -> float | FloatArray:
    return _scalar_or_array(model.qf(u))


def sample_margin(model: MarginModel, u: ArrayLike) -> float | FloatArray:
    """Inverse-transform sample: the quantile function applied to uniform draws ``u``."""
    return _scalar_or_array(model.qf(u))
