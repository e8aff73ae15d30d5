"""Bivariate copula models.

Spec strings: ``product``, ``gaussian:RHO``, ``clayton:THETA``, ``comonotone``, ``countermonotone``.

For margins with atoms only the values of the copula on the closure of ran(F) x ran(G) reach the
limit law; the user still picks one explicit copula model.
"""

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Callable, ClassVar, Literal, NamedTuple, TypedDict

import numpy as np
from scipy.special import ndtr, ndtri

from ppcurve.errors import DomainError
from ppcurve.functionals.quadrature import adaptive_gauss_legendre
from ppcurve.rng import open_uniform

type FloatArray = np.ndarray
type ArrayLike = float | FloatArray | list[float]
type CopulaFamily = Literal["product", "gaussian", "clayton", "comonotone", "countermonotone"]

MAX_ABS_RHO = 0.999
BVN_TOLERANCE = 1e-10

_OPEN_LO = 2.0**-54
_OPEN_HI = 1.0 - 2.0**-53


class SheetPoint(NamedTuple):
    u: float
    v: float


def _as_array(x: ArrayLike) -> FloatArray:
    return np.asarray(x, dtype=np.float64)


def _keep_open(x: FloatArray) -> FloatArray:
    return np.clip(x, _OPEN_LO, _OPEN_HI)


@dataclass(frozen=True)
class CopulaModel(ABC):
    family: ClassVar[CopulaFamily]

    @abstractmethod
    def _cdf(self, u: FloatArray, v: FloatArray) -> FloatArray: ...

    def cdf(self, u: ArrayLike, v: ArrayLike) -> FloatArray:
        u, v = np.broadcast_arrays(np.clip(_as_array(u), 0.0, 1.0), np.clip(_as_array(v), 0.0, 1.0))
        return self._cdf(u, v)

    @abstractmethod
    def conditional_inverse(self, u: FloatArray, w: FloatArray) -> FloatArray:
        """V given U = u, driven by an independent uniform ``w`` (inverse of the conditional cdf)."""

    def transform(self, u: ArrayLike, w: ArrayLike) -> tuple[FloatArray, FloatArray]:
        """Map two independent uniforms on (0, 1) to a pair distributed by the copula."""
        u, w = np.broadcast_arrays(_as_array(u), _as_array(w))
        return u, _keep_open(self.conditional_inverse(u, w))

    def sample(self, size: int, rng: np.random.Generator) -> tuple[FloatArray, FloatArray]:
        return self.transform(open_uniform(rng, size), open_uniform(rng, size))

    @property
    @abstractmethod
    def spec(self) -> str: ...

    def __str__(self) -> str:
        return self.spec


@dataclass(frozen=True)
class Product(CopulaModel):
    family: ClassVar[CopulaFamily] = "product"

    def _cdf(self, u: FloatArray, v: FloatArray) -> FloatArray:
        return u * v

    def conditional_inverse(self, u: FloatArray, w: FloatArray) -> FloatArray:
        return w

    @property
    def spec(self) -> str:
        return "product"


@dataclass(frozen=True)
class Comonotone(CopulaModel):
    family: ClassVar[CopulaFamily] = "comonotone"

    def _cdf(self, u: FloatArray, v: FloatArray) -> FloatArray:
        return np.minimum(u, v)

    def conditional_inverse(self, u: FloatArray, w: FloatArray) -> FloatArray:
        return u.copy()

    @property
    def spec(self) -> str:
        return "comonotone"


@dataclass(frozen=True)
class Countermonotone(CopulaModel):
    family: ClassVar[CopulaFamily] = "countermonotone"

    def _cdf(self, u: FloatArray, v: FloatArray) -> FloatArray:
        return np.maximum(u + v - 1.0, 0.0)

    def conditional_inverse(self, u: FloatArray, w: FloatArray) -> FloatArray:
        return 1.0 - u

    @property
    def spec(self) -> str:
        return "countermonotone"


@dataclass(frozen=True)
class Gaussian(CopulaModel):
    rho: float

    family: ClassVar[CopulaFamily] = "gaussian"

    def __post_init__(self) -> None:
        if not (math.isfinite(self.rho) and abs(self.rho) <= MAX_ABS_RHO):
            raise DomainError(f"Gaussian copula needs |rho| <= {MAX_ABS_RHO}, got rho={self.rho}")

    def _cdf(self, u: FloatArray, v: FloatArray) -> FloatArray:
        # C(u, v) = int_0^u Phi((Phi^-1(v) - rho Phi^-1(s)) / sqrt(1 - rho^2)) ds
        shape = u.shape
        u, v = u.ravel(), v.ravel()
        out = np.where((u <= 0.0) | (v <= 0.0), 0.0, np.where(v >= 1.0, u, np.where(u >= 1.0, v, np.nan)))

        inner = np.isnan(out)
        if np.any(inner):
            x = ndtri(v[inner])
            scale = 1.0 / math.sqrt(1.0 - self.rho**2)

            def integrand(s: FloatArray, owner: np.ndarray) -> FloatArray:
                return ndtr((x[owner] - self.rho * ndtri(s)) * scale)

            out[inner] = adaptive_gauss_legendre(integrand, np.zeros(int(inner.sum())), u[inner], tol=BVN_TOLERANCE)

        return np.clip(out, 0.0, 1.0).reshape(shape)

    def conditional_inverse(self, u: FloatArray, w: FloatArray) -> FloatArray:
        return ndtr(self.rho * ndtri(u) + math.sqrt(1.0 - self.rho**2) * ndtri(w))

    @property
    def spec(self) -> str:
        return f"gaussian:{self.rho!r}"


@dataclass(frozen=True)
class Clayton(CopulaModel):
    theta: float

    family: ClassVar[CopulaFamily] = "clayton"

    def __post_init__(self) -> None:
        if not (math.isfinite(self.theta) and self.theta > 0):
            raise DomainError(f"Clayton copula needs theta > 0, got theta={self.theta}")

    def _cdf(self, u: FloatArray, v: FloatArray) -> FloatArray:
        t = self.theta
        positive = (u > 0.0) & (v > 0.0)
        safe_u = np.where(positive, u, 1.0)
        safe_v = np.where(positive, v, 1.0)
        value = (safe_u**-t + safe_v**-t - 1.0) ** (-1.0 / t)
        return np.where(positive, np.minimum(value, np.minimum(u, v)), 0.0)

    def conditional_inverse(self, u: FloatArray, w: FloatArray) -> FloatArray:
        t = self.theta
        return (u**-t * (w ** (-t / (1.0 + t)) - 1.0) + 1.0) ** (-1.0 / t)

    @property
    def spec(self) -> str:
        return f"clayton:{self.theta!r}"


def _parse_parameter(raw: str) -> float:
    try:
        return float(raw)
    except ValueError:
        raise DomainError(f"Expected a number, got {raw!r}")


def _parse_no_parameter[T: CopulaModel](model_type: type[T]) -> Callable[[str], T]:
    def _parse(raw: str) -> T:
        if raw:
            raise DomainError(f"Copula {model_type.family!r} takes no parameter, got {raw!r}")
        return model_type()

    return _parse


class CopulaFamilyParams(TypedDict):
    model_type: type[CopulaModel]
    parse: Callable[[str], CopulaModel]


_COPULA_FAMILIES_MAP: dict[CopulaFamily, CopulaFamilyParams] = {
    "product": {
        "model_type": Product,
        "parse": _parse_no_parameter(Product),
    },
    "gaussian": {
        "model_type": Gaussian,
        "parse": lambda raw: Gaussian(_parse_parameter(raw)),
    },
    "clayton": {
        "model_type": Clayton,
        "parse": lambda raw: Clayton(_parse_parameter(raw)),
    },
    "comonotone": {
        "model_type": Comonotone,
        "parse": _parse_no_parameter(Comonotone),
    },
    "countermonotone": {
        "model_type": Countermonotone,
        "parse": _parse_no_parameter(Countermonotone),
    },
}


def create_copula(spec: str) -> CopulaModel:
    """Parse a copula spec string such as ``gaussian:0.5`` into a model."""
    family, _, raw = spec.strip().partition(":")
    try:
        family_params = _COPULA_FAMILIES_MAP[family.strip().lower()]  # type: ignore[index]
    except KeyError:
        raise DomainError(f"Unsupported copula family: {family!r} (in {spec!r})")

    return family_params["parse"](raw.strip())


def copula_cdf(model: CopulaModel, u: ArrayLike, v: ArrayLike) -> float | FloatArray:
    value = model.cdf(u, v)
    return float(value) if np.ndim(value) == 0 else value


def sample_copula_pair(model: CopulaModel, rng: np.random.Generator) -> tuple[float, float]:
    u, v = model.sample(1, rng)
    return float(u[0]), float(v[0])


def sheet_covariance(
    model: CopulaModel,
    p1: SheetPoint | tuple[float, float],
    p2: SheetPoint | tuple[float, float],
) -> float:
    """Covariance of the tied-down Brownian sheet: C(u ^ u', v ^ v') - C(u, v) C(u', v')."""
    (u1, v1), (u2, v2) = p1, p2
    joint = float(model.cdf(min(u1, u2), min(v1, v2)))
    return joint - float(model.cdf(u1, v1)) * float(model.cdf(u2, v2))


def bridge_cross_covariance(model: CopulaModel, u: ArrayLike, v: ArrayLike) -> float | FloatArray:
    """Cov(B1(u), B2(v)) = C(u, v) - uv for the edge bridges B1 = B(., 1) and B2 = B(1, .)."""
    u, v = np.broadcast_arrays(_as_array(u), _as_array(v))
    value = model.cdf(u, v) - u * v
    return float(value) if np.ndim(value) == 0 else value
