import logging
import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from ppcurve.errors import InvalidStateError
from ppcurve.margins.models import CATALOG_TYPES, ArrayLike, FloatArray, MarginModel, QuantilePiece, Uniform

logger = logging.getLogger(__name__)

type AcClass = Literal["AbsolutelyContinuous", "NotAbsolutelyContinuous", "Unknown"]

DENSITY_STEP = 1e-5


def _piece_start_value(f_model: MarginModel, piece: QuantilePiece) -> float:
    """Limit of F(Q(u)) as u decreases to the start of ``piece``."""
    if piece.kind == "flat":
        return float(f_model.cdf(piece.lo))
    return float(f_model.cdf(piece.lo)) if math.isfinite(piece.lo) else 0.0


def _piece_end_value(f_model: MarginModel, piece: QuantilePiece) -> float:
    """Limit of F(Q(u)) as u increases to the end of ``piece``."""
    if piece.kind == "flat":
        return float(f_model.cdf(piece.hi))
    return float(f_model.cdf_left(piece.hi)) if math.isfinite(piece.hi) else 1.0


def classify_ac(f_model: MarginModel, g_model: MarginModel) -> AcClass:
    """Decide whether R = F o Q is absolutely continuous for a pair of catalog margins.

    Every catalog cdf is a finite set of atoms plus a part with bounded density, and Q splits into
    flat stretches (atoms of G) and strictly increasing, locally Lipschitz stretches. R is therefore
    absolutely continuous exactly when it has no jump, and a jump can only appear
    - inside an increasing stretch, where an atom of F lies strictly between its ends, or
    - at the junction of two stretches, where F gains mass across the junction.
    """
    if not (isinstance(f_model, CATALOG_TYPES) and isinstance(g_model, CATALOG_TYPES)):
        return "Unknown"

    pieces = g_model.quantile_pieces()

    for piece in pieces:
        if piece.kind == "increasing" and any(piece.lo < x < piece.hi for x in f_model.atoms):
            return "NotAbsolutelyContinuous"

    for before, after in zip(pieces, pieces[1:]):
        if _piece_start_value(f_model, after) > _piece_end_value(f_model, before):
            return "NotAbsolutelyContinuous"

    return "AbsolutelyContinuous"


@dataclass(frozen=True)
class PPCurve:
    """The P-P curve R(u) = F(Q(u)) with its endpoint limits and absolute-continuity class."""

    f_model: MarginModel
    g_model: MarginModel
    endpoint_lo: float = field(init=False)
    endpoint_hi: float = field(init=False)
    ac_class: AcClass = field(init=False)

    def __post_init__(self) -> None:
        pieces = self.g_model.quantile_pieces()
        object.__setattr__(self, "endpoint_lo", _piece_start_value(self.f_model, pieces[0]))
        object.__setattr__(self, "endpoint_hi", _piece_end_value(self.f_model, pieces[-1]))
        object.__setattr__(self, "ac_class", classify_ac(self.f_model, self.g_model))

    @classmethod
    def identity(cls) -> "PPCurve":
        return cls(Uniform(0.0, 1.0), Uniform(0.0, 1.0))

    def __repr__(self) -> str:
        return f"<PPCurve (F={self.f_model.spec}, G={self.g_model.spec}, {self.ac_class})>"

    @property
    def is_absolutely_continuous(self) -> bool:
        return self.ac_class == "AbsolutelyContinuous"

    def __call__(self, u: ArrayLike) -> FloatArray:
        u = np.asarray(u, dtype=np.float64)
        inner = np.clip(u, np.nextafter(0.0, 1.0), np.nextafter(1.0, 0.0))
        values = self.f_model.cdf(self.g_model.qf(inner))
        return np.where(u <= 0.0, self.endpoint_lo, np.where(u >= 1.0, self.endpoint_hi, values))

    def _density_finite_difference(self, u: FloatArray) -> FloatArray:
        h = DENSITY_STEP
        lo = np.maximum(u - h, 0.0)
        hi = np.minimum(u + h, 1.0)
        return (self(hi) - self(lo)) / (hi - lo)

    def density(self, u: ArrayLike) -> FloatArray:
        """r(u): analytic f(Q(u))/g(Q(u)) where available, else a central difference of R."""
        if self.ac_class == "NotAbsolutelyContinuous":
            raise InvalidStateError(f"Density is undefined: R is not absolutely continuous for {self!r}")
        if self.ac_class == "Unknown":
            logger.warning("Density of %r is computed by finite differences without an AC guarantee", self)

        u = np.asarray(u, dtype=np.float64)
        if not (self.f_model.has_density and self.g_model.has_density):
            return self._density_finite_difference(u)

        x = self.g_model.qf(u)
        f_x = self.f_model.pdf(x)
        g_x = self.g_model.pdf(x)

        with np.errstate(divide="ignore", invalid="ignore"):
            analytic = f_x / g_x

        return np.where(
            g_x > 0.0,
            analytic,
            np.where(f_x == 0.0, 1.0, self._density_finite_difference(u)),
        )


def pp_curve_eval(curve: PPCurve, u: ArrayLike) -> float | FloatArray:
    values = curve(u)
    return float(values) if np.ndim(values) == 0 else values


def pp_density_eval(curve: PPCurve, u: ArrayLike) -> float | FloatArray:
    values = curve.density(u)
    return float(values) if np.ndim(values) == 0 else values
