import numpy as np

from ppcurve.errors import DomainError
from ppcurve.functionals.distances import Curve, GridFunction, midpoint_grid


def composition_derivative_error(
    outer: Curve,
    outer_density: Curve,
    alpha: Curve,
    beta: Curve,
    t: float,
    grid_size: int = 4096,
) -> float:
    """L1 gap between the difference quotient of (A, B) -> B o A at (I, B) and the derivative beta + b alpha.

    The quotient is t^-1 [(B + t beta)(u + t alpha(u)) - B(u)]; the inner argument is clipped to [0, 1].
    """
    if not t > 0:
        raise DomainError(f"Step t must be positive, got {t}")

    u = midpoint_grid(grid_size)
    moved = np.clip(u + t * alpha(u), 0.0, 1.0)
    quotient = (outer(moved) + t * beta(moved) - outer(u)) / t
    derivative = beta(u) + outer_density(u) * alpha(u)
    return GridFunction(quotient - derivative).l1_norm()
