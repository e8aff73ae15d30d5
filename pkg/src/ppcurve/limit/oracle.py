import math

import numpy as np

from ppcurve.copulas.models import CopulaModel
from ppcurve.empirical.data import draw_sample_data
from ppcurve.errors import DomainError
from ppcurve.functionals.distances import l1_step_vs_curve
from ppcurve.margins.curve import PPCurve


def simulate_limit_oracle(
    curve: PPCurve,
    copula: CopulaModel,
    sizes: tuple[int, int] | None,
    big_n: int,
    rng: np.random.Generator,
) -> float:
    """One draw of sqrt(n) * ||R_n - R||_1 at n = ``big_n``, a brute-force stand-in for the limit law.

    ``sizes`` is None for paired data, or (m, n) for independent samples whose X size keeps the
    ratio m / n at ``big_n``.
    """
    if big_n < 2:
        raise DomainError(f"Oracle needs big_n >= 2, got {big_n}")

    m = None
    if sizes is not None:
        size_m, size_n = sizes
        if size_m < 1 or size_n < 1:
            raise DomainError(f"Sample sizes must be positive, got {sizes}")
        m = max(1, round(big_n * size_m / size_n))

    data = draw_sample_data(curve.f_model, curve.g_model, copula, big_n, rng, m=m)
    return math.sqrt(big_n) * l1_step_vs_curve(data.pp_plot(), curve)
