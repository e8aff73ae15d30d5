"""Batched adaptive quadrature and root bracketing.

Each routine works on many intervals at once: intervals that meet their tolerance are retired and
the rest are bisected, so one numpy call evaluates the integrand on every active interval.
"""

from typing import Callable

import numpy as np

type FloatArray = np.ndarray
type IntArray = np.ndarray

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(10)

MAX_DEPTH = 50


def _gauss_legendre_panel(
    func: Callable[[FloatArray, IntArray], FloatArray],
    lo: FloatArray,
    hi: FloatArray,
    owner: IntArray,
) -> FloatArray:
    half = 0.5 * (hi - lo)
    nodes = (0.5 * (hi + lo))[:, None] + half[:, None] * _GL_NODES[None, :]
    return half * (func(nodes, owner[:, None]) @ _GL_WEIGHTS)


def adaptive_gauss_legendre(
    func: Callable[[FloatArray, IntArray], FloatArray],
    lo: FloatArray,
    hi: FloatArray,
    *,
    tol: float = 1e-10,
    max_depth: int = MAX_DEPTH,
) -> FloatArray:
    """Integrate ``func`` over each ``[lo[i], hi[i]]`` to absolute tolerance ``tol``.

    ``func(s, owner)`` receives a 2-d array of nodes and the broadcastable index of the interval
    each row belongs to, so per-interval parameters can be looked up by ``owner``.
    """
    lo, hi = np.broadcast_arrays(np.atleast_1d(np.asarray(lo, dtype=np.float64)), np.asarray(hi, dtype=np.float64))
    lo, hi = lo.ravel().copy(), hi.ravel().copy()

    result = np.zeros(lo.size)
    owner = np.arange(lo.size)
    tols = np.full(lo.size, float(tol))
    whole = _gauss_legendre_panel(func, lo, hi, owner)

    for depth in range(max_depth + 1):
        if owner.size == 0:
            break
        mid = 0.5 * (lo + hi)
        left = _gauss_legendre_panel(func, lo, mid, owner)
        right = _gauss_legendre_panel(func, mid, hi, owner)
        refined = left + right

        done = (np.abs(refined - whole) <= tols) | (depth == max_depth)
        np.add.at(result, owner[done], refined[done])

        keep = ~done
        owner = np.concatenate((owner[keep], owner[keep]))
        lo, hi = np.concatenate((lo[keep], mid[keep])), np.concatenate((mid[keep], hi[keep]))
        whole = np.concatenate((left[keep], right[keep]))
        tols = np.concatenate((tols[keep], tols[keep])) / 2.0

    return result


def adaptive_simpson(
    func: Callable[[FloatArray], FloatArray],
    lo: FloatArray,
    hi: FloatArray,
    tol: float | FloatArray,
    *,
    max_depth: int = MAX_DEPTH,
) -> FloatArray:
    """Integrate a vectorised ``func`` over each ``[lo[i], hi[i]]``; ``tol`` is per interval."""
    lo = np.atleast_1d(np.asarray(lo, dtype=np.float64)).copy()
    hi = np.atleast_1d(np.asarray(hi, dtype=np.float64)).copy()
    tols = np.broadcast_to(np.asarray(tol, dtype=np.float64), lo.shape).copy()

    result = np.zeros(lo.size)
    owner = np.arange(lo.size)

    mid = 0.5 * (lo + hi)
    f_lo, f_mid, f_hi = np.split(func(np.concatenate((lo, mid, hi))), 3)
    whole = (hi - lo) / 6.0 * (f_lo + 4.0 * f_mid + f_hi)

    for depth in range(max_depth + 1):
        if owner.size == 0:
            break
        left_mid = 0.5 * (lo + mid)
        right_mid = 0.5 * (mid + hi)
        f_left_mid, f_right_mid = np.split(func(np.concatenate((left_mid, right_mid))), 2)

        left = (mid - lo) / 6.0 * (f_lo + 4.0 * f_left_mid + f_mid)
        right = (hi - mid) / 6.0 * (f_mid + 4.0 * f_right_mid + f_hi)
        delta = left + right - whole

        done = (np.abs(delta) <= 15.0 * tols) | (depth == max_depth)
        np.add.at(result, owner[done], (left + right + delta / 15.0)[done])

        keep = ~done
        owner = np.concatenate((owner[keep], owner[keep]))
        new_lo = np.concatenate((lo[keep], mid[keep]))
        new_hi = np.concatenate((mid[keep], hi[keep]))
        new_f_lo = np.concatenate((f_lo[keep], f_mid[keep]))
        new_f_hi = np.concatenate((f_mid[keep], f_hi[keep]))
        f_mid = np.concatenate((f_left_mid[keep], f_right_mid[keep]))
        whole = np.concatenate((left[keep], right[keep]))
        tols = np.concatenate((tols[keep], tols[keep])) / 2.0
        lo, hi, f_lo, f_hi = new_lo, new_hi, new_f_lo, new_f_hi
        mid = 0.5 * (lo + hi)

    return result


def bisect_crossing(
    func: Callable[[FloatArray], FloatArray],
    lo: FloatArray,
    hi: FloatArray,
    level: FloatArray,
    *,
    xtol: float = 1e-12,
) -> FloatArray:
    """For nondecreasing ``func`` with func(lo) < level < func(hi), locate where func crosses ``level``.

    Returns the left end of the final bracket, which is within ``xtol`` of the crossing.
    """
    lo = np.asarray(lo, dtype=np.float64).copy()
    hi = np.asarray(hi, dtype=np.float64).copy()
    level = np.asarray(level, dtype=np.float64)

    while lo.size and np.max(hi - lo) > xtol:
        mid = 0.5 * (lo + hi)
        below = func(mid) < level
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)

    return lo
