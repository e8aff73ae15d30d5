import numpy as np
import pytest

from ppcurve.errors import DomainError
from ppcurve.functionals.derivative import composition_derivative_error
from ppcurve.margins.curve import PPCurve
from ppcurve.margins.models import Exponential, Normal

AC_CURVES = [
    PPCurve(Normal(0.0, 1.0), Normal(0.5, 1.0)),
    PPCurve(Exponential(2.0), Exponential(1.0)),
]


def alpha(u):
    return np.sin(np.pi * u)


def zero(u):
    return np.zeros_like(u)


def beta(u):
    return 0.1 * u * (1.0 - u)


class TestCompositionDerivative:
    @pytest.mark.parametrize("curve", AC_CURVES, ids=repr)
    def test_quotient_converges(self, curve):
        errors = [composition_derivative_error(curve, curve.density, alpha, zero, t) for t in (1e-2, 1e-3)]
        assert errors[1] < 0.05
        assert errors[1] < errors[0]

    def test_with_outer_perturbation(self):
        curve = AC_CURVES[0]
        errors = [composition_derivative_error(curve, curve.density, alpha, beta, t) for t in (1e-1, 1e-3)]
        assert errors[1] < 0.05
        assert errors[1] < errors[0]

    def test_identity_outer_is_exact(self):
        identity = PPCurve.identity()
        error = composition_derivative_error(identity, lambda u: np.ones_like(u), alpha, beta, 1e-2)
        assert error == pytest.approx(0.0, abs=1e-3)

    def test_rejects_non_positive_step(self):
        curve = AC_CURVES[0]
        with pytest.raises(DomainError):
            composition_derivative_error(curve, curve.density, alpha, beta, 0.0)
