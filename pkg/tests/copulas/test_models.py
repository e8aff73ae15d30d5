import math

import numpy as np
import pytest
from scipy import integrate
from scipy.special import ndtr, ndtri

from ppcurve.copulas.models import (
    Clayton,
    Comonotone,
    Countermonotone,
    Gaussian,
    Product,
    SheetPoint,
    bridge_cross_covariance,
    copula_cdf,
    create_copula,
    sample_copula_pair,
    sheet_covariance,
)
from ppcurve.errors import DomainError

COPULAS = [Product(), Comonotone(), Countermonotone(), Gaussian(0.5), Gaussian(-0.7), Clayton(2.0)]


def gaussian_cdf_oracle(u: float, v: float, rho: float) -> float:
    x = ndtri(v)
    scale = math.sqrt(1.0 - rho**2)
    value, _ = integrate.quad(lambda s: ndtr((x - rho * ndtri(s)) / scale), 0.0, u, epsabs=1e-13, epsrel=1e-13)
    return value


class TestCopulaCdf:
    def test_product(self):
        assert copula_cdf(Product(), 0.3, 0.4) == pytest.approx(0.12)

    def test_comonotone(self):
        assert copula_cdf(Comonotone(), 0.3, 0.4) == pytest.approx(0.3)

    def test_countermonotone(self):
        assert copula_cdf(Countermonotone(), 0.3, 0.4) == 0.0
        assert copula_cdf(Countermonotone(), 0.8, 0.4) == pytest.approx(0.2)

    def test_clayton_closed_form(self):
        assert copula_cdf(Clayton(2.0), 0.5, 0.5) == pytest.approx(7.0**-0.5)

    def test_gaussian_zero_correlation_is_product(self):
        u, v = np.meshgrid(np.linspace(0.05, 0.95, 7), np.linspace(0.05, 0.95, 7))
        np.testing.assert_allclose(Gaussian(0.0).cdf(u, v), u * v, atol=1e-10)

    @pytest.mark.parametrize("rho", [0.5, -0.7, 0.95])
    @pytest.mark.parametrize("u, v", [(0.3, 0.4), (0.9, 0.1), (0.5, 0.5), (0.02, 0.97)])
    def test_gaussian_against_quad(self, rho, u, v):
        assert copula_cdf(Gaussian(rho), u, v) == pytest.approx(gaussian_cdf_oracle(u, v, rho), abs=1e-9)

    @pytest.mark.parametrize("model", COPULAS, ids=str)
    def test_uniform_margins_and_grounding(self, model):
        t = np.linspace(0.0, 1.0, 11)
        np.testing.assert_allclose(model.cdf(t, 1.0), t, atol=1e-12)
        np.testing.assert_allclose(model.cdf(1.0, t), t, atol=1e-12)
        np.testing.assert_allclose(model.cdf(t, 0.0), 0.0, atol=1e-12)
        np.testing.assert_allclose(model.cdf(0.0, t), 0.0, atol=1e-12)

    @pytest.mark.parametrize("model", COPULAS, ids=str)
    def test_frechet_bounds(self, model):
        u, v = np.meshgrid(np.linspace(0.0, 1.0, 21), np.linspace(0.0, 1.0, 21))
        values = model.cdf(u, v)
        assert np.all(values >= np.maximum(u + v - 1.0, 0.0) - 1e-12)
        assert np.all(values <= np.minimum(u, v) + 1e-12)


class TestCopulaSampling:
    @pytest.mark.parametrize("model", COPULAS, ids=str)
    def test_open_unit_square(self, model, rng):
        u, v = model.sample(5000, rng)
        assert np.all((u > 0.0) & (u < 1.0))
        assert np.all((v > 0.0) & (v < 1.0))

    @pytest.mark.parametrize("model", COPULAS, ids=str)
    def test_quadrant_frequency_matches_cdf(self, model, rng):
        draws = 20000
        u, v = model.sample(draws, rng)
        for a, b in [(0.5, 0.5), (0.3, 0.7)]:
            p = float(model.cdf(a, b))
            freq = np.mean((u <= a) & (v <= b))
            sigma = math.sqrt(max(p * (1.0 - p), 1e-4) / draws)
            assert abs(freq - p) <= 4.0 * sigma

    @pytest.mark.parametrize("model", COPULAS, ids=str)
    def test_empirical_copula_on_grid(self, model, rng):
        u, v = model.sample(100000, rng)
        t = np.linspace(0.0, 1.0, 21)
        below_u = u[None, :] <= t[:, None]
        below_v = (v[None, :] <= t[:, None]).astype(np.float64)
        empirical = (below_u.astype(np.float64) @ below_v.T) / u.size
        a, b = np.meshgrid(t, t, indexing="ij")
        assert np.max(np.abs(empirical - model.cdf(a, b))) <= 0.01

    def test_comonotone_pair_equal(self, rng):
        u, v = sample_copula_pair(Comonotone(), rng)
        assert u == v

    def test_countermonotone_transform(self):
        _, v = Countermonotone().transform(0.42, 0.9)
        assert float(v) == pytest.approx(0.58)


class TestCovariances:
    def test_sheet_variance_on_edge_is_bridge(self):
        assert sheet_covariance(Product(), SheetPoint(0.5, 1.0), SheetPoint(0.5, 1.0)) == pytest.approx(0.25)

    def test_sheet_covariance_symmetric(self):
        model = Gaussian(0.5)
        p1, p2 = (0.3, 0.8), (0.6, 0.4)
        assert sheet_covariance(model, p1, p2) == pytest.approx(sheet_covariance(model, p2, p1))

    def test_product_cross_is_zero(self):
        np.testing.assert_allclose(bridge_cross_covariance(Product(), [0.2, 0.5], [0.7, 0.5]), 0.0)

    @pytest.mark.parametrize("u", [0.1, 0.5, 0.9])
    def test_comonotone_cross_is_bridge_variance(self, u):
        assert bridge_cross_covariance(Comonotone(), u, u) == pytest.approx(u - u * u)


class TestCreateCopula:
    @pytest.mark.parametrize("model", COPULAS, ids=str)
    def test_spec_round_trip(self, model):
        assert create_copula(model.spec) == model

    @pytest.mark.parametrize("spec", ["frank:1", "product:1", "gaussian", "gaussian:0.9995", "clayton:0", "clayton:x"])
    def test_rejects(self, spec):
        with pytest.raises(DomainError):
            create_copula(spec)


class TestCopulaValues:
    @pytest.mark.parametrize(
        "model, u, v, expected",
        [
            (Product(), 0.3, 0.6, 0.18),
            (Comonotone(), 0.3, 0.6, 0.3),
            (Clayton(1.0), 0.5, 0.5, 1 / 3),
        ],
    )
    def test_cdf_values(self, model, u, v, expected):
        assert copula_cdf(model, u, v) == pytest.approx(expected)

    @pytest.mark.parametrize(
        "model, expected",
        [(Product(), 0.0), (Comonotone(), 0.25), (Countermonotone(), -0.25)],
        ids=str,
    )
    def test_bridge_cross_values(self, model, expected):
        assert bridge_cross_covariance(model, 0.5, 0.5) == pytest.approx(expected)

    @pytest.mark.parametrize("model", COPULAS, ids=str)
    def test_sheet_vanishes_at_origin(self, model):
        assert sheet_covariance(model, (0.0, 0.0), (0.4, 0.7)) == pytest.approx(0.0, abs=1e-15)

    @pytest.mark.parametrize("model", COPULAS, ids=str)
    def test_two_increasing(self, model, rng):
        lo = rng.uniform(0.0, 1.0, size=(200, 2))
        hi = lo + rng.uniform(0.0, 1.0, size=(200, 2)) * (1.0 - lo)
        mass = model.cdf(hi[:, 0], hi[:, 1]) - model.cdf(lo[:, 0], hi[:, 1])
        mass -= model.cdf(hi[:, 0], lo[:, 1]) - model.cdf(lo[:, 0], lo[:, 1])
        slack = 1e-9 if isinstance(model, Gaussian) else 1e-12
        assert np.all(mass >= -slack)

    @pytest.mark.parametrize("model", COPULAS, ids=str)
    def test_sheet_gram_matrix_psd(self, model, rng):
        points = [SheetPoint(*it) for it in rng.uniform(0.0, 1.0, size=(8, 2))]
        gram = np.array([[sheet_covariance(model, p, q) for q in points] for p in points])
        assert np.linalg.eigvalsh(gram)[0] >= -1e-9

    def test_product_sample_uncorrelated(self, rng):
        u, v = Product().sample(100000, rng)
        assert abs(np.corrcoef(u, v)[0, 1]) < 0.01
