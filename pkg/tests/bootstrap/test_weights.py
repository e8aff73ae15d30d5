import numpy as np
import pytest

from ppcurve.bootstrap.weights import BootstrapWeights, draw_multinomial_weights, weighted_cdf_eval
from ppcurve.errors import DomainError


class TestDrawMultinomialWeights:
    def test_single_observation(self, rng):
        np.testing.assert_array_equal(draw_multinomial_weights(1, rng).counts, [1])

    @pytest.mark.parametrize("n", [2, 17, 1000])
    def test_sum_is_n(self, rng, n):
        for _ in range(20):
            weights = draw_multinomial_weights(n, rng)
            assert weights.counts.sum() == n
            assert weights.counts.min() >= 0

    def test_all_mass_on_first_of_two(self, rng):
        draws = 20000
        hits = sum(np.array_equal(draw_multinomial_weights(2, rng).counts, [2, 0]) for _ in range(draws))
        sigma = np.sqrt(0.25 * 0.75 / draws)
        assert abs(hits / draws - 0.25) <= 4.0 * sigma

    def test_coordinate_means(self, rng):
        n, draws = 10, 5000
        counts = np.stack([draw_multinomial_weights(n, rng).counts for _ in range(draws)])
        sigma = np.sqrt((1.0 - 1.0 / n) / draws)
        assert np.all(np.abs(counts.mean(axis=0) - 1.0) <= 4.0 * sigma)

    def test_rejects_empty(self, rng):
        with pytest.raises(DomainError):
            draw_multinomial_weights(0, rng)


class TestBootstrapWeights:
    def test_ones(self):
        weights = BootstrapWeights.ones(5)
        assert weights.n == len(weights) == 5

    def test_integral_floats_accepted(self):
        assert BootstrapWeights(np.array([2.0, 0.0])).counts.dtype == np.int64

    @pytest.mark.parametrize("counts", [[], [1, 1, 2], [3, -1, 1], [0.5, 1.5]])
    def test_validation(self, counts):
        with pytest.raises(DomainError):
            BootstrapWeights(np.asarray(counts))


class TestWeightedCdf:
    def test_unit_weights_give_empirical_cdf(self, rng):
        values = rng.normal(size=31)
        x = np.linspace(-3.0, 3.0, 101)
        expected = np.searchsorted(np.sort(values), x, side="right") / values.size
        np.testing.assert_allclose(weighted_cdf_eval(values, BootstrapWeights.ones(31), x), expected)

    def test_weights_move_mass(self):
        values = np.array([3.0, 1.0, 2.0])
        weights = BootstrapWeights(np.array([0, 2, 1]))
        np.testing.assert_allclose(weighted_cdf_eval(values, weights, [0.5, 1.0, 2.5, 3.0]), [0.0, 2 / 3, 1.0, 1.0])

    def test_length_mismatch(self):
        with pytest.raises(DomainError):
            weighted_cdf_eval(np.zeros(3), BootstrapWeights.ones(2), 0.0)
