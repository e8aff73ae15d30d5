import math
from fractions import Fraction

import numpy as np
import pytest

from ppcurve.empirical.samples import SortedSample, empirical_cdf_eval, empirical_qf_eval, exact_ceil_product
from ppcurve.errors import DomainError


@pytest.fixture
def sample():
    return SortedSample.from_values([3.0, 1.0, 2.0])


class TestSortedSample:
    def test_sorts(self, sample):
        np.testing.assert_array_equal(sample.values, [1.0, 2.0, 3.0])
        assert len(sample) == 3

    def test_cdf_right_continuous(self, sample):
        assert empirical_cdf_eval(sample, 0.5) == 0.0
        assert empirical_cdf_eval(sample, 2.0) == pytest.approx(2.0 / 3.0)
        assert empirical_cdf_eval(sample, 3.5) == 1.0

    def test_cdf_counts_ties(self):
        tied = SortedSample.from_values([1.0, 1.0, 2.0, 5.0])
        assert empirical_cdf_eval(tied, 1.0) == 0.5

    @pytest.mark.parametrize("u, expected", [(0.1, 1.0), (1.0 / 3.0, 1.0), (0.34, 2.0), (2.0 / 3.0, 2.0), (0.99, 3.0)])
    def test_qf_order_statistic(self, sample, u, expected):
        assert empirical_qf_eval(sample, u) == expected

    def test_qf_inverts_cdf(self, rng):
        sample = SortedSample.from_values(rng.normal(size=257))
        k = np.arange(1, sample.n + 1)
        np.testing.assert_array_equal(sample.qf((k - 0.5) / sample.n), sample.values)

    def test_qf_rank_uses_exact_product(self, sample):
        # 3 * nextafter(1/3, 1) rounds to 1.0 but exceeds 1
        above = np.nextafter(1.0 / 3.0, 1.0)
        assert 3.0 * above == 1.0
        assert empirical_qf_eval(sample, above) == 2.0
        assert empirical_qf_eval(sample, 1.0 / 3.0) == 1.0

    @pytest.mark.parametrize("u", [0.0, 1.0, -0.5])
    def test_qf_outside_open_interval(self, sample, u):
        with pytest.raises(DomainError):
            sample.qf(u)

    def test_rejects_unsorted(self):
        with pytest.raises(DomainError):
            SortedSample(np.array([2.0, 1.0]))

    @pytest.mark.parametrize("values", [[], [1.0, np.inf], [np.nan]])
    def test_rejects_bad_values(self, values):
        with pytest.raises(DomainError):
            SortedSample.from_values(values)


class TestExactCeilProduct:
    @pytest.mark.parametrize("n", [1, 3, 7, 257, 4096, 10**6 + 3])
    def test_matches_rational_ceiling(self, n, rng):
        u = np.concatenate((rng.uniform(size=200), np.arange(1, 50) / n, np.nextafter(np.arange(1, 50) / n, 1.0)))
        u = u[(u > 0.0) & (u < 1.0)]
        expected = [math.ceil(Fraction(n) * Fraction(float(it))) for it in u]
        np.testing.assert_array_equal(exact_ceil_product(n, u), expected)
