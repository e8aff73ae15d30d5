import math

import pytest

from ppcurve.copulas.models import Comonotone, Product
from ppcurve.errors import DomainError
from ppcurve.limit.oracle import simulate_limit_oracle
from ppcurve.margins.curve import PPCurve
from ppcurve.margins.models import Normal


class TestSimulateLimitOracle:
    def test_comonotone_identity_is_deterministic(self, rng):
        value = simulate_limit_oracle(PPCurve.identity(), Comonotone(), None, 4096, rng)
        assert value == pytest.approx(1.0 / 128.0, rel=1e-6)

    def test_independent_samples(self, rng):
        curve = PPCurve(Normal(0.0, 1.0), Normal(0.5, 1.0))
        value = simulate_limit_oracle(curve, Product(), (200, 100), 512, rng)
        assert 0.0 < value < 5.0

    @pytest.mark.parametrize("sizes, big_n", [(None, 1), ((0, 10), 100)])
    def test_rejects(self, rng, sizes, big_n):
        with pytest.raises(DomainError):
            simulate_limit_oracle(PPCurve.identity(), Product(), sizes, big_n, rng)

    def test_scaled_by_root_n(self, rng):
        value = simulate_limit_oracle(PPCurve.identity(), Comonotone(), None, 100, rng)
        assert value == pytest.approx(math.sqrt(100) / 200.0, rel=1e-6)
