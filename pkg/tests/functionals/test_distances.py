import math

import numpy as np
import pytest

from ppcurve.empirical.plots import build_pp_plot, empirical_cdf_step
from ppcurve.empirical.samples import SortedSample
from ppcurve.empirical.steps import StepFunction
from ppcurve.errors import DomainError
from ppcurve.functionals.distances import (
    GridFunction,
    ks_distance,
    l1_step_vs_curve,
    l1_step_vs_step,
    midpoint_grid,
    shift_modulus_l1,
    sup_step_vs_curve,
)
from ppcurve.margins.curve import PPCurve
from ppcurve.margins.models import DiscreteAtoms, Normal, Uniform

IDENTITY = PPCurve.identity()


@pytest.fixture
def staircase():
    return StepFunction([1 / 3, 2 / 3, 1.0], [1 / 3, 2 / 3, 1.0])


def midpoint_l1(step, curve, points=2**20):
    u = midpoint_grid(points)
    return float(np.mean(np.abs(step(u) - curve(u))))


class TestL1StepVsCurve:
    def test_staircase_against_identity(self, staircase):
        assert l1_step_vs_curve(staircase, IDENTITY) == pytest.approx(1 / 6, abs=1e-12)

    def test_zero_against_identity(self):
        assert l1_step_vs_curve(StepFunction([1.0], [0.0]), IDENTITY) == pytest.approx(0.5, abs=1e-12)

    def test_population_step_of_bernoulli_curve(self):
        curve = PPCurve(Uniform(), DiscreteAtoms((0.0, 1.0), (0.5, 0.5)))
        assert l1_step_vs_curve(StepFunction([0.5, 1.0], [0.0, 1.0]), curve) == pytest.approx(0.0, abs=1e-9)

    def test_crossing_inside_cell(self):
        """A single cell at 1/4 against the identity: 1/32 below the crossing plus 9/32 above."""
        assert l1_step_vs_curve(StepFunction([1.0], [0.25]), IDENTITY) == pytest.approx(10 / 32, abs=1e-12)

    def test_against_dense_midpoint_rule(self, rng):
        x = SortedSample.from_values(rng.normal(size=200))
        y = SortedSample.from_values(rng.normal(1.0, 1.0, size=150))
        curve = PPCurve(Normal(0.0, 1.0), Normal(1.0, 1.0))
        plot = build_pp_plot(x, y)
        assert l1_step_vs_curve(plot, curve) == pytest.approx(midpoint_l1(plot, curve), abs=1e-4)

    def test_rejects_non_positive_tolerance(self, staircase):
        with pytest.raises(DomainError):
            l1_step_vs_curve(staircase, IDENTITY, tol=0.0)


class TestL1StepVsStep:
    def test_disjoint_partitions(self, staircase):
        other = StepFunction([0.5, 1.0], [0.0, 1.0])
        # cells of the refinement: (0,1/3] (1/3,1/2] (1/2,2/3] (2/3,1]
        expected = (1 / 3) * (1 / 3) + (1 / 6) * (2 / 3) + (1 / 6) * (1 / 3) + 0.0
        assert l1_step_vs_step(staircase, other) == pytest.approx(expected)

    def test_metric_properties(self, rng):
        steps = [
            build_pp_plot(SortedSample.from_values(rng.normal(size=20)), SortedSample.from_values(rng.normal(size=k)))
            for k in (7, 11, 13)
        ]
        a, b, c = steps
        assert l1_step_vs_step(a, a) == 0.0
        assert l1_step_vs_step(a, b) == pytest.approx(l1_step_vs_step(b, a))
        assert l1_step_vs_step(a, c) <= l1_step_vs_step(a, b) + l1_step_vs_step(b, c) + 1e-15

    def test_constants(self):
        assert l1_step_vs_step(StepFunction([1.0], [1.0]), StepFunction([1.0], [0.0])) == 1.0

    def test_half_staircase_against_constant(self):
        half = StepFunction([0.5, 1.0], [0.5, 1.0])
        assert l1_step_vs_step(half, StepFunction([1.0], [0.5])) == pytest.approx(0.25)

    def test_agrees_with_curve_version(self, rng):
        a = build_pp_plot(SortedSample.from_values(rng.normal(size=30)), SortedSample.from_values(rng.normal(size=9)))
        b = StepFunction([0.5, 1.0], [0.25, 0.75])
        assert l1_step_vs_step(a, b) == pytest.approx(l1_step_vs_curve(a, b), abs=1e-9)


class TestSupStepVsCurve:
    def test_staircase_against_identity(self, staircase):
        assert sup_step_vs_curve(staircase, IDENTITY) == pytest.approx(1 / 3)

    def test_zero_against_identity(self):
        assert sup_step_vs_curve(StepFunction([1.0], [0.0]), IDENTITY) == 1.0

    def test_single_point_empirical_cdf(self):
        assert sup_step_vs_curve(empirical_cdf_step([0.5]), IDENTITY) == pytest.approx(0.5)

    @pytest.mark.parametrize("closed", ["right", "left"])
    def test_piecewise_constant_curve_sampled_exactly(self, closed):
        step = StepFunction([0.25, 0.5, 1.0], [0.1, 0.4, 0.9], closed=closed)
        assert sup_step_vs_curve(step, step) == 0.0

    @pytest.mark.parametrize("closed", ["right", "left"])
    def test_constant_against_jumping_curve(self, closed):
        curve = StepFunction([0.25, 0.5, 1.0], [0.1, 0.4, 0.9], closed=closed)
        assert sup_step_vs_curve(StepFunction([1.0], [0.5]), curve) == pytest.approx(0.4)

    def test_curve_with_atoms(self):
        curve = PPCurve(Uniform(0.0, 1.0), DiscreteAtoms((0.0, 1.0), (0.5, 0.5)))
        assert sup_step_vs_curve(StepFunction([0.5, 1.0], [0.0, 1.0]), curve) == 0.0

    def test_not_below_grid_maximum(self, rng):
        x, y = rng.uniform(size=40), rng.uniform(size=25)
        plot = build_pp_plot(SortedSample.from_values(x), SortedSample.from_values(y))
        u = np.linspace(0.0, 1.0, 10001)
        assert sup_step_vs_curve(plot, IDENTITY) >= np.max(np.abs(plot(u) - u)) - 1e-15


class TestShiftModulus:
    def test_constant(self):
        assert shift_modulus_l1(GridFunction(np.full(64, 3.0)), 1 / 8) == 0.0

    def test_identity(self):
        h = 1 / 64
        g = GridFunction.from_function(lambda u: u, 512)
        assert shift_modulus_l1(g, h) == pytest.approx((1 - h) * h)

    def test_indicator(self):
        g = GridFunction.from_function(lambda u: (u > 0.5).astype(float), 4000)
        assert shift_modulus_l1(g, 0.2) == pytest.approx(0.2)

    @pytest.mark.parametrize("h", [1 / 100, 0.0, 1.0, 1.5])
    def test_rejects_bad_shift(self, h):
        with pytest.raises(DomainError):
            shift_modulus_l1(GridFunction(np.zeros(64)), h)

    def test_bounded_by_twice_the_norm(self, rng):
        g = GridFunction(rng.normal(size=256))
        for h in (1 / 256, 1 / 16, 1 / 2):
            assert shift_modulus_l1(g, h) <= 2.0 * g.l1_norm() + 1e-12


class TestGridFunction:
    def test_l1_norm(self):
        assert GridFunction([1.0, -3.0]).l1_norm() == 2.0

    def test_grid(self):
        np.testing.assert_allclose(GridFunction(np.zeros(4)).grid, [0.125, 0.375, 0.625, 0.875])

    @pytest.mark.parametrize("values", [[1.0], [1.0, math.nan], [[1.0, 2.0], [3.0, 4.0]]])
    def test_validation(self, values):
        with pytest.raises(DomainError):
            GridFunction(values)


class TestKsDistance:
    @pytest.mark.parametrize(
        "a, b, expected",
        [
            ([1, 2, 3], [1, 2, 3], 0.0),
            ([1, 2], [3, 4], 1.0),
            ([1, 2, 3, 4], [3, 4, 5, 6], 0.5),
            ([0.0], [0.0, 1.0], 0.5),
            ([1, 2], [1.5], 0.5),
        ],
    )
    def test_known_values(self, a, b, expected):
        assert ks_distance(a, b) == pytest.approx(expected)

    def test_against_brute_force(self, rng):
        a, b = rng.normal(size=37), rng.normal(0.3, 1.0, size=23)
        grid = np.concatenate((a, b))
        brute = max(abs(np.mean(a <= x) - np.mean(b <= x)) for x in grid)
        assert ks_distance(a, b) == pytest.approx(brute)

    def test_rejects_empty(self):
        with pytest.raises(DomainError):
            ks_distance([], [1.0])
