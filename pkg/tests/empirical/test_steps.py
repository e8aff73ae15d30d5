import numpy as np
import pytest

from ppcurve.empirical.steps import StepFunction
from ppcurve.errors import DomainError


@pytest.fixture
def staircase():
    return StepFunction([0.25, 0.5, 1.0], [0.1, 0.4, 0.9])


class TestStepFunction:
    def test_right_closed_cells(self, staircase):
        assert staircase.evaluate(0.0) == 0.1
        assert staircase.evaluate(0.25) == 0.1
        assert staircase.evaluate(0.2500001) == 0.4
        assert staircase.evaluate(0.5) == 0.4
        assert staircase.evaluate(1.0) == 0.9

    def test_left_closed_cells(self, staircase):
        step = staircase.with_closure("left")
        assert step.evaluate(0.0) == 0.1
        assert step.evaluate(0.25) == 0.4
        assert step.evaluate(0.5) == 0.9
        assert step.evaluate(1.0) == 0.9

    def test_vector_evaluation(self, staircase):
        np.testing.assert_array_equal(staircase([0.1, 0.3, 0.7]), [0.1, 0.4, 0.9])

    def test_cells_and_integral(self, staircase):
        cells = staircase.cells
        np.testing.assert_array_equal(cells.lo, [0.0, 0.25, 0.5])
        np.testing.assert_array_equal(cells.widths, [0.25, 0.25, 0.5])
        assert staircase.integral() == pytest.approx(0.25 * 0.1 + 0.25 * 0.4 + 0.5 * 0.9)

    def test_arrays_read_only(self, staircase):
        with pytest.raises(ValueError):
            staircase.values[0] = 1.0

    def test_nondecreasing(self, staircase):
        assert staircase.is_nondecreasing()
        assert not StepFunction([0.5, 1.0], [1.0, 0.0]).is_nondecreasing()

    @pytest.mark.parametrize("u", [-0.1, 1.1])
    def test_outside_unit_interval(self, staircase, u):
        with pytest.raises(DomainError):
            staircase(u)

    @pytest.mark.parametrize(
        "breakpoints, values, closed",
        [
            ([], [], "right"),
            ([0.5, 1.0], [0.1], "right"),
            ([0.5, 0.9], [0.1, 0.2], "right"),
            ([0.0, 1.0], [0.1, 0.2], "right"),
            ([0.5, 0.5, 1.0], [0.1, 0.2, 0.3], "right"),
            ([0.5, 1.0], [0.1, np.nan], "right"),
            ([0.5, 1.0], [0.1, 0.2], "both"),
        ],
    )
    def test_validation(self, breakpoints, values, closed):
        with pytest.raises(DomainError):
            StepFunction(breakpoints, values, closed=closed)
