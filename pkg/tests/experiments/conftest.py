import pytest

from ppcurve.experiments.config import ExperimentConfig


@pytest.fixture
def quick_config():
    """Smallest configuration the experiment runners accept."""
    return ExperimentConfig(
        n_list=(16, 32),
        replicates=100,
        bootstrap_b=100,
        grid_size=64,
        shift=1 / 16,
        limit_draws=500,
        master_seed=11,
    )
