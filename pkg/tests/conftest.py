from pathlib import Path

import numpy as np
import pytest

from cat_swarm_bench.harness import Protocol
from cat_swarm_bench.objective_suite import Objective, sphere

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def zero_box():
    """Esfera en una caja de ancho cero: el único punto es el origen."""
    return Objective(name="F1", dim=2, lower=np.zeros(2), upper=np.zeros(2), f_min=0.0, func=sphere)


@pytest.fixture
def tiny_protocol():
    return Protocol(
        n_runs=2,
        n_agents=6,
        max_iters=8,
        function_ids=("F1", "F16"),
        algorithm_ids=("cso", "random"),
        master_seed=7,
        dim=3,
    )
