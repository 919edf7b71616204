import pytest

from rmsopt.model import (
    ProblemInstance,
    ProductionMix,
    StochasticParams,
    Task,
    Variant,
)
from rmsopt.simulation import SimulationConfig


def make_toy_instance() -> ProblemInstance:
    """Two stations, one variant, four tasks in a diamond (a->b, a->c, b,c->d).

    Deterministic dynamics, small buffer range: the whole configuration space
    is enumerable (2 resource splits x 6 monotone assignments x 10 buffers).
    """
    times = (30.0, 20.0, 25.0, 15.0)
    tasks = tuple(Task(f"t{i + 1}", t) for i, t in enumerate(times))
    prec = [
        [0, 1, 1, 0],
        [0, 0, 0, 1],
        [0, 0, 0, 1],
        [0, 0, 0, 0],
    ]
    tr = [[1] * 4, [1] * 4]
    return ProblemInstance(
        num_stations=2,
        variants=(Variant("v1", tasks, prec, tr),),
        total_resources=3,
        min_resources_per_ws=1,
        max_resources_per_ws=2,
        buffer_min=1,
        buffer_max=10,
        buffer_unit=1,
        stochastic=StochasticParams(),
        mix=ProductionMix((1.0,)),
    )


def make_toy_sim(seed: int = 0) -> SimulationConfig:
    return SimulationConfig(horizon=7200.0, warmup=600.0, replications=1, seed=seed)


@pytest.fixture(scope="session")
def toy_instance():
    return make_toy_instance()


@pytest.fixture(scope="session")
def toy_sim():
    return make_toy_sim()
