import numpy as np
import pytest

from treebellman import Params


def make_params_grid(seed, count, p_max=6.0, u_min=0.05, k_max=0.98):
    """Random feasible instances: F derived from U = f^p/F so every draw
    satisfies the Hoelder constraint with margin."""
    rng = np.random.default_rng(seed)
    grid = []
    for _ in range(count):
        p = float(rng.uniform(1.1, p_max))
        f = float(np.exp(rng.uniform(np.log(0.2), np.log(5.0))))
        U = float(rng.uniform(u_min, 0.98))
        k = float(rng.uniform(0.05, k_max))
        grid.append(Params(p, f, f**p / U, k))
    return grid


@pytest.fixture(scope="session")
def params_grid():
    # shared, moderately sized; the acceptance suite builds its own >=200
    return make_params_grid(20260817, 60)
