import numpy as np
import pytest

from isospec import build_oscillator_basis, make_deformation, make_grid

DEFAULT_LAMBDAS = (-5.0, -1.5, 0.5, 1.0, 10.0)


@pytest.fixture(scope="session")
def grid():
    return make_grid(-12.0, 12.0, 4001)


@pytest.fixture(scope="session")
def basis(grid):
    return build_oscillator_basis(grid, 48)


@pytest.fixture(scope="session")
def deformation_cache(basis):
    cache = {}

    def get(lam):
        if lam not in cache:
            cache[lam] = make_deformation(basis, lam)
        return cache[lam]

    return get


def l2_distance(grid, f, g):
    diff = np.asarray(f) - np.asarray(g)
    return float(np.sqrt(grid.h * np.sum(np.abs(diff) ** 2)))
