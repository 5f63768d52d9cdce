"""Shared fixtures and the --runslow switch for desk-scale experiments"""

import numpy as np
import pytest

from epdiff_spectral.spectral import FrequencyGrid, SpectralField


def pytest_addoption(parser):
    parser.addoption(
        "--runslow",
        action="store_true",
        default=False,
        help="run the desk-scale acceptance experiments (minutes)",
    )


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def random_field():
    """Factory for exactly Hermitian random fields with algebraic decay"""

    def make(d, R, ncomp=None, seed=0, decay=2.0):
        rng = np.random.default_rng(seed)
        grid = FrequencyGrid(d=d, R=R)
        ncomp = d if ncomp is None else ncomp
        shape = (ncomp, grid.size)
        w = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
        w = w * (1.0 + grid.squared_norms()) ** (-decay / 2.0)
        return SpectralField(grid=grid, coeffs=0.5 * (w + np.conj(w[:, ::-1])))

    return make


@pytest.fixture
def complex_field():
    """Factory for random fields without any symmetry"""

    def make(d, R, ncomp=1, seed=0):
        rng = np.random.default_rng(seed)
        grid = FrequencyGrid(d=d, R=R)
        shape = (ncomp, grid.size)
        return SpectralField(
            grid=grid, coeffs=rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
        )

    return make
