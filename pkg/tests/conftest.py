import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from parabolab.bumps import DyadicPartition, standard_bump
from parabolab.grid import GridFunction2D, make_grid


@pytest.fixture(scope="session")
def phi():
    return standard_bump()


@pytest.fixture(scope="session")
def partition():
    return DyadicPartition()


@pytest.fixture
def grid32():
    return make_grid(8.0, 8.0, 32, 32)


@pytest.fixture
def grid64():
    return make_grid(8.0, 8.0, 64, 64)


def bandlimited(grid, seed, m_bins=None, p_cut=None):
    """Real random function, y-spectrum on the unit plateau band, smooth in x."""
    rng = np.random.default_rng(seed)
    eta = grid.freq_y
    if m_bins is None:
        m_bins = np.flatnonzero((np.abs(eta) >= 1.0) & (np.abs(eta) <= 2.0))
    if p_cut is None:
        p_cut = max(3, grid.nx // 8)
    spec = np.zeros((grid.nx, grid.ny), dtype=complex)
    ps = np.arange(-p_cut, p_cut + 1)
    env = np.exp(-((ps / max(2, p_cut / 2)) ** 2))
    for m in m_bins:
        spec[ps % grid.nx, m] = env * (rng.standard_normal(ps.size)
                                       + 1j * rng.standard_normal(ps.size))
    full = spec + np.conj(spec[(-np.arange(grid.nx)) % grid.nx, :]
                          [:, (-np.arange(grid.ny)) % grid.ny])
    vals = np.fft.ifft2(full)
    vals = vals / np.abs(vals).max()
    return GridFunction2D(grid, vals)
