"""Shared fixtures: the expensive sampled paths are built once per session."""

import numpy as np
import pytest

from fracpath.partitions import badic, cantor_value_grid
from fracpath.paths import GaussianPathSpec, fbm_path, sample, takagi_path


@pytest.fixture(scope="session")
def fbm04():
    # rough regime, H < 1/2; also the path behind the ito-check fixtures
    return fbm_path(GaussianPathSpec(hurst=0.4, n=2**16, seed=2))


@pytest.fixture(scope="session")
def fbm08():
    # smooth regime for the isometry checks
    return fbm_path(GaussianPathSpec(hurst=0.8, n=2**14, seed=9))


@pytest.fixture(scope="session")
def cantor8():
    """(path, partition, k_n) of the stage-8 Cantor-distance crossing grid."""
    return cantor_value_grid(2.5, 8)


@pytest.fixture(scope="session")
def takagi_fine():
    """Takagi path (b=2, alpha=1/2, triangle) sampled on the level-16 grid."""
    return sample(takagi_path(2, 0.5, "triangle", depth=30), badic(1.0, 16).times)


@pytest.fixture()
def hand_path():
    """Small piecewise-linear path with both flat and steep segments."""
    t = np.linspace(0.0, 1.0, 11)
    v = np.array([0.0, 0.3, 0.55, 0.2, -0.4, 0.1, 0.35, 0.9, 0.62, 0.3, 0.05])
    from fracpath.paths import SampledPath

    return SampledPath(t, v)
