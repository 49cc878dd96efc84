import numpy as np
import pytest

from podrom import Cex1Params, Cex2Params, build_mesh, cex1, cex2, generate_snapshots


@pytest.fixture(scope="session")
def mesh256():
    return build_mesh(256)


@pytest.fixture(scope="session")
def mesh4096():
    return build_mesh(4096)


@pytest.fixture(scope="session")
def cex1_nodq(mesh4096):
    return generate_snapshots(cex1(Cex1Params(128)), mesh4096, 1.0, 16, with_dq=False)


@pytest.fixture(scope="session")
def cex1_dq(mesh4096):
    return generate_snapshots(cex1(Cex1Params(128)), mesh4096, 1.0, 16, with_dq=True)


@pytest.fixture(scope="session")
def cex2_small(mesh256):
    """cex2 at dt = 0.02 on [0, 0.2] (N = 10)."""
    return generate_snapshots(cex2(Cex2Params()), mesh256, 0.2, 10, with_dq=False)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
