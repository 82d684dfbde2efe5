import numpy as np
import pytest

from aahbath.bath import BathSpec
from aahbath.lattice import GOLDEN, LatticeSpec, build_lattice, eigensystem


def chain(delta=2.0, beta=1.0 / 3.0, phi=-np.pi, n_sites=99, boundary="open"):
    spec = LatticeSpec(n_sites, delta, beta, phi, boundary)
    return spec, eigensystem(build_lattice(spec))


@pytest.fixture(scope="session")
def default_bath():
    return BathSpec()


@pytest.fixture(scope="session")
def fig1():
    """beta = 1/3, delta = 2, phi = -pi, N = 99, open."""
    return chain()


@pytest.fixture(scope="session")
def golden():
    return GOLDEN
