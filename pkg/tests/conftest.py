import pytest

from meandim_lab import build_extremal_curve
from meandim_lab.nevanlinna import extremal_handle
from meandim_lab.numerics import QuadratureConfig, integrate_parallelogram


@pytest.fixture(scope="session")
def curve():
    return build_extremal_curve()


@pytest.fixture(scope="session")
def handle(curve):
    return extremal_handle(curve)


@pytest.fixture(scope="session")
def cell_energy(curve):
    return integrate_parallelogram(curve.density, curve.lattice,
                                   QuadratureConfig())
