import pytest
from hypothesis import HealthCheck, settings

from tilekit.builder import KoszulSpec, build_box_code, build_tile_code
from tilekit.logicals import build_basis
from tilekit.poly import TilePair
from tilekit.quotient import quotient_ring

settings.register_profile(
    "default", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

RUNNING = ("1+x^2*y+x^2*y^2", "x+x^2+y^2", 2)
TOY = ("1+y+x*y", "1+x+x*y", 1)
POLYS_4D = (
    "1+x*y+w*y*z+w*x*z+x",
    "x*z+w+w*x*y+w*x*y*z+z",
    "y*z+x+w*z+w*y+w*x*y",
    "z+y+x*y*z+w*x+w*x*z",
)
# variable order is x, y, z, w; these are the signs (+, +, -, -) on (w, x, y, z)
SIGNS_4D = (1, -1, -1, 1)


@pytest.fixture(scope="session")
def running_tiles():
    return TilePair.parse(*RUNNING)


@pytest.fixture(scope="session")
def running_code(running_tiles):
    return build_tile_code(running_tiles, 12, 12)


@pytest.fixture(scope="session")
def running_basis(running_code):
    return build_basis(running_code)


@pytest.fixture(scope="session")
def running_q(running_tiles):
    return quotient_ring(running_tiles.f, running_tiles.g, running_tiles.D)


@pytest.fixture(scope="session")
def toy_tiles():
    return TilePair.parse(*TOY)


@pytest.fixture(scope="session")
def toy_code(toy_tiles):
    return build_tile_code(toy_tiles, 3, 3)


@pytest.fixture(scope="session")
def code_4d():
    return build_box_code(KoszulSpec.parse(POLYS_4D, (3, 3, 3, 3), SIGNS_4D, D=1))
