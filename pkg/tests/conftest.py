import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from iteig.profiles import ConstantProfile, SmoothBumpProfile


@pytest.fixture(scope="session")
def const4():
    return ConstantProfile(4.0)


@pytest.fixture(scope="session")
def const1():
    return ConstantProfile(1.0)


@pytest.fixture(scope="session")
def bump3():
    return SmoothBumpProfile(3.0)


@pytest.fixture(scope="session", autouse=True)
def _warm_jit(const4):
    # Pay the numba compilation cost before any timed assertion runs.
    from iteig.radial import solve_y
    solve_y(const4, 1.0)
    solve_y(const4, 1.0, want_dk=True)
