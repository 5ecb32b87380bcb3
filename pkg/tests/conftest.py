import os
import sys

import pytest

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
if ROOT not in sys.path:
    sys.path.insert(0, ROOT)

from src.backend.algebra.groups import cyclic, symmetric  # noqa: E402
from src.backend.matroids.matroid import projective_plane, uniform  # noqa: E402


@pytest.fixture
def u23():
    return uniform(2, ["a", "b", "c"])


@pytest.fixture
def u12():
    return uniform(1, ["a", "b"])


@pytest.fixture(scope="session")
def fano():
    return projective_plane(2)


@pytest.fixture(scope="session")
def z4():
    return cyclic(4)


@pytest.fixture(scope="session")
def s3():
    return symmetric(3)
