from fractions import Fraction

import pytest

from faberlab.conformal import lemniscate_map, two_corner_map


@pytest.fixture(scope="session")
def lem2():
    return lemniscate_map(2)


@pytest.fixture(scope="session")
def lem3():
    return lemniscate_map(3)


@pytest.fixture(scope="session")
def corner34():
    return two_corner_map(Fraction(3, 4))
