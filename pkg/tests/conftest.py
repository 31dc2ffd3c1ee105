"""Shared rings and the catalog of example laws.

Laws are built once per session; the catalog spans the heights the checks
need: additive (infinite), unit F-action (height 1), shifted F-action
(height 2), and a two-dimensional mixed presentation (finite, height 4).
"""

import pytest

from cartier.dvr import make_ring
from cartier.fgl import FglPresentation, presentation_to_fgl, presentation_to_log


@pytest.fixture(scope="session")
def ring_z2():
    return make_ring(2, [2, 1], default_precision=20)


@pytest.fixture(scope="session")
def ring_32():
    return make_ring(3, [-3, 0, 1], default_precision=20)


def pres_additive(ring, m=1):
    return FglPresentation(ring, m, [])


def pres_multiplicative(ring):
    return FglPresentation(ring, 1, [[[1]]])


def pres_height2(ring):
    zero = [[0]]
    return FglPresentation(ring, 1, [zero, [[1]]])


def pres_mixed2d(ring):
    a0 = [[1, 0], [0, 0]]
    a1 = [[0, 1], [1, 0]]
    return FglPresentation(ring, 2, [a0, a1])


@pytest.fixture(scope="session")
def mult_z2(ring_z2):
    return presentation_to_fgl(pres_multiplicative(ring_z2), degree_cap=9)


@pytest.fixture(scope="session")
def mult_32(ring_32):
    return presentation_to_fgl(pres_multiplicative(ring_32), degree_cap=10)


@pytest.fixture(scope="session")
def height2_32(ring_32):
    return presentation_to_fgl(pres_height2(ring_32), degree_cap=10)


@pytest.fixture(scope="session")
def height2_z2(ring_z2):
    return presentation_to_fgl(pres_height2(ring_z2), degree_cap=9)


@pytest.fixture(scope="session")
def additive_z2(ring_z2):
    return presentation_to_fgl(pres_additive(ring_z2), degree_cap=9,
                               level_cap=3)


@pytest.fixture(scope="session")
def mixed2d_z2(ring_z2):
    return presentation_to_fgl(pres_mixed2d(ring_z2), degree_cap=6)


@pytest.fixture(scope="session")
def mult_log_32(ring_32):
    return presentation_to_log(pres_multiplicative(ring_32), level_cap=4)
