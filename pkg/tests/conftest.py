"""Fixtures compartidas de las pruebas"""

import textwrap

import numpy as np
import pytest

from services.config_parser import parse_config
from services.geometry import Box, L2Ball, Simplex


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def box10():
    return Box(-np.ones(10), np.ones(10))


@pytest.fixture
def unit_ball():
    return L2Ball(np.zeros(3), 1.0)


@pytest.fixture
def simplex4():
    return Simplex(4)


@pytest.fixture
def make_config():
    """parse_config sobre texto indentado"""

    def _make(text: str):
        return parse_config(textwrap.dedent(text))

    return _make


@pytest.fixture
def linear_box_text():
    return textwrap.dedent(
        """\
        [problem]
        set = box
        dimension = 5

        [losses]
        kind = linear
        G = 1.0

        [delays]
        kind = fixed
        delay = 3

        [run]
        algorithm = dofw_convex
        T = 200
        base_seed = 7
        """
    )
