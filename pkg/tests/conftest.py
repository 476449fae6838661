from fractions import Fraction

import pytest
from hypothesis import settings

from mirrorcurve.graph import k4_graph, theta_graph

settings.register_profile("repo", max_examples=60, deadline=None)
settings.load_profile("repo")


@pytest.fixture
def theta():
    return theta_graph()


@pytest.fixture
def k4():
    return k4_graph()


def F(x):
    return Fraction(x)
