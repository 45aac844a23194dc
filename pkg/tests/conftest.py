import pytest
from hypothesis import settings

from productline import ModelParams

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@pytest.fixture
def fig_params():
    """The running example: v_L = 0.75, v_H = 1, c = 2."""
    return ModelParams.create(0.75, 1.0, 2.0)


def make(mu, c, v_H=1.0):
    return ModelParams.create(mu * v_H, v_H, c)
