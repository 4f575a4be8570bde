import pytest

from anypath_vne.scenario import example_fixture


@pytest.fixture
def example():
    """(substrate, request, coefficients) of the built-in worked example."""
    return example_fixture()


@pytest.fixture
def example_net(example):
    return example[0]


@pytest.fixture
def example_request(example):
    return example[1]


@pytest.fixture
def example_coeffs(example):
    return example[2]
