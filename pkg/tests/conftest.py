"""Shared potentials and test data."""

import pytest

from weylspec.coeffs import make_builtin_potential
from weylspec.grids import gaussian


@pytest.fixture(scope="module")
def free():
    return make_builtin_potential("free")


@pytest.fixture(scope="module")
def well():
    return make_builtin_potential("capped_well", [1.0, 5.0, 0.1])


@pytest.fixture(scope="module")
def exp_decay():
    return make_builtin_potential("exp_decay", [0.5, 1.0])


@pytest.fixture(scope="module")
def exp_metric():
    return make_builtin_potential("exp_metric", [0.5, 1.0])


@pytest.fixture(scope="module")
def bump():
    return gaussian(5.0, 0.7, dx=0.01)
