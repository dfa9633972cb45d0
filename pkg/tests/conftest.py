"""Shared meshes, materials and operator sets.

Expensive objects are session scoped; the tests never mutate them.
"""

from __future__ import annotations

import numpy as np
import pytest

from elastocq.bem import assemble_operators
from elastocq.harness import DEFAULT_EXTERIOR, ball_model
from elastocq.materials import IsotropicExterior
from elastocq.mesh import icosphere


@pytest.fixture(scope="session")
def unit_material():
    return IsotropicExterior(1.0, 1.0, 1.0)


@pytest.fixture(scope="session")
def sphere0():
    return icosphere(0)


@pytest.fixture(scope="session")
def sphere1():
    return icosphere(1)


@pytest.fixture(scope="session")
def ops1(sphere1, unit_material):
    """Galerkin operators on the level-1 icosphere at ``s = 1``."""
    return assemble_operators(sphere1, 1.0, unit_material)


@pytest.fixture(scope="session")
def model0():
    return ball_model(0)


@pytest.fixture(scope="session")
def model1():
    return ball_model(1)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def exterior():
    return DEFAULT_EXTERIOR
