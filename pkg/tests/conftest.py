"""Shared fixtures: the reference parameter point and small grids.

The reference point (beta=0, m=alpha=gamma=a=b=mu=nu=1 on [0, pi]) has
float-exact landmarks: u* = v* = 1, eigenvalues n^2, instability
threshold 4 attained at mode 1. Most oracle tests start from it.
"""

import math

import numpy as np
import pytest

from chemostab import GridDomain, ModelParams, equilibrium, neumann_eigenvalues

REFERENCE = dict(
    chi0=1.0, beta=0.0, m=1.0, alpha=1.0, gamma=1.0,
    a=1.0, b=1.0, mu=1.0, nu=1.0,
)


def make_params(**overrides) -> ModelParams:
    merged = {**REFERENCE, **overrides}
    return ModelParams(**merged)


@pytest.fixture
def reference_params() -> ModelParams:
    return make_params()


@pytest.fixture
def reference_eq(reference_params):
    return equilibrium(reference_params)


@pytest.fixture
def interval_pi() -> GridDomain:
    return GridDomain.interval(math.pi, 64)


@pytest.fixture
def spectrum_pi(interval_pi):
    return neumann_eigenvalues(interval_pi, 50)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
