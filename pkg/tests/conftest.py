"""
Shared fixtures for the simulator test suites
"""
import sys
import os
import math

sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

import numpy as np
import pytest

from backend.app.schemas.schemas import SystemParams, TruncationPolicy
from backend.app.services.field_space import choose_truncation, coherent_coefficients

SQRT5 = math.sqrt(5.0)


def make_params(delta: float = 0.0, atom_ground_weight: float = 0.5,
                g: float = 1.0, omega_A: float = 1.0) -> SystemParams:
    return SystemParams(g=g, omega_A=omega_A, delta=delta, atom_ground_weight=atom_ground_weight)


def random_hermitian(rng: np.random.Generator, dim: int) -> np.ndarray:
    x = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return (x + x.conj().T) / 2.0


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def coherent_field():
    """|alpha = sqrt(5)> truncated by the default policy"""
    n_max = choose_truncation(SQRT5, TruncationPolicy())
    return coherent_coefficients(SQRT5, n_max)


@pytest.fixture(scope="session")
def wide_coherent_field():
    """|alpha = sqrt(5)> kept far past its tail, so the top level carries no weight"""
    return coherent_coefficients(SQRT5, 45)


@pytest.fixture
def resonant_mixed():
    return make_params(delta=0.0, atom_ground_weight=0.5)
