import math

import numpy as np
import pytest


def random_hermitian(d: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return (g + g.conj().T) / 2.0


def rotation_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Unitary composed from random two-level rotations and phases."""
    u = np.eye(d, dtype=np.complex128)
    for p in range(d - 1):
        for q in range(p + 1, d):
            theta = rng.uniform(0, 2 * math.pi)
            phi = rng.uniform(0, 2 * math.pi)
            g = np.eye(d, dtype=np.complex128)
            g[p, p] = math.cos(theta)
            g[q, q] = math.cos(theta)
            g[p, q] = math.sin(theta) * np.exp(1j * phi)
            g[q, p] = -math.sin(theta) * np.exp(-1j * phi)
            u = u @ g
    return u


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240817)
