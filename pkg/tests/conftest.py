"""Shared fixtures: the three registers at the default 0.5 T field."""

import numpy as np
import pytest

from nvsync import SystemSpec, build_rwa_model


@pytest.fixture(scope="session")
def n15():
    return SystemSpec(register="N15")


@pytest.fixture(scope="session")
def n15_model(n15):
    return build_rwa_model(n15, {"N": -0.5})


@pytest.fixture(scope="session")
def n14():
    return SystemSpec(register="N14")


@pytest.fixture(scope="session")
def n12():
    return SystemSpec(register="N14_C13")


def random_unitary(rng: np.random.Generator, dim: int) -> np.ndarray:
    """Haar-ish unitary: QR of a complex Gaussian with phase-fixed R."""
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))
