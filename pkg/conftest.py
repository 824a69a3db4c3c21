import numpy as np
import pytest

from quantum.condsim import random_pauli_ensemble
from quantum.opcore import random_density_matrix


@pytest.fixture
def rng():
    """Seeded generator, fresh for every test."""
    return np.random.default_rng(42)


@pytest.fixture
def random_state(rng):
    """Factory for random density matrices drawn from the shared generator."""

    def make(d, rank=None, dims=None, labels=None):
        return random_density_matrix(d, rng, rank=rank, dims=dims, labels=labels)

    return make


@pytest.fixture
def random_ensemble(rng):
    """Factory for random ensembles of qubit Pauli channels."""

    def make(n):
        return random_pauli_ensemble(n, rng)

    return make


@pytest.fixture
def tol():
    return 1e-9
