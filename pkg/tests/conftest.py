import numpy as np
import pytest


def random_density(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Random full-rank density matrix via a Ginibre draw."""
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def partial_trace_b(rho: np.ndarray, da: int, db: int) -> np.ndarray:
    """Trace out the second factor of a (da*db)-dimensional state."""
    return np.einsum("ikjk->ij", rho.reshape(da, db, da, db))


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
