import numpy as np
import pytest
import scipy.stats


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def haar(dim, seed):
    """Independent Haar sampler (scipy), not the package's PRNG."""
    return scipy.stats.unitary_group.rvs(dim, random_state=seed)


def random_hermitian(dim, rng):
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return (a + a.conj().T) / 2
