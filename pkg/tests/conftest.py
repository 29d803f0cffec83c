import numpy as np
import pytest

from steercoh import states


def crandn(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def random_hermitian(rng, n):
    g = crandn(rng, n, n)
    return g + g.conj().T


def random_unitary(rng, n):
    q, r = np.linalg.qr(crandn(rng, n, n))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_density(rng, d, rank):
    x = crandn(rng, d, rank)
    m = x @ x.conj().T
    return m / np.trace(m).real


@pytest.fixture
def rng():
    return np.random.default_rng(20261017)


@pytest.fixture
def bell():
    return states.from_amplitudes((2, 2, 1), np.array([1, 0, 0, 1]) / np.sqrt(2))


@pytest.fixture
def ghz():
    amps = np.zeros(8)
    amps[0] = amps[7] = 1 / np.sqrt(2)
    return states.from_amplitudes((2, 2, 2), amps)
