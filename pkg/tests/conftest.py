import numpy as np
import pytest

from diffcipher.algebra import DifferenceRing
from diffcipher.core.settings import DiffCipherSettings
from diffcipher.services.cipher import bivium, keeloq, lfsr_combiner, trivium


@pytest.fixture(scope="session")
def bivium_cipher():
    return bivium()


@pytest.fixture(scope="session")
def trivium_cipher():
    return trivium()


@pytest.fixture(scope="session")
def keeloq_cipher():
    return keeloq()


@pytest.fixture
def combiner():
    # a: 4-bit LFSR a(4) = a(0) + a(1); b: 5-bit LFSR b(5) = b(0) + b(2)
    return lfsr_combiner()


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def xyz():
    return DifferenceRing.over(2, ["x", "y", "z"])


@pytest.fixture
def settings():
    return DiffCipherSettings(guess_timeout_floor_ms=0, seed=7)
