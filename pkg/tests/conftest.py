from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from primelab.constrained import enumerate_rmc
from primelab.sieve import generate_primes


@pytest.fixture(scope="session")
def b100():
    return generate_primes(100)


@pytest.fixture(scope="session")
def b400():
    return generate_primes(400)


@pytest.fixture(scope="session")
def b1000():
    return generate_primes(1000)


@pytest.fixture(scope="session")
def b200():
    return generate_primes(200)


@pytest.fixture(scope="session")
def rmc40(b200):
    """Depth-40 enumeration, shared by the constrained-model tests."""
    return enumerate_rmc(40, b200)
