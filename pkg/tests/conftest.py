"""
Shared fixtures
Environment is fixed before primesums is imported so settings pick it up
"""

import os

os.environ.setdefault("PRIMESUMS_USE_DISK_CACHE", "false")
os.environ.setdefault("PRIMESUMS_LOG_LEVEL", "WARNING")

import pytest

from primesums.services.prime_set_service import subset_from_spec


@pytest.fixture(scope="session")
def primes_20():
    return subset_from_spec("all", 20)


@pytest.fixture(scope="session")
def mod3_one_200():
    return subset_from_spec("mod3:1", 200)
