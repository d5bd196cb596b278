"""
Test squarefree arithmetic, CRT and the prime sieve
"""

from math import gcd

import numpy as np
import pytest
from sympy import isprime

from primesums.core.errors import BadFactor, BoundTooLarge, InputError, NotCoprime, NotSquarefree
from primesums.models.domain import PrimeTable
from primesums.services.arithmetic_service import (
    crt_merge,
    crt_split,
    factor_squarefree,
    is_squarefree,
    primorial,
    totient,
    units,
)
from primesums.services.cache_service import CacheService
from primesums.services.sieve_service import SieveService, sieve_service, simple_sieve


# ============================================
# Squarefree moduli
# ============================================

def test_factor_squarefree_examples():
    one = factor_squarefree(1)
    assert (one.q, one.factors, one.totient) == (1, (), 1)

    fifteen = factor_squarefree(15)
    assert fifteen.factors == (3, 5)
    assert fifteen.totient == 8

    with pytest.raises(NotSquarefree):
        factor_squarefree(12)


def test_units_examples():
    assert units(factor_squarefree(3)) == (1, 2)
    assert units(factor_squarefree(15)) == (1, 2, 4, 7, 8, 11, 13, 14)
    assert units(factor_squarefree(2)) == (1,)
    assert units(factor_squarefree(1)) == (0,)


def test_units_match_totient():
    for q in range(2, 300):
        if not is_squarefree(q):
            continue
        listed = units(factor_squarefree(q))
        assert len(listed) == totient(q)
        assert all(gcd(u, q) == 1 for u in listed)


def test_totient_multiplicative():
    for q1 in (1, 2, 3, 5, 6, 7, 10, 15, 21, 30):
        for p in (2, 3, 5, 7, 11, 13):
            if q1 % p:
                assert totient(q1 * p) == totient(q1) * (p - 1)


def test_primorial():
    assert primorial(0.657) == 1
    assert primorial(4) == 6
    assert primorial(7) == 210


# ============================================
# CRT
# ============================================

def test_crt_examples():
    assert crt_split(7, factor_squarefree(15), 5) == (1, 2)
    assert crt_split(0, factor_squarefree(6), 3) == (0, 0)
    assert crt_merge(1, 2, 3, 5) == 7
    assert crt_merge(0, 0, 3, 5) == 0

    with pytest.raises(BadFactor):
        crt_split(11, factor_squarefree(6), 4)
    with pytest.raises(NotCoprime):
        crt_merge(1, 1, 3, 6)


@pytest.mark.parametrize("q", [6, 30, 105, 1155, 2310])
def test_crt_merge_inverts_split(q):
    m = factor_squarefree(q)
    for p in m.factors:
        for x in range(q):
            a, b = crt_split(x, m, p)
            assert crt_merge(a, b, q // p, p) == x


# ============================================
# Sieve
# ============================================

def test_sieve_small_bounds():
    assert sieve_service.sieve(10).primes().tolist() == [2, 3, 5, 7]
    assert sieve_service.sieve(100).count() == 25


def test_sieve_million():
    assert sieve_service.sieve(10**6).count() == 78498


def test_sieve_agrees_with_trial_division():
    table = sieve_service.sieve(10**4)
    expected = [n for n in range(10**4 + 1) if isprime(n)]
    assert table.primes().tolist() == expected


def test_segmented_matches_simple_sieve():
    service = SieveService(segment_size=1024, cache=CacheService(use_disk=False))
    table = service.sieve(20000)
    assert table.primes().tolist() == simple_sieve(20000).tolist()


def test_threaded_sieve_is_deterministic():
    service = SieveService(segment_size=1024, cache=CacheService(use_disk=False))
    serial = service._build(30000, 1)
    threaded = service._build(30000, 4)
    assert np.array_equal(serial.membership, threaded.membership)


def test_sieve_rejects_bad_bounds():
    with pytest.raises(InputError):
        sieve_service.sieve(1)
    service = SieveService(max_bound=1000, cache=CacheService(use_disk=False))
    with pytest.raises(BoundTooLarge):
        service.sieve(1001)


# ============================================
# Bit-vector files and the cache
# ============================================

def test_prime_table_file_layout(tmp_path):
    table = sieve_service.sieve(100)
    path = table.save(tmp_path / "primes.bits")
    raw = path.read_bytes()
    assert int.from_bytes(raw[:8], "little") == 100
    assert len(raw) == 8 + 13

    loaded = PrimeTable.load(path)
    assert loaded.bound == 100
    assert np.array_equal(loaded.membership, table.membership)


def test_cache_serves_smaller_bounds_and_disk(tmp_path):
    cache = CacheService(max_size=2, cache_dir=tmp_path, use_disk=True)
    service = SieveService(cache=cache)
    service.sieve(1000)
    assert cache.get_stats()["misses"] == 1

    assert service.sieve(500).count() == 95
    assert cache.get_stats()["hits"] == 1

    fresh = CacheService(max_size=2, cache_dir=tmp_path, use_disk=True)
    assert fresh.get_table(1000).count() == 168
    assert fresh.get_stats()["hits"] == 1


def test_cache_unique_ids_are_stable():
    cache = CacheService(use_disk=False)
    assert cache.generate_unique_id({"bound": 100}) == cache.generate_unique_id({"bound": 100})
    assert cache.generate_unique_id({"bound": 100}) != cache.generate_unique_id({"bound": 101})
