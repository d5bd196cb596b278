"""
Test exact convolution (direct and NTT paths)
"""

import numpy as np
import pytest

from primesums.core.errors import TooLarge
from primesums.services.convolution_service import (
    ConvolutionService,
    convolution_service,
    convolve_exact,
    fold,
)


def test_convolve_small():
    assert convolve_exact([1, 1], [1, 1]).tolist() == [1, 2, 1]
    assert convolve_exact([], [1, 2]).tolist() == []


def test_prime_indicator_squared():
    ind = np.zeros(11, dtype=np.int64)
    ind[[2, 3, 5, 7]] = 1
    assert int(convolve_exact(ind, ind)[10]) == 3


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_ntt_matches_direct(seed):
    rng = np.random.default_rng(seed)
    u = rng.integers(-1000, 1000, size=int(rng.integers(65, 513)))
    v = rng.integers(-1000, 1000, size=int(rng.integers(65, 513)))
    ntt_only = ConvolutionService(direct_threshold=1)
    assert ntt_only.convolve_ntt(u, v).tolist() == ntt_only.convolve_direct(u, v).tolist()


@pytest.mark.slow
def test_ntt_matches_direct_on_a_thousand_vectors():
    rng = np.random.default_rng(2024)
    ntt_only = ConvolutionService(direct_threshold=1)
    for _ in range(1000):
        u = rng.integers(-10**6, 10**6, size=int(rng.integers(1, 513)))
        v = rng.integers(-10**6, 10**6, size=int(rng.integers(1, 513)))
        assert ntt_only.convolve_ntt(u, v).tolist() == ntt_only.convolve_direct(u, v).tolist()


def test_ntt_handles_nonnegative_indicators():
    rng = np.random.default_rng(5)
    u = (rng.random(3000) < 0.3).astype(np.int64)
    v = (rng.random(2000) < 0.3).astype(np.int64)
    assert convolution_service.convolve_ntt(u, v).tolist() == np.convolve(u, v).tolist()


def test_big_values_escalate_to_python_ints():
    big = [2**40] * 100
    out = convolution_service.convolve_exact(big, big)
    assert int(out[99]) == 100 * 2**80
    assert int(out[0]) == 2**80


def test_cyclic_and_fold():
    assert fold(np.array([1, 2, 3, 4, 5]), 3).tolist() == [5, 7, 3]
    assert convolution_service.convolve_cyclic([1, 1, 0], [0, 1, 1], 3).tolist() == [1, 1, 2]


def test_convolve_many():
    out = convolution_service.convolve_many([[1, 1], [1, 1], [1, 1]])
    assert out.tolist() == [1, 3, 3, 1]
    assert convolution_service.convolve_many([]).tolist() == [1]


def test_length_limit():
    small = ConvolutionService(max_length=10, output_limit=12)
    with pytest.raises(TooLarge):
        small.convolve_exact([1] * 8, [1] * 8)


def test_long_outputs_are_convolved_in_blocks():
    rng = np.random.default_rng(8)
    u = rng.integers(-50, 50, size=1000)
    v = rng.integers(0, 3, size=700)
    v[128:400] = 0
    blocked = ConvolutionService(max_length=300)
    out = blocked.convolve_exact(u, v)
    assert len(out) == 1699
    assert out.tolist() == blocked.convolve_direct(u, v).tolist()


def test_blocked_convolution_keeps_python_ints():
    big = [2**40] * 20
    out = ConvolutionService(max_length=8).convolve_exact(big, big)
    assert int(out[19]) == 20 * 2**80
    assert int(out[38]) == 2**80
