"""
Sumset Service
Sumsets on Z_m as rotating bitmasks, Cauchy-Davenport checks and
exact representation counts modulo N
"""

from fractions import Fraction
from math import ceil
from typing import Dict, Iterable, List, Optional, Sequence

import numpy as np
from joblib import Parallel, delayed
from sympy import isprime, primerange

from primesums.core.config import settings
from primesums.core.errors import EmptySet, HypothesisUnmet, InputError, NotPrime
from primesums.core.logger import get_logger
from primesums.services.convolution_service import convolution_service
from primesums.utils.helpers import to_fraction

logger = get_logger(__name__)


# ============================================
# SUMSETS
# ============================================

def _mask(values: Iterable[int], m: int) -> int:
    mask = 0
    for x in values:
        mask |= 1 << (int(x) % m)
    return mask


def _rotate(mask: int, shift: int, m: int, full: int) -> int:
    if shift == 0:
        return mask
    return ((mask << shift) | (mask >> (m - shift))) & full


def sumset(sets: Sequence[Iterable[int]], m: int) -> List[int]:
    """
    {x_1 + ... + x_k mod m : x_i in A_i}

    Example:
        >>> sumset([{1, 2}, {3, 4}], 7)
        [4, 5, 6]
    """
    if m < 1:
        raise InputError("modulus must be positive", m=m)
    masks = [_mask(s, m) for s in sets]
    if not masks or any(mask == 0 for mask in masks):
        raise EmptySet("sumset needs at least one set and every set must be nonempty", m=m)
    full = (1 << m) - 1
    acc = masks[0]
    for mask in masks[1:]:
        result = 0
        shift = 0
        bits = mask
        while bits:
            if bits & 1:
                result |= _rotate(acc, shift, m, full)
                if result == full:
                    break
            bits >>= 1
            shift += 1
        acc = result
    return [x for x in range(m) if (acc >> x) & 1]


def cauchy_davenport_check(p: int, sets: Sequence[Iterable[int]]) -> Dict[str, object]:
    """
    Compare |A_1 + ... + A_k| with min(p, sum |A_i| - k + 1)

    Returns:
        {"p", "k", "lhs", "rhs", "holds"}

    Example:
        >>> cauchy_davenport_check(7, [{1, 2}, {3, 4}])["holds"]
        True
    """
    if not isprime(p):
        raise NotPrime(f"{p} is not prime", p=p)
    reduced = [sorted({int(x) % p for x in s}) for s in sets]
    total = sumset(reduced, p)
    lhs = len(total)
    rhs = min(p, sum(len(s) for s in reduced) - len(reduced) + 1)
    holds = lhs >= rhs
    if not holds:
        logger.error(f"❌ Cauchy-Davenport failed for p={p}: |sumset|={lhs} < {rhs}")
    return {"p": p, "k": len(reduced), "lhs": lhs, "rhs": rhs, "holds": holds}


def random_cd_instance(rng: np.random.Generator, max_p: int, max_k: int):
    """Random prime p <= max_p and 2..max_k nonempty subsets of Z_p"""
    primes = list(primerange(2, max_p + 1))
    p = int(primes[rng.integers(len(primes))])
    k = int(rng.integers(2, max_k + 1))
    sets = []
    for _ in range(k):
        size = int(rng.integers(1, p + 1))
        sets.append(sorted(int(x) for x in rng.choice(p, size=size, replace=False)))
    return p, sets


def cauchy_davenport_run(instances: int, seed: int, max_p: int = 101, max_k: int = 5) -> Dict[str, object]:
    """Seeded random Cauchy-Davenport instances; every one must hold"""
    rng = np.random.Generator(np.random.Philox(key=seed))
    failures = []
    for index in range(instances):
        p, sets = random_cd_instance(rng, max_p, max_k)
        result = cauchy_davenport_check(p, sets)
        if not result["holds"]:
            failures.append({"instance": index, "p": p, "sets": sets, **result})
    logger.info(f"✅ Cauchy-Davenport: {instances - len(failures)}/{instances} instances hold")
    return {"instances": instances, "seed": seed, "max_p": max_p, "max_k": max_k,
            "holds_all": not failures, "failures": failures}


# ============================================
# REPRESENTATION COUNTS IN Z_N
# ============================================

def indicator(values: Iterable[int], N: int) -> np.ndarray:
    vec = np.zeros(N, dtype=np.int64)
    for x in values:
        vec[int(x) % N] = 1
    return vec


def representation_counts_modN(sets: Sequence[Iterable[int]], N: int) -> np.ndarray:
    """nu(n) for every n in Z_N: ordered tuples (x_i in X_i) with sum = n mod N"""
    if N < 1:
        raise InputError("N must be positive", N=N)
    vectors = [indicator(s, N) for s in sets]
    if not vectors:
        raise EmptySet("need at least one set")
    acc = vectors[0]
    for vec in vectors[1:]:
        acc = convolution_service.convolve_cyclic(acc, vec, N)
    return acc


def count_representations_modN(sets: Sequence[Iterable[int]], n: int, N: int) -> int:
    """
    Ordered count of tuples in X_1 x ... x X_k summing to n mod N

    Example:
        >>> count_representations_modN([{1, 2}, {3, 4}], 5, 7)
        2
    """
    return int(representation_counts_modN(sets, N)[n % N])


# ============================================
# VARNAVIDES-TYPE BOUND
# ============================================

def varnavides_theta(thetas: Sequence[Fraction]) -> Fraction:
    k = len(thetas)
    return min(min(thetas), (sum(thetas) - 1) / (3 * k - 5))


def varnavides_bound(thetas: Sequence, N: int) -> Dict[str, Fraction]:
    """
    theta^(2k-3) * N^(k-1) with theta = min(theta_i, (sum theta_i - 1)/(3k-5))

    Example:
        >>> varnavides_bound(["0.6", "0.6"], 53)["bound"]
        Fraction(53, 5)
    """
    values = [to_fraction(t) for t in thetas]
    k = len(values)
    if k < 2:
        raise HypothesisUnmet("need k >= 2 densities", k=k)
    if any(t <= 0 or t > 1 for t in values):
        raise HypothesisUnmet("densities must lie in (0, 1]", thetas=[str(t) for t in values])
    if sum(values) <= 1:
        raise HypothesisUnmet("densities must sum to more than 1", total=str(sum(values)))
    theta = varnavides_theta(values)
    if N <= 2 / theta**2:
        raise HypothesisUnmet(f"N must exceed 2/theta^2 = {2 / theta ** 2}", N=N, theta=str(theta))
    return {"theta": theta, "bound": theta ** (2 * k - 3) * Fraction(N) ** (k - 1)}


THETA_RANGES = {2: (0.6, 0.95), 3: (0.45, 0.9), 4: (0.4, 0.8)}


def _varnavides_instance(k: int, seed: int, index: int, max_N: int) -> Dict[str, object]:
    rng = np.random.Generator(np.random.Philox(key=[seed, index]))
    low, high = THETA_RANGES.get(k, (0.4, 0.8))
    thetas = [Fraction(int(rng.integers(round(low * 100), round(high * 100) + 1)), 100) for _ in range(k)]
    theta = varnavides_theta(thetas)
    floor = 2 / theta**2
    candidates = [p for p in primerange(int(floor) + 1, max_N + 1) if p > floor]
    if not candidates:
        return {"instance": index, "skipped": True, "thetas": thetas}
    N = int(candidates[int(rng.integers(len(candidates)))])
    sets = [
        rng.choice(N, size=ceil(t * N), replace=False).tolist()
        for t in thetas
    ]
    bound = varnavides_bound(thetas, N)["bound"]
    counts = representation_counts_modN(sets, N)
    low_n = int(np.argmin(counts))
    minimum = int(counts[low_n])
    return {
        "instance": index,
        "skipped": False,
        "N": N,
        "thetas": thetas,
        "theta": theta,
        "bound": bound,
        "min_count": minimum,
        "argmin": low_n,
        "holds": minimum >= bound,
    }


def varnavides_run(k: int, instances: int, seed: int, max_N: int = 500,
                   n_jobs: Optional[int] = None) -> Dict[str, object]:
    """
    Seeded property run: every n in Z_N has nu(n) >= theta^(2k-3) N^(k-1)

    Returns:
        {"k", "instances", "checked", "holds_all", "failures", "results"}
    """
    if k < 2:
        raise HypothesisUnmet("need k >= 2", k=k)
    jobs = n_jobs or settings.THREADS
    if jobs > 1:
        results = Parallel(n_jobs=jobs, prefer="threads")(
            delayed(_varnavides_instance)(k, seed, i, max_N) for i in range(instances)
        )
    else:
        results = [_varnavides_instance(k, seed, i, max_N) for i in range(instances)]
    checked = [r for r in results if not r["skipped"]]
    failures = [r for r in checked if not r["holds"]]
    logger.info(f"✅ Varnavides k={k}: {len(checked) - len(failures)}/{len(checked)} instances hold")
    return {
        "k": k,
        "seed": seed,
        "instances": instances,
        "checked": len(checked),
        "holds_all": not failures,
        "failures": failures,
        "results": results,
    }
