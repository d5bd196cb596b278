"""
Sieve Service
Odd-only segmented sieve of Eratosthenes on numpy bool masks
"""

from math import isqrt
from typing import List, Optional, Tuple

import numpy as np
from joblib import Parallel, delayed

from primesums.core.config import settings
from primesums.core.errors import BoundTooLarge, InputError
from primesums.core.logger import get_logger
from primesums.models.domain import PrimeTable
from primesums.services.cache_service import CacheService, cache_service

logger = get_logger(__name__)


def simple_sieve(limit: int) -> np.ndarray:
    """Primes <= limit with a plain (unsegmented) sieve"""
    if limit < 2:
        return np.array([], dtype=np.int64)
    is_prime = np.ones(limit + 1, dtype=bool)
    is_prime[:2] = False
    for p in range(2, isqrt(limit) + 1):
        if is_prime[p]:
            is_prime[p * p :: p] = False
    return np.flatnonzero(is_prime).astype(np.int64)


def _sieve_segment(low: int, high: int, base: np.ndarray) -> np.ndarray:
    """
    Mark the odd numbers low, low+2, ..., < high that are prime

    low is odd; base holds the odd primes up to sqrt(high).
    """
    mask = np.ones((high - low + 1) // 2, dtype=bool)
    for p in base:
        p = int(p)
        p2 = p * p
        if p2 >= high:
            break
        start = max(p2, ((low + p - 1) // p) * p)
        if start % 2 == 0:
            start += p
        if start >= high:
            continue
        mask[(start - low) // 2 :: p] = False
    return mask


class SieveService:
    """
    Builds and caches PrimeTables

    Segments are sieved independently and may run on a thread pool; the
    result does not depend on the thread count.
    """

    def __init__(
        self,
        segment_size: Optional[int] = None,
        max_bound: Optional[int] = None,
        cache: Optional[CacheService] = None,
    ):
        self._segment_size = segment_size
        self._max_bound = max_bound
        self.cache = cache if cache is not None else cache_service

    @property
    def segment_size(self) -> int:
        return self._segment_size or settings.SIEVE_SEGMENT_SIZE

    @property
    def max_bound(self) -> int:
        return self._max_bound or settings.SIEVE_MAX_BOUND

    def segments(self, bound: int) -> List[Tuple[int, int]]:
        """Half-open odd ranges [low, high) covering 3..bound"""
        span = 2 * (self.segment_size // 2)
        result = []
        low = 3
        while low <= bound:
            high = min(low + span, bound + 1)
            result.append((low, high))
            low += span
        return result

    def sieve(self, bound: int, n_jobs: Optional[int] = None) -> PrimeTable:
        """
        Primes up to bound

        Args:
            bound: N >= 2
            n_jobs: Threads for segment sieving (default settings.THREADS)

        Returns:
            PrimeTable with membership of length N+1

        Example:
            >>> sieve_service.sieve(100).count()
            25
        """
        if isinstance(bound, bool) or int(bound) != bound or bound < 2:
            raise InputError("sieve bound must be an integer >= 2", bound=bound)
        bound = int(bound)
        if bound > self.max_bound:
            raise BoundTooLarge(
                f"sieve bound {bound} exceeds the configured limit {self.max_bound}",
                bound=bound,
                limit=self.max_bound,
            )

        cached = self.cache.get_table(bound)
        if cached is not None:
            return cached

        table = self._build(bound, n_jobs or settings.THREADS)
        self.cache.put_table(table)
        return table

    def _build(self, bound: int, n_jobs: int) -> PrimeTable:
        base = simple_sieve(isqrt(bound) + 1)
        odd_base = base[base > 2]
        ranges = self.segments(bound)
        logger.info(f"🔢 Sieving primes <= {bound:,} in {len(ranges)} segment(s)")

        if n_jobs > 1 and len(ranges) > 1:
            masks = Parallel(n_jobs=n_jobs, prefer="threads")(
                delayed(_sieve_segment)(low, high, odd_base) for low, high in ranges
            )
        else:
            masks = [_sieve_segment(low, high, odd_base) for low, high in ranges]

        membership = np.zeros(bound + 1, dtype=bool)
        membership[2] = True
        for (low, high), mask in zip(ranges, masks):
            membership[low:high:2] = mask

        table = PrimeTable(bound=bound, membership=membership)
        logger.info(f"✅ pi({bound:,}) = {table.count():,}")
        return table

    def is_prime(self, m: int) -> bool:
        return m >= 2 and m in self.sieve(max(m, 2))


# Global sieve instance
sieve_service = SieveService()


def sieve(bound: int) -> PrimeTable:
    return sieve_service.sieve(bound)
