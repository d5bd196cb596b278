"""
Representation Service
Exact ordered counts of n = p_1 + ... + p_k with p_i in P_i, and range scans
"""

import itertools
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from cachetools import LRUCache

from primesums.core.config import settings
from primesums.core.errors import BadK, BoundMismatch, InputError, TooLarge
from primesums.core.logger import get_logger
from primesums.models.domain import PrimeSubset
from primesums.services.convolution_service import convolution_service
from primesums.services.prime_set_service import (
    contains_odd_prime,
    lower_density_estimate,
    obstruction_classes,
)
from primesums.utils.helpers import fingerprint

logger = get_logger(__name__)

PARITIES = ("k", "even", "odd", "all")

_counts_cache: LRUCache = LRUCache(maxsize=4)


def _common_bound(subsets: Sequence[PrimeSubset]) -> int:
    if not subsets:
        raise BadK("need at least one subset", k=0)
    bounds = sorted({P.bound for P in subsets})
    if len(bounds) != 1:
        raise BoundMismatch("subsets must share one bound", bounds=bounds)
    return bounds[0]


# ============================================
# COUNTING
# ============================================

def kfold_counts(subsets: Sequence[PrimeSubset]) -> np.ndarray:
    """
    r(n) for every 0 <= n <= k*bound

    The product of the k indicator vectors, so entry n is the number of
    ordered tuples from P_1 x ... x P_k summing to n. Recent results are
    kept in a small LRU keyed by the membership bytes.

    Example:
        >>> P = subset_from_spec("all", 20)
        >>> int(kfold_counts([P, P])[10])
        3
    """
    _common_bound(subsets)
    key = fingerprint(*(P.membership for P in subsets))
    cached = _counts_cache.get(key)
    if cached is not None:
        logger.debug(f"💾 k-fold counts cache hit ({key[:12]})")
        return cached

    logger.info(f"🔢 Convolving {len(subsets)} subsets (bound {subsets[0].bound})")
    counts = convolution_service.convolve_many([P.membership.astype(np.int64) for P in subsets])
    counts.setflags(write=False)
    _counts_cache[key] = counts
    return counts


def count_kfold(subsets: Sequence[PrimeSubset], n: int) -> int:
    """
    Ordered representations of n as p_1 + ... + p_k with p_i in P_i

    Raises:
        BoundMismatch: mixed bounds, or n > k*bound
    """
    bound = _common_bound(subsets)
    k = len(subsets)
    if n > k * bound:
        raise BoundMismatch(f"n exceeds k*bound = {k * bound}", n=n, k=k, bound=bound)
    if n < 0:
        return 0
    return int(kfold_counts(subsets)[n])


def direct_count(subsets: Sequence[PrimeSubset], n: int) -> int:
    """Enumeration oracle: loop over the first k-1 subsets, look up the last"""
    _common_bound(subsets)
    firsts = [[int(p) for p in P.primes() if p <= n] for P in subsets[:-1]]
    work = 1
    for column in firsts:
        work *= max(len(column), 1)
    if work > settings.BRUTE_FORCE_LIMIT:
        raise TooLarge("direct enumeration exceeds BRUTE_FORCE_LIMIT", n=n, work=work)
    last = subsets[-1]
    total = 0
    for picks in itertools.product(*firsts):
        if n - sum(picks) in last:
            total += 1
    return total


def hypothesis_report(subsets: Sequence[PrimeSubset], k: Optional[int] = None) -> Dict[str, object]:
    """Finite-bound density estimates against the hypotheses of both theorems"""
    k = k or len(subsets)
    densities = [lower_density_estimate(P) for P in subsets]
    total = sum(densities, Fraction(0))
    single = len({fingerprint(P.membership) for P in subsets}) == 1
    return {
        "densities": densities,
        "density_sum": total,
        "sum_threshold": Fraction(k + 1, 2),
        "sum_exceeds": total > Fraction(k + 1, 2),
        "single_set": single,
        "single_above_half": single and densities[0] > Fraction(1, 2),
        "odd_prime": [contains_odd_prime(P) for P in subsets],
    }


# ============================================
# SCANS
# ============================================

def _admissible(lo: int, hi: int, k: int, parity: str) -> np.ndarray:
    ns = np.arange(lo, hi + 1, dtype=np.int64)
    if parity == "k":
        return ns[(ns - k) % 2 == 0]
    if parity == "even":
        return ns[ns % 2 == 0]
    if parity == "odd":
        return ns[ns % 2 == 1]
    return ns


def scan_theorem(subsets: Sequence[PrimeSubset], k: Optional[int] = None,
                 n_range: Optional[Tuple[int, int]] = None,
                 parity: str = "k") -> Tuple[pd.DataFrame, Dict[str, object]]:
    """
    Exact counts for every admissible n in a range, plus a summary

    Args:
        subsets: P_1..P_k, or a single subset used k times
        k: number of summands (defaults to len(subsets))
        n_range: inclusive (lo, hi); defaults to (2k, k*bound)
        parity: 'k' (n = k mod 2), 'even', 'odd' or 'all'

    Returns:
        (table with columns n, count; summary dict)

    Counts up to exact_up_to are exact for the full prime subsets. Above it
    only primes up to the bound take part, so the zero statistics
    (zero_count, largest_zero, the counts after it, zero_classes_mod3) cover
    the exact part only. The tail_* fields report the rest, and
    represented_through is the largest n before the first tail zero.
    """
    subsets = list(subsets)
    k = k or len(subsets)
    if len(subsets) == 1:
        subsets = subsets * k
    if len(subsets) != k:
        raise BadK("number of subsets must equal k", k=k, subsets=len(subsets))
    if parity not in PARITIES:
        raise InputError(f"unknown parity '{parity}'", parity=parity, parities=list(PARITIES))
    bound = _common_bound(subsets)
    lo, hi = n_range if n_range is not None else (2 * k, k * bound)
    if lo > hi:
        raise InputError("empty scan range", lo=lo, hi=hi)
    if hi > k * bound:
        raise BoundMismatch(f"scan range must stay within k*bound = {k * bound}", hi=hi, k=k, bound=bound)

    counts = kfold_counts(subsets)
    ns = _admissible(max(lo, 0), hi, k, parity)
    table = pd.DataFrame({"n": ns, "count": counts[ns].astype(np.int64)})

    exact_up_to = bound + 2 * (k - 1)
    certified = table[table["n"] <= exact_up_to]
    tail = table[table["n"] > exact_up_to]

    zeros = certified.loc[certified["count"] == 0, "n"]
    largest_zero = int(zeros.max()) if len(zeros) else None
    after = certified if largest_zero is None else certified[certified["n"] > largest_zero]

    zero_classes = []
    by_class = certified.groupby(certified["n"] % 3)["count"].max()
    for r, peak in by_class.items():
        if peak == 0:
            zero_classes.append(int(r))

    # a positive tail count is still a genuine representation
    tail_zeros = tail.loc[tail["count"] == 0, "n"]
    tail_first_zero = int(tail_zeros.min()) if len(tail_zeros) else None
    represented = table if tail_first_zero is None else table[table["n"] < tail_first_zero]
    represented_through = int(represented["n"].max()) if len(represented) else None

    summary = {
        "schema_version": settings.SCHEMA_VERSION,
        "k": k,
        "labels": [P.label for P in subsets],
        "bound": bound,
        "range": [int(lo), int(hi)],
        "parity": parity,
        "admissible": int(len(table)),
        "zero_count": int(len(zeros)),
        "largest_zero": largest_zero,
        "min_count_after": int(after["count"].min()) if len(after) else None,
        "median_count_after": float(after["count"].median()) if len(after) else None,
        "zero_classes_mod3": zero_classes,
        "obstruction_classes_mod3": obstruction_classes(subsets, 3),
        "exact_up_to": exact_up_to,
        "tail_admissible": int(len(tail)),
        "tail_zero_count": int(len(tail_zeros)),
        "tail_first_zero": tail_first_zero,
        "represented_through": represented_through,
        "hypotheses": hypothesis_report(subsets, k),
    }
    logger.info(
        f"✅ Scan k={k} over [{lo}, {hi}] ({parity}): {len(table)} admissible, "
        f"{len(zeros)} zero, largest zero {largest_zero}, represented through {represented_through}"
    )
    return table, summary


def scan_csv(table: pd.DataFrame) -> str:
    """CSV text with a leading schema comment"""
    return f"# schema_version={settings.SCHEMA_VERSION}\n" + table.to_csv(index=False, lineterminator="\n")


def residue_class_pattern(table: pd.DataFrame, m: int = 3) -> List[Dict[str, int]]:
    """Per residue class mod m: admissible n, zero counts, smallest count"""
    rows = []
    for r, group in table.groupby(table["n"] % m):
        rows.append({
            "residue": int(r),
            "admissible": int(len(group)),
            "zero": int((group["count"] == 0).sum()),
            "min_count": int(group["count"].min()),
        })
    return rows
