"""
Prime Set Service
Construction and measurement of density-restricted prime subsets
"""

from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from primesums.core.errors import BadK, BadSubsetSpec, EmptyResidues, InputError, NotPrime
from primesums.core.logger import get_logger
from primesums.models.domain import PrimeSubset, PrimeTable
from primesums.services.sieve_service import sieve_service
from primesums.services.sumset_service import sumset
from primesums.utils.helpers import to_fraction
from primesums.utils.validators import parse_int_list, require_residues, require_unit_interval

logger = get_logger(__name__)

SHARPNESS_KINDS = ("shifted-mod3", "empty-last")


def _table(bound: int, table: Optional[PrimeTable]) -> PrimeTable:
    if table is None:
        return sieve_service.sieve(bound)
    if table.bound == bound:
        return table
    return table.restrict(bound)


# ============================================
# CONSTRUCTORS
# ============================================

def all_primes(bound: int, table: Optional[PrimeTable] = None) -> PrimeSubset:
    primes = _table(bound, table)
    return PrimeSubset(bound=bound, membership=primes.membership.copy(), label="all")


def empty_subset(bound: int) -> PrimeSubset:
    return PrimeSubset(bound=bound, membership=np.zeros(bound + 1, dtype=bool), label="empty")


def congruence_subset(bound: int, m: int, residues: Iterable[int],
                      table: Optional[PrimeTable] = None) -> PrimeSubset:
    """
    {p <= bound prime : p mod m in R}

    Example:
        >>> congruence_subset(50, 3, {1}).primes().tolist()
        [7, 13, 19, 31, 37, 43]
    """
    residues = list(residues)
    if not residues:
        raise EmptyResidues("residue set is empty", m=m)
    if m < 1:
        raise InputError("modulus must be positive", m=m)
    residues = require_residues(residues, m)
    primes = _table(bound, table)
    classes = np.arange(bound + 1, dtype=np.int64) % m
    membership = primes.membership & np.isin(classes, residues)
    return PrimeSubset(bound=bound, membership=membership, label=f"mod{m}:{','.join(map(str, residues))}")


def random_density_subset(bound: int, alpha, seed: int,
                          table: Optional[PrimeTable] = None) -> PrimeSubset:
    """
    Each prime kept independently with probability alpha

    Uses a counter-based Philox stream keyed by the seed, one uniform per
    integer in [0, bound], so the subset depends only on (bound, alpha, seed).
    """
    alpha = require_unit_interval(to_fraction(alpha), "alpha", open_right=False)
    if seed is None or int(seed) < 0:
        raise InputError("a nonnegative seed is required", seed=seed)
    primes = _table(bound, table)
    rng = np.random.Generator(np.random.Philox(key=int(seed)))
    draws = rng.random(bound + 1)
    membership = primes.membership & (draws < float(alpha))
    return PrimeSubset(bound=bound, membership=membership, label=f"random:{alpha}:{seed}")


def finite_subset(bound: int, primes: Iterable[int]) -> PrimeSubset:
    """Finite prime set; finite P_i are allowed as long as the densities add up"""
    values = sorted(set(int(p) for p in primes))
    table = sieve_service.sieve(max(bound, 2))
    bad = [p for p in values if p not in table]
    if bad:
        raise NotPrime(f"{bad[0]} is not a prime <= {bound}", values=bad)
    membership = np.zeros(bound + 1, dtype=bool)
    membership[values] = True
    return PrimeSubset(bound=bound, membership=membership, label=f"finite:{','.join(map(str, values))}")


def restrict_subset(P: PrimeSubset, bound: int) -> PrimeSubset:
    if bound > P.bound:
        raise InputError("cannot extend a subset past its bound", bound=bound, subset_bound=P.bound)
    return PrimeSubset(bound=bound, membership=P.membership[: bound + 1].copy(), label=P.label)


def _drop(P: PrimeSubset, mask: np.ndarray, suffix: str) -> PrimeSubset:
    return PrimeSubset(bound=P.bound, membership=P.membership & ~mask, label=f"{P.label}&{suffix}")


def _base_from_spec(part: str, bound: int, table: Optional[PrimeTable]) -> PrimeSubset:
    if part == "all":
        return all_primes(bound, table)
    if part == "empty":
        return empty_subset(bound)
    if part.startswith("mod"):
        modulus, _, residues = part[3:].partition(":")
        return congruence_subset(bound, int(modulus), parse_int_list(residues, "residues"), table)
    if part.startswith("random:"):
        _, alpha, seed = part.split(":")
        return random_density_subset(bound, alpha, int(seed), table)
    if part.startswith("finite:"):
        return finite_subset(bound, parse_int_list(part[len("finite:"):], "primes"))
    if part.startswith("exclude:"):
        full = all_primes(bound, table)
        mask = np.zeros(bound + 1, dtype=bool)
        mask[[p for p in parse_int_list(part[len("exclude:"):]) if 0 <= p <= bound]] = True
        return PrimeSubset(bound=bound, membership=full.membership & ~mask, label=part)
    raise BadSubsetSpec(f"unknown subset spec '{part}'", spec=part)


def subset_from_spec(spec: str, bound: int, table: Optional[PrimeTable] = None) -> PrimeSubset:
    """
    Build a subset from a compact text spec

    Specs: all | empty | mod<m>:<r,...> | random:<alpha>:<seed> |
    finite:<p,...> | exclude:<p,...>; further parts joined with '&' filter
    the first: nosmall:<x> drops primes <= x, exclude:<p,...> drops the
    listed primes, any other spec intersects.

    Example:
        >>> subset_from_spec("mod3:1&nosmall:10", 50).primes().tolist()
        [13, 19, 31, 37, 43]
    """
    parts = [p.strip() for p in str(spec).split("&") if p.strip()]
    if not parts:
        raise BadSubsetSpec("empty subset spec", spec=spec)
    try:
        subset = _base_from_spec(parts[0], bound, table)
        for part in parts[1:]:
            if part.startswith("nosmall:"):
                cutoff = int(part[len("nosmall:"):])
                mask = np.arange(bound + 1) <= cutoff
                subset = _drop(subset, mask, part)
            elif part.startswith("exclude:"):
                mask = np.zeros(bound + 1, dtype=bool)
                mask[[p for p in parse_int_list(part[len("exclude:"):]) if 0 <= p <= bound]] = True
                subset = _drop(subset, mask, part)
            else:
                other = _base_from_spec(part, bound, table)
                subset = PrimeSubset(bound=bound, membership=subset.membership & other.membership,
                                     label=f"{subset.label}&{other.label}")
    except (ValueError, IndexError) as e:
        if isinstance(e, InputError):
            raise
        raise BadSubsetSpec(f"malformed subset spec '{spec}': {e}", spec=spec) from e
    return PrimeSubset(bound=bound, membership=subset.membership.copy(), label=str(spec))


# ============================================
# MEASUREMENT
# ============================================

def lower_density_estimate(P: PrimeSubset) -> Fraction:
    """
    |P| / pi(bound) as an exact rational (finite-N stand-in for the liminf)

    Example:
        >>> lower_density_estimate(all_primes(100))
        Fraction(1, 1)
    """
    if P.bound < 2:
        raise InputError("bound must be >= 2", bound=P.bound)
    total = sieve_service.sieve(P.bound).count()
    return Fraction(P.count(), total)


def density_trend(P: PrimeSubset, bounds: Sequence[int]) -> List[Tuple[int, Fraction]]:
    """lower_density_estimate of P restricted to each bound"""
    table = sieve_service.sieve(P.bound)
    prime_counts = np.cumsum(table.membership)
    subset_counts = np.cumsum(P.membership)
    trend = []
    for b in sorted(set(int(b) for b in bounds)):
        if b < 2 or b > P.bound:
            raise InputError("trend bounds must lie in [2, subset bound]", bound=b, subset_bound=P.bound)
        trend.append((b, Fraction(int(subset_counts[b]), int(prime_counts[b]))))
    return trend


def residue_profile(P: PrimeSubset, m: int) -> List[int]:
    """Residues mod m hit by P"""
    return sorted(set((P.primes() % m).tolist()))


def obstruction_classes(subsets: Sequence[PrimeSubset], m: int) -> List[int]:
    """Residues mod m that no sum p_1 + ... + p_k (p_i in P_i) can reach"""
    profiles = [residue_profile(P, m) for P in subsets]
    if any(not profile for profile in profiles):
        return list(range(m))
    reachable = set(sumset(profiles, m))
    return [r for r in range(m) if r not in reachable]


def contains_odd_prime(P: PrimeSubset) -> bool:
    primes = P.primes()
    return bool((primes > 2).any())


# ============================================
# SHARPNESS FAMILIES
# ============================================

def sharpness_family(kind: str, k: int, bound: int, shift: int = 1,
                     table: Optional[PrimeTable] = None) -> List[PrimeSubset]:
    """
    Prime subsets whose densities sum to the critical value yet miss sums

    shifted-mod3: P_j = {p = shift mod 3} for j < k, P_k = primes without 3
    empty-last:   P_j = {p = 1 mod 3} for j <= k-2, P_{k-1} = all primes, P_k empty

    Raises:
        BadK: k < 4
    """
    if k < 4:
        raise BadK("sharpness families need k >= 4", k=k)
    if kind not in SHARPNESS_KINDS:
        raise InputError(f"unknown sharpness family '{kind}'", kind=kind, kinds=list(SHARPNESS_KINDS))
    if shift not in (1, 2):
        raise InputError("shift must be 1 or 2", shift=shift)
    primes = _table(bound, table)

    if kind == "shifted-mod3":
        first = congruence_subset(bound, 3, {shift}, primes)
        no_three = primes.membership.copy()
        if bound >= 3:
            no_three[3] = False
        last = PrimeSubset(bound=bound, membership=no_three, label="exclude:3")
        family = [first] * (k - 1) + [last]
    else:
        first = congruence_subset(bound, 3, {1}, primes)
        family = [first] * (k - 2) + [all_primes(bound, primes), empty_subset(bound)]

    logger.debug(f"📦 Sharpness family {kind} (k={k}, bound={bound}, shift={shift})")
    return family
