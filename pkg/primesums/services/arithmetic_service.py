"""
Arithmetic Service
Squarefree moduli, unit groups and CRT splitting/merging
"""

from functools import lru_cache
from math import gcd, prod
from typing import Tuple

import numpy as np
from sympy import factorint, primerange

from primesums.core.errors import BadFactor, InputError, NotCoprime, NotSquarefree
from primesums.core.logger import get_logger
from primesums.models.domain import SqfModulus

logger = get_logger(__name__)


@lru_cache(maxsize=4096)
def factor_squarefree(q: int) -> SqfModulus:
    """
    Factor a squarefree modulus

    Args:
        q: Positive integer

    Returns:
        SqfModulus with increasing prime factors and totient

    Example:
        >>> factor_squarefree(15)
        SqfModulus(q=15, factors=(3, 5), totient=8)
    """
    if isinstance(q, bool) or int(q) != q or q < 1:
        raise InputError("modulus must be a positive integer", q=q)
    q = int(q)
    factorization = factorint(q)
    squares = sorted(p for p, e in factorization.items() if e > 1)
    if squares:
        raise NotSquarefree(f"{q} is divisible by {squares[0]}^2", q=q, prime=squares[0])
    factors = tuple(sorted(factorization))
    return SqfModulus(q=q, factors=factors, totient=prod(p - 1 for p in factors))


def is_squarefree(q: int) -> bool:
    return q >= 1 and all(e == 1 for e in factorint(q).values())


def totient(q: int) -> int:
    """Totient of a squarefree q"""
    return factor_squarefree(q).totient


def primorial(x: float) -> int:
    """Product of the primes <= x (1 when there are none)"""
    return prod(primerange(2, int(x) + 1)) if x >= 2 else 1


@lru_cache(maxsize=1024)
def units(m: SqfModulus) -> Tuple[int, ...]:
    """
    Units of Z_q in increasing order; q = 1 gives the single residue 0

    Example:
        >>> units(factor_squarefree(15))
        (1, 2, 4, 7, 8, 11, 13, 14)
    """
    if m.q == 1:
        return (0,)
    residues = np.arange(1, m.q, dtype=np.int64)
    coprime = residues[np.gcd(residues, m.q) == 1]
    return tuple(int(x) for x in coprime)


def units_of(q: int) -> Tuple[int, ...]:
    return units(factor_squarefree(q))


def crt_split(x: int, m: SqfModulus, p: int) -> Tuple[int, int]:
    """
    Split a residue mod q into (residue mod q/p, residue mod p)

    Example:
        >>> crt_split(7, factor_squarefree(15), 5)
        (1, 2)
    """
    if p not in m.factors:
        raise BadFactor(f"{p} is not a prime factor of {m.q}", q=m.q, p=p)
    q1 = m.q // p
    return x % q1, x % p


def crt_merge(a: int, b: int, q1: int, p: int) -> int:
    """
    Unique residue mod q1*p congruent to a mod q1 and b mod p

    Example:
        >>> crt_merge(1, 2, 3, 5)
        7
    """
    if gcd(q1, p) != 1:
        raise NotCoprime(f"moduli {q1} and {p} are not coprime", q1=q1, p=p)
    a %= q1
    b %= p
    if p == 1:
        return a
    step = ((b - a) * pow(q1, -1, p)) % p
    return a + q1 * step
