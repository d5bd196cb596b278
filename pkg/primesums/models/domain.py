"""
Domain Types
Immutable value objects shared by the services
"""

import struct
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from pathlib import Path
from typing import Dict, Optional, Tuple, Union

import numpy as np

from primesums.core.errors import InputError

HEADER = struct.Struct("<Q")


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.ascontiguousarray(array)
    array.setflags(write=False)
    return array


# ============================================
# NUMBER CORE
# ============================================

@dataclass(frozen=True)
class SqfModulus:
    """Squarefree modulus with its distinct prime factors"""

    q: int
    factors: Tuple[int, ...]
    totient: int

    def __post_init__(self):
        product = 1
        for p in self.factors:
            product *= p
        if product != self.q or list(self.factors) != sorted(set(self.factors)):
            raise InputError("factors do not multiply to q", q=self.q, factors=list(self.factors))

    @property
    def omega(self) -> int:
        return len(self.factors)

    @property
    def is_even(self) -> bool:
        return self.q % 2 == 0


@dataclass(frozen=True, eq=False)
class BitVectorSet:
    """Membership bit-vector over [0, bound]"""

    bound: int
    membership: np.ndarray

    def __post_init__(self):
        if self.membership.dtype != np.bool_ or len(self.membership) != self.bound + 1:
            raise InputError("membership must be a bool vector of length bound+1", bound=self.bound)
        object.__setattr__(self, "membership", _frozen(self.membership))

    def primes(self) -> np.ndarray:
        return np.flatnonzero(self.membership)

    def count(self) -> int:
        return int(np.count_nonzero(self.membership))

    def __contains__(self, m: int) -> bool:
        return 0 <= m <= self.bound and bool(self.membership[m])

    def to_bytes(self) -> bytes:
        """8-byte little-endian bound header followed by the packed bits (LSB first)"""
        return HEADER.pack(self.bound) + np.packbits(self.membership, bitorder="little").tobytes()

    @staticmethod
    def membership_from_bytes(raw: bytes) -> Tuple[int, np.ndarray]:
        if len(raw) < HEADER.size:
            raise InputError("bit-vector file is truncated")
        (bound,) = HEADER.unpack_from(raw)
        bits = np.frombuffer(raw, dtype=np.uint8, offset=HEADER.size)
        if len(bits) * 8 < bound + 1:
            raise InputError("bit-vector file shorter than its header bound", bound=bound)
        membership = np.unpackbits(bits, count=bound + 1, bitorder="little").astype(bool)
        return bound, membership

    def save(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(self.to_bytes())
        return path


@dataclass(frozen=True, eq=False)
class PrimeTable(BitVectorSet):
    """membership[m] is True iff m is prime, for m <= bound"""

    @classmethod
    def load(cls, path: Union[str, Path]) -> "PrimeTable":
        bound, membership = cls.membership_from_bytes(Path(path).read_bytes())
        return cls(bound=bound, membership=membership)

    def restrict(self, bound: int) -> "PrimeTable":
        if bound > self.bound:
            raise InputError("cannot restrict a table to a larger bound", bound=bound, table_bound=self.bound)
        return PrimeTable(bound=bound, membership=self.membership[: bound + 1].copy())


@dataclass(frozen=True, eq=False)
class PrimeSubset(BitVectorSet):
    """Bounded set of primes with a human-readable label"""

    label: str = ""

    def __post_init__(self):
        super().__post_init__()
        if not self.membership.any():
            return
        from primesums.services.sieve_service import sieve

        table = sieve(max(self.bound, 2))
        stray = np.flatnonzero(self.membership & ~table.membership[: self.bound + 1])
        if len(stray):
            raise InputError("subset members must be primes <= bound", bound=self.bound,
                             label=self.label, members=stray[:10].tolist())

    @classmethod
    def load(cls, path: Union[str, Path], label: str = "") -> "PrimeSubset":
        bound, membership = cls.membership_from_bytes(Path(path).read_bytes())
        return cls(bound=bound, membership=membership, label=label or Path(path).stem)

    def to_dict(self) -> Dict[str, object]:
        return {"label": self.label, "bound": self.bound, "primes": self.primes().tolist()}


# ============================================
# COMBINATORICS
# ============================================

@dataclass(frozen=True)
class ValueSequence:
    """Nonincreasing sequence of exact rationals in [0, 1]"""

    values: Tuple[Fraction, ...]

    def __post_init__(self):
        values = tuple(Fraction(v) for v in self.values)
        if not values:
            raise InputError("value sequence is empty")
        if any(v < 0 or v > 1 for v in values):
            raise InputError("values must lie in [0, 1]", values=[str(v) for v in values])
        if any(values[i] < values[i + 1] for i in range(len(values) - 1)):
            raise InputError("values must be nonincreasing", values=[str(v) for v in values])
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, i: int) -> Fraction:
        return self.values[i]

    @property
    def total(self) -> Fraction:
        return sum(self.values, Fraction(0))

    @property
    def support_end(self) -> int:
        """Largest index with a nonzero value (-1 when all zero)"""
        for i in range(len(self.values) - 1, -1, -1):
            if self.values[i] != 0:
                return i
        return -1


@dataclass(frozen=True)
class SelectionWitness:
    indices: Tuple[int, ...]
    index_sum: int
    value_sum: Fraction
    threshold: Fraction
    all_positive: bool
    lemma: str = "dp"
    fast_path: bool = False

    @property
    def exceeds_threshold(self) -> bool:
        return self.value_sum > self.threshold


# ============================================
# RESIDUE SELECTION
# ============================================

@dataclass(frozen=True, eq=False)
class WeightVector:
    """Map from the units of Z_q* to exact rationals in [0, 1]"""

    modulus: SqfModulus
    values: Dict[int, Fraction]
    mass: Fraction = field(init=False)

    def __post_init__(self):
        values = {int(x): Fraction(v) for x, v in self.values.items()}
        q = self.modulus.q
        expected = {0} if q == 1 else {x for x in range(1, q) if gcd(x, q) == 1}
        if set(values) != expected:
            raise InputError("weight keys must be exactly the units of Z_q", q=q,
                             missing=sorted(expected - set(values)), extra=sorted(set(values) - expected))
        if any(v < 0 or v > 1 for v in values.values()):
            raise InputError("weights must lie in [0, 1]", q=self.modulus.q)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "mass", sum(values.values(), Fraction(0)))

    def __call__(self, x: int) -> Fraction:
        return self.values.get(x % self.modulus.q, Fraction(0))

    @property
    def q(self) -> int:
        return self.modulus.q

    def is_zero(self) -> bool:
        return all(v == 0 for v in self.values.values())

    def support(self) -> Tuple[int, ...]:
        return tuple(sorted(x for x, v in self.values.items() if v > 0))


@dataclass(frozen=True)
class ResidueWitness:
    q: int
    k: int
    target: int
    residues: Tuple[int, ...]
    value_sum: Fraction
    threshold: Fraction
    branch: str
    bounds: Dict[str, Fraction] = field(default_factory=dict, hash=False, compare=False)
    meets_stated_bound: Optional[bool] = None


# ============================================
# TRANSFERENCE
# ============================================

@dataclass(frozen=True, eq=False)
class SpectrumProfile:
    """Fourier coefficients of a function on Z_N, f~(r) = sum_x f(x) e(-rx/N)"""

    N: int
    coefficients: np.ndarray

    def __post_init__(self):
        if len(self.coefficients) != self.N:
            raise InputError("spectrum length must equal N", N=self.N)
        object.__setattr__(self, "coefficients", _frozen(np.asarray(self.coefficients, dtype=np.complex128)))

    @property
    def magnitudes(self) -> np.ndarray:
        return np.abs(self.coefficients)
