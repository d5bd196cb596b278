"""
Convolution Service
Exact integer convolution via number-theoretic transforms over word-size
primes recombined with Garner's CRT, plus a direct quadratic path
"""

from functools import lru_cache
from math import prod
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from joblib import Parallel, delayed
from sympy import primitive_root

from primesums.core.config import settings
from primesums.core.errors import ConvolutionOverflow, TooLarge
from primesums.core.logger import get_logger

logger = get_logger(__name__)

IntVector = Union[np.ndarray, Sequence[int]]

# p = c * 2^e + 1, all below 2^30 so residue products fit in int64
NTT_PRIMES: Tuple[Tuple[int, int], ...] = (
    (167772161, 25),
    (469762049, 26),
    (754974721, 24),
    (998244353, 23),
    (1004535809, 21),
)

INT64_LIMIT = 2**63 - 1


# ============================================
# TRANSFORMS
# ============================================

@lru_cache(maxsize=None)
def _root(p: int) -> int:
    return int(primitive_root(p))


@lru_cache(maxsize=64)
def _bit_reverse(size: int) -> np.ndarray:
    bits = size.bit_length() - 1
    idx = np.arange(size, dtype=np.int64)
    rev = np.zeros(size, dtype=np.int64)
    for b in range(bits):
        rev |= ((idx >> b) & 1) << (bits - 1 - b)
    return rev


def _powers(w: int, count: int, p: int) -> np.ndarray:
    """[1, w, w^2, ..., w^(count-1)] mod p by repeated doubling"""
    out = np.ones(1, dtype=np.int64)
    while len(out) < count:
        step = pow(w, len(out), p)
        out = np.concatenate((out, out * step % p))
    return out[:count]


def ntt(a: np.ndarray, p: int, invert: bool = False) -> np.ndarray:
    """
    Iterative radix-2 transform of a (length a power of two) modulo p

    Each butterfly stage works on the whole array at once.
    """
    size = len(a)
    a = a[_bit_reverse(size)] % p
    g = _root(p)
    length = 2
    while length <= size:
        w = pow(g, (p - 1) // length, p)
        if invert:
            w = pow(w, p - 2, p)
        half = length // 2
        twiddle = _powers(w, half, p)
        blocks = a.reshape(-1, length)
        u = blocks[:, :half]
        v = blocks[:, half:] * twiddle % p
        a = np.concatenate(((u + v) % p, (u - v) % p), axis=1).reshape(-1)
        length <<= 1
    if invert:
        a = a * pow(size, p - 2, p) % p
    return a


# ============================================
# HELPERS
# ============================================

def _as_vector(u: IntVector) -> np.ndarray:
    """int64 when every entry fits, object (Python ints) otherwise"""
    if isinstance(u, np.ndarray) and u.dtype != object:
        if not np.issubdtype(u.dtype, np.integer) and u.dtype != np.bool_:
            raise TypeError("convolution inputs must be integer vectors")
        return u.astype(np.int64, copy=False)
    values = [int(x) for x in u]
    if all(-INT64_LIMIT <= x <= INT64_LIMIT for x in values):
        return np.array(values, dtype=np.int64)
    return np.array(values, dtype=object)


def _abs_stats(u: np.ndarray) -> Tuple[int, int]:
    """(sum |u|, max |u|) as Python ints (float-rounded upward for int64 input)"""
    if len(u) == 0:
        return 0, 0
    if u.dtype == object:
        magnitudes = [abs(int(x)) for x in u]
        return sum(magnitudes), max(magnitudes)
    mags = np.abs(u)
    total = float(mags.sum(dtype=np.float64))
    return int(total * (1 + 1e-9)) + len(u), int(mags.max())


def value_bound(u: np.ndarray, v: np.ndarray) -> int:
    """Upper bound on |(u * v)[i]| for every i"""
    su, mu = _abs_stats(u)
    sv, mv = _abs_stats(v)
    return min(su * mv, sv * mu)


def _reduce(u: np.ndarray, p: int) -> np.ndarray:
    if u.dtype == object:
        return np.array([int(x) % p for x in u], dtype=np.int64)
    return np.mod(u, p)


def _next_pow2(n: int) -> int:
    return 1 if n <= 1 else 1 << (n - 1).bit_length()


# ============================================
# SERVICE
# ============================================

class ConvolutionService:
    """
    Exact acyclic and cyclic convolution of integer vectors

    Features:
    - Direct quadratic path for short inputs
    - NTT path over the fewest primes whose product exceeds the value bound
    - Block products for outputs longer than one transform
    - int64 output when the bound allows it, Python ints otherwise
    """

    def __init__(self, direct_threshold: Optional[int] = None, max_length: Optional[int] = None,
                 output_limit: Optional[int] = None):
        self._direct_threshold = direct_threshold
        self._max_length = max_length
        self._output_limit = output_limit

    @property
    def direct_threshold(self) -> int:
        return self._direct_threshold or settings.NTT_DIRECT_THRESHOLD

    @property
    def max_length(self) -> int:
        return self._max_length or settings.CONVOLUTION_MAX_LENGTH

    @property
    def output_limit(self) -> int:
        return self._output_limit or settings.CONVOLUTION_OUTPUT_LIMIT

    def convolve_exact(self, u: IntVector, v: IntVector, n_jobs: Optional[int] = None) -> np.ndarray:
        """
        Exact acyclic convolution

        Args:
            u, v: integer sequences
            n_jobs: threads for the per-prime transforms

        Returns:
            Vector of length len(u) + len(v) - 1

        Example:
            >>> convolution_service.convolve_exact([1, 1], [1, 1]).tolist()
            [1, 2, 1]
        """
        a = _as_vector(u)
        b = _as_vector(v)
        if len(a) == 0 or len(b) == 0:
            return np.zeros(0, dtype=np.int64)
        out_len = len(a) + len(b) - 1
        if out_len > self.output_limit:
            raise TooLarge(
                f"convolution length {out_len} exceeds the configured limit {self.output_limit}",
                length=out_len,
                limit=self.output_limit,
            )
        if out_len > self.max_length:
            return self.convolve_blocked(a, b, n_jobs=n_jobs)
        if min(len(a), len(b)) <= self.direct_threshold:
            return self.convolve_direct(a, b)
        return self.convolve_ntt(a, b, n_jobs=n_jobs)

    def convolve_blocked(self, u: IntVector, v: IntVector, n_jobs: Optional[int] = None) -> np.ndarray:
        """
        Acyclic convolution as a sum of block products

        Both inputs are cut into blocks of max_length // 2 entries, so every
        block product fits one transform. All-zero blocks are skipped.
        """
        a = _as_vector(u)
        b = _as_vector(v)
        if len(a) == 0 or len(b) == 0:
            return np.zeros(0, dtype=np.int64)
        out_len = len(a) + len(b) - 1
        block = max(self.max_length // 2, 1)
        wide = a.dtype == object or b.dtype == object or value_bound(a, b) > INT64_LIMIT
        out = np.zeros(out_len, dtype=object if wide else np.int64)
        blocks_b = [(j, b[j : j + block]) for j in range(0, len(b), block)]
        blocks_b = [(j, chunk) for j, chunk in blocks_b if chunk.any()]
        pairs = 0
        for i in range(0, len(a), block):
            chunk_a = a[i : i + block]
            if not chunk_a.any():
                continue
            for j, chunk_b in blocks_b:
                part = self.convolve_exact(chunk_a, chunk_b, n_jobs=n_jobs)
                out[i + j : i + j + len(part)] += part.astype(out.dtype)
                pairs += 1
        logger.debug(f"🧱 Blocked convolution: {pairs} block products of length <= {2 * block - 1}")
        return out

    def convolve_direct(self, u: IntVector, v: IntVector) -> np.ndarray:
        """Quadratic convolution: one shifted, scaled copy of the longer input per entry of the shorter"""
        a = _as_vector(u)
        b = _as_vector(v)
        if len(a) == 0 or len(b) == 0:
            return np.zeros(0, dtype=np.int64)
        if len(a) > len(b):
            a, b = b, a
        bound = value_bound(a, b)
        dtype = np.int64 if bound <= INT64_LIMIT and a.dtype != object and b.dtype != object else object
        out = np.zeros(len(a) + len(b) - 1, dtype=dtype)
        b = b.astype(dtype)
        for i, coeff in enumerate(a.tolist()):
            if coeff:
                out[i : i + len(b)] += coeff * b
        return out

    def moduli_for(self, bound: int, size: int, signed: bool) -> List[int]:
        """Fewest NTT primes supporting the transform size whose product exceeds the bound"""
        needed = 2 * bound + 1 if signed else bound + 1
        usable = [p for p, e in NTT_PRIMES if size <= (1 << e)]
        chosen: List[int] = []
        for p in usable:
            chosen.append(p)
            if prod(chosen) > needed:
                if len(chosen) > 3:
                    logger.debug(f"⚠️ Escalated to {len(chosen)} NTT primes (bound {bound})")
                return chosen
        raise ConvolutionOverflow(
            "value bound exceeds the precision of the available NTT primes",
            bound=str(bound),
            size=size,
        )

    def convolve_ntt(self, u: IntVector, v: IntVector, n_jobs: Optional[int] = None) -> np.ndarray:
        a = _as_vector(u)
        b = _as_vector(v)
        if len(a) == 0 or len(b) == 0:
            return np.zeros(0, dtype=np.int64)
        out_len = len(a) + len(b) - 1
        size = _next_pow2(out_len)
        bound = value_bound(a, b)
        signed = bool((a < 0).any() or (b < 0).any())
        moduli = self.moduli_for(bound, size, signed)

        def residues(p: int) -> np.ndarray:
            fa = np.zeros(size, dtype=np.int64)
            fb = np.zeros(size, dtype=np.int64)
            fa[: len(a)] = _reduce(a, p)
            fb[: len(b)] = _reduce(b, p)
            product = ntt(fa, p) * ntt(fb, p) % p
            return ntt(product, p, invert=True)[:out_len]

        jobs = n_jobs or settings.THREADS
        if jobs > 1 and len(moduli) > 1:
            parts = Parallel(n_jobs=min(jobs, len(moduli)), prefer="threads")(
                delayed(residues)(p) for p in moduli
            )
        else:
            parts = [residues(p) for p in moduli]

        return self._garner(parts, moduli, bound, signed)

    @staticmethod
    def _garner(parts: List[np.ndarray], moduli: List[int], bound: int, signed: bool) -> np.ndarray:
        """Mixed-radix CRT recombination; digits stay in int64"""
        digits: List[np.ndarray] = []
        for j, mj in enumerate(moduli):
            acc = np.zeros_like(parts[j])
            coef = 1
            for i in range(j):
                acc = (acc + digits[i] * (coef % mj)) % mj
                coef *= moduli[i]
            inv = pow(coef % mj, -1, mj) if j else 1
            digits.append((parts[j] - acc) % mj * inv % mj)

        total_modulus = prod(moduli)
        if total_modulus <= INT64_LIMIT:
            out = np.zeros_like(digits[0])
            radix = 1
            for d, m in zip(digits, moduli):
                out = out + d * radix
                radix *= m
        else:
            out = np.zeros(len(digits[0]), dtype=object)
            radix = 1
            for d, m in zip(digits, moduli):
                out = out + d.astype(object) * radix
                radix *= m

        if signed:
            half = total_modulus // 2
            out = np.where(out > half, out - total_modulus, out)

        if out.dtype == object and bound <= INT64_LIMIT:
            out = out.astype(np.int64)
        return out

    def convolve_cyclic(self, u: IntVector, v: IntVector, modulus: int) -> np.ndarray:
        """Exact cyclic convolution on Z_modulus (inputs of length <= modulus)"""
        full = self.convolve_exact(u, v)
        return fold(full, modulus)

    def convolve_many(self, vectors: Sequence[IntVector]) -> np.ndarray:
        """Acyclic convolution of several vectors, balanced pairwise"""
        layer = [_as_vector(v) for v in vectors]
        if not layer:
            return np.ones(1, dtype=np.int64)
        while len(layer) > 1:
            nxt = [self.convolve_exact(layer[i], layer[i + 1]) for i in range(0, len(layer) - 1, 2)]
            if len(layer) % 2:
                nxt.append(layer[-1])
            layer = nxt
        return layer[0]


def fold(vector: np.ndarray, modulus: int) -> np.ndarray:
    """Sum entries by index mod modulus"""
    out = np.zeros(modulus, dtype=vector.dtype)
    for start in range(0, len(vector), modulus):
        chunk = vector[start : start + modulus]
        out[: len(chunk)] += chunk
    return out


# Global convolution instance
convolution_service = ConvolutionService()


def convolve_exact(u: IntVector, v: IntVector) -> np.ndarray:
    return convolution_service.convolve_exact(u, v)
