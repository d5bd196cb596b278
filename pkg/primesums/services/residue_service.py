"""
Residue Selection Service
Choose k units of Z_q* summing to a target with positive weights and a
large weight sum, by induction over the prime factors of q

Composite q = q1 * p: average the weights over the Z_p* fibers, solve on
q1, then solve the Z_p fiber step over the chosen fibers and CRT-merge.
Prime fiber step: sort each column, pick cutoffs with the selection lemmas,
form the level sets A_m = {y : h_m(y) >= cutoff_m} and find a representation
of the target in A_1 + ... + A_k (Cauchy-Davenport guarantees one).
"""

import itertools
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from joblib import Parallel, delayed

from primesums.core.config import settings
from primesums.core.errors import (
    BadFactor,
    BadK,
    BadShape,
    HypothesisUnmet,
    InputError,
    InternalNoWitness,
    NoFiberWitness,
    NotPrime,
    NoWitness,
    ParityMismatch,
    TooLarge,
)
from primesums.core.logger import get_logger
from primesums.models.domain import ResidueWitness, SqfModulus, ValueSequence, WeightVector
from primesums.services.arithmetic_service import crt_merge, factor_squarefree, units
from primesums.services.combinatorics_service import (
    SHARP4_UPPER,
    optimal_selection,
    select_multi,
    select_sharp4,
    select_single,
    sharp4_threshold,
)
from primesums.services.sumset_service import sumset

logger = get_logger(__name__)

Weights = Sequence[WeightVector]


# ============================================
# WEIGHT VECTORS
# ============================================

def weight_vector(q: int, values: Dict[int, object]) -> WeightVector:
    """
    WeightVector from a partial map; missing units get weight 0

    Raises:
        InputError: a key is not a unit of Z_q
    """
    modulus = factor_squarefree(q)
    allowed = set(units(modulus))
    keys = {int(x) % q if q > 1 else int(x) for x in values}
    extra = sorted(keys - allowed)
    if extra:
        raise InputError("weight keys must be units of Z_q", q=q, keys=extra)
    full = {x: Fraction(0) for x in units(modulus)}
    for x, v in values.items():
        full[int(x) % q if q > 1 else int(x)] = Fraction(v)
    return WeightVector(modulus=modulus, values=full)


def fiber_average(f: WeightVector, p: int) -> WeightVector:
    """
    g(x) = (1/phi(p)) * sum over y in Z_p* of f(crt_merge(x, y)), on Z_{q/p}*

    Example:
        >>> f = weight_vector(15, {1: 1, 4: 1})
        >>> fiber_average(f, 5).values
        {1: Fraction(1, 2), 2: Fraction(0, 1)}
    """
    m = f.modulus
    if p not in m.factors:
        raise BadFactor(f"{p} is not a prime factor of {m.q}", q=m.q, p=p)
    q1 = m.q // p
    inner = factor_squarefree(q1)
    fiber = units(factor_squarefree(p))
    values = {
        x: sum((f(crt_merge(x, y, q1, p)) for y in fiber), Fraction(0)) / (p - 1)
        for x in units(inner)
    }
    return WeightVector(modulus=inner, values=values)


def restrict_even(f: WeightVector) -> WeightVector:
    """Weights on Z_{q/2}* read through the isomorphism Z_q* = Z_{q/2}* (q even)"""
    q1 = f.q // 2
    inner = factor_squarefree(q1)
    return WeightVector(modulus=inner, values={x: f(crt_merge(x, 1, q1, 2)) for x in units(inner)})


def random_weights(q: int, seed: int, denominator: int = 12, mass_floor=None,
                   index: int = 0) -> WeightVector:
    """
    Seeded weights j/denominator on Z_q*, raised until mass > mass_floor * phi(q)

    Raising sets the lowest weights to 1, lowest first, ties by residue.
    """
    modulus = factor_squarefree(q)
    residues = units(modulus)
    rng = np.random.Generator(np.random.Philox(key=[int(seed), int(index)]))
    draws = rng.integers(0, denominator + 1, size=len(residues))
    values = {x: Fraction(int(d), denominator) for x, d in zip(residues, draws)}
    if mass_floor is not None:
        target = Fraction(mass_floor) * modulus.totient
        order = sorted(residues, key=lambda x: (values[x], x))
        for x in order:
            if sum(values.values(), Fraction(0)) > target:
                break
            values[x] = Fraction(1)
        if sum(values.values(), Fraction(0)) <= target:
            raise HypothesisUnmet("mass floor unreachable", q=q, mass_floor=str(mass_floor))
    return WeightVector(modulus=modulus, values=values)


def random_weight_family(q: int, k: int, seed: int, c, denominator: int = 12) -> List[WeightVector]:
    """k seeded weight vectors, none identically zero, with total mass > k*c*phi(q)"""
    c = Fraction(c)
    family = [random_weights(q, seed, denominator, index=i) for i in range(k)]
    phi = family[0].modulus.totient
    target = k * c * phi
    values = [dict(f.values) for f in family]
    order = sorted(
        ((vals[x], i, x) for i, vals in enumerate(values) for x in vals),
    )
    for _, i, x in order:
        if sum(sum(v.values(), Fraction(0)) for v in values) > target:
            break
        values[i][x] = Fraction(1)
    for vals in values:
        if all(v == 0 for v in vals.values()):
            first = min(vals)
            vals[first] = Fraction(1, denominator)
    modulus = family[0].modulus
    result = [WeightVector(modulus=modulus, values=vals) for vals in values]
    if sum((f.mass for f in result), Fraction(0)) <= target:
        raise HypothesisUnmet("mass floor unreachable", q=q, k=k, c=str(c))
    return result


# ============================================
# BOUNDS
# ============================================

def selection_bounds(q: int, k: int, c: Fraction, single: bool) -> Dict[str, Fraction]:
    """
    Thresholds for a residue selection

    lemma_stated: the bound as written in the lemma statement
    recap:        the bound restated in the proof summary, (2c - 1)k
    invoked:      the bound the induction actually delivers (hard contract)
    """
    kc = k * c
    if not single and k == 4 and q % 3 == 0:
        return {
            "lemma_stated": 4 * sharp4_threshold(c),
            "recap": (2 * c - 1) * k,
            "invoked": sharp4_threshold(c),
        }
    return {"lemma_stated": kc, "recap": (2 * c - 1) * k, "invoked": kc}


# ============================================
# MAX-PLUS REACHABILITY
# ============================================

def maxplus_tuple(columns: Sequence[Dict[int, Fraction]], modulus: int,
                  target: int) -> Optional[Tuple[Tuple[int, ...], Fraction]]:
    """
    Best tuple (x_1..x_k), x_m in columns[m], with sum = target mod modulus

    Maximizes sum columns[m][x_m]; ties go to the lexicographically
    smallest tuple.

    Returns:
        (residues, value) or None when the target is unreachable
    """
    k = len(columns)
    # suffix[m][s]: best value of columns m.. summing to s
    suffix: List[List[Optional[Fraction]]] = [[None] * modulus for _ in range(k + 1)]
    suffix[k][0] = Fraction(0)
    for m in range(k - 1, -1, -1):
        nxt = suffix[m + 1]
        cur = suffix[m]
        for x, value in columns[m].items():
            for s_rest in range(modulus):
                rest = nxt[s_rest]
                if rest is None:
                    continue
                s = (x + s_rest) % modulus
                candidate = value + rest
                if cur[s] is None or candidate > cur[s]:
                    cur[s] = candidate
    start = target % modulus
    if suffix[0][start] is None:
        return None

    chosen = []
    s = start
    for m in range(k):
        goal = suffix[m][s]
        for x in sorted(columns[m]):
            rest = suffix[m + 1][(s - x) % modulus]
            if rest is not None and columns[m][x] + rest == goal:
                chosen.append(x)
                s = (s - x) % modulus
                break
    return tuple(chosen), suffix[0][start]


# ============================================
# PRIME FIBER STEP
# ============================================

def _sorted_column(h: Dict[int, Fraction]) -> Tuple[ValueSequence, List[int]]:
    order = sorted(h, key=lambda y: (-h[y], y))
    return ValueSequence(tuple(h[y] for y in order)), order


def _lemma_cutoffs(cols: List[ValueSequence], p: int, c: Fraction, single: bool, base: bool):
    """Cutoff indices from the selection lemma that applies, else the plain DP optimum"""
    k = len(cols)
    n = p - 1
    try:
        if single and base:
            return select_single(cols[0], k, c).indices, "3.1"
        if n == 2 and k == 4:
            return select_sharp4(*cols, c).indices, "3.2"
        return select_multi(cols, c).indices, "3.3"
    except (HypothesisUnmet, BadShape, BadK) as e:
        logger.debug(f"lemma gate closed on Z_{p} ({e.code}); using the unguarded optimum")
    except NoWitness as e:
        logger.warning(f"⚠️ Selector found no witness on Z_{p} ({e.message}); using the unguarded optimum")
    found = optimal_selection(cols, n)
    if found is None:
        raise NoFiberWitness(f"no positive index tuple with index sum >= {n} on Z_{p}", p=p)
    return found[0], "dp"


def fiber_step(hs: Sequence[Dict[int, Fraction]], p: int, c: Fraction, target: int,
               single: bool = False, base: bool = True) -> Tuple[Tuple[int, ...], Fraction, str]:
    """
    Solve one Z_p* fiber: lemma cutoffs, level sets, reachability

    Args:
        hs: k weight maps on {1..p-1}
        p: odd prime
        c: density parameter handed to the selection lemma
        target: residue to represent mod p
        single: all maps come from one weight function
        base: the maps are the whole problem (q = p), not a fiber of a larger q

    Returns:
        (residues, value_sum, selector) where selector names the lemma used

    Raises:
        NoFiberWitness: nothing admissible on this fiber
    """
    cols, orders = zip(*(_sorted_column(h) for h in hs))
    cols = list(cols)
    cutoffs, selector = _lemma_cutoffs(cols, p, c, single, base)
    level_sets = []
    for h, col, order, i in zip(hs, cols, orders, cutoffs):
        cutoff = col[i]
        level_sets.append({y: h[y] for y in order if h[y] >= cutoff and h[y] > 0})
    sizes = sum(len(a) for a in level_sets)
    if sizes < p - 1 + len(hs):
        logger.warning(f"⚠️ Level sets on Z_{p} too small for Cauchy-Davenport ({sizes} < {p - 1 + len(hs)})")
    found = maxplus_tuple(level_sets, p, target)
    if found is None:
        raise NoFiberWitness(f"target {target} not reachable on Z_{p}", p=p, target=target)
    residues, value = found
    return residues, value, selector


def prime_base_case(fs: Weights, c, n: int, check_hypothesis: bool = True) -> ResidueWitness:
    """
    Residue selection on a prime modulus p straight from the fiber step

    Args:
        fs: k weight vectors on Z_p*
        c: density parameter
        n: target
        check_hypothesis: require c > 1/2 and total mass > k*c*(p-1)

    Example:
        >>> fs = [weight_vector(5, {1: 1, 2: 1, 3: 1, 4: 1})] * 4
        >>> sum(prime_base_case(fs, "7/10", 3).residues) % 5
        3
    """
    fs = list(fs)
    c = Fraction(c)
    m = fs[0].modulus
    if len(m.factors) != 1:
        raise NotPrime(f"{m.q} is not prime", q=m.q)
    if len({f.q for f in fs}) != 1:
        raise InputError("weight functions must share one modulus", moduli=sorted({f.q for f in fs}))
    p = m.q
    k = len(fs)
    single = all(f.values == fs[0].values for f in fs)
    bounds = selection_bounds(p, k, c, single)
    if check_hypothesis:
        total = sum((f.mass for f in fs), Fraction(0))
        if c <= Fraction(1, 2) or total <= k * c * (p - 1):
            raise HypothesisUnmet("need c > 1/2 and total mass > k*c*(p-1)",
                                  total=str(total), bound=str(k * c * (p - 1)))
    if p == 2:
        if (n - k) % 2:
            raise ParityMismatch("units mod 2 are odd, so the sum has the parity of k", n=n, k=k)
        if any(f(1) <= 0 for f in fs):
            raise HypothesisUnmet("zero weight on the only unit mod 2")
        return _witness(fs, (1,) * k, n, bounds["invoked"], "prime-base", bounds)
    hs = [dict(f.values) for f in fs]
    try:
        residues, _, selector = fiber_step(hs, p, c, n % p, single=single, base=True)
    except NoFiberWitness as e:
        raise InternalNoWitness(e.message, **e.details) from e
    witness = _witness(fs, residues, n, bounds["invoked"], f"prime-base:{selector}", bounds)
    if check_hypothesis:
        validate_residue_witness(fs, witness)
    return witness


# ============================================
# INDUCTION
# ============================================

def _peel_order(m: SqfModulus, k: int, single: bool) -> List[int]:
    """Odd primes in the order they are split off (outermost first)"""
    odd = sorted((p for p in m.factors if p != 2), reverse=True)
    if not single and k == 4 and 3 in odd and len(odd) > 1:
        odd.remove(3)
        odd.insert(0, 3)
    return odd


def _induct(fs: Sequence[WeightVector], order: List[int], target: int, c: Fraction,
            single: bool, steps: List[Dict[str, object]]) -> Tuple[Tuple[int, ...], Fraction]:
    """Residues on Z_q* (q odd) for the weights fs, splitting primes in the given order"""
    q = fs[0].q
    k = len(fs)
    if not order:
        residues = tuple(0 for _ in fs)
        if any(f(0) <= 0 for f in fs):
            raise NoFiberWitness("zero weight on Z_1", q=1)
        return residues, sum((f(0) for f in fs), Fraction(0))

    p = order[0]
    q1 = q // p
    averaged = [fiber_average(f, p) for f in fs]
    outer, _ = _induct(averaged, order[1:], target % q1, c, single, steps)

    fiber = units(factor_squarefree(p))
    hs = [{y: f(crt_merge(x, y, q1, p)) for y in fiber} for f, x in zip(fs, outer)]
    ys, value, selector = fiber_step(hs, p, c, target % p, single=single, base=(q1 == 1))
    steps.append({"p": p, "selector": selector})
    residues = tuple(crt_merge(x, y, q1, p) for x, y in zip(outer, ys))
    return residues, value


def _solve(fs: Sequence[WeightVector], c: Fraction, n: int, single: bool) -> ResidueWitness:
    m = fs[0].modulus
    k = len(fs)
    bounds = selection_bounds(m.q, k, c, single)
    threshold = bounds["invoked"]
    if m.is_even and (n - k) % 2:
        raise ParityMismatch("units of an even modulus are odd, so the sum has the parity of k",
                             q=m.q, k=k, n=n)

    work = [restrict_even(f) for f in fs] if m.is_even else list(fs)
    inner_q = m.q // 2 if m.is_even else m.q
    inner = factor_squarefree(inner_q)
    steps: List[Dict[str, object]] = []
    branch = "crt-induction"
    try:
        inner_residues, _ = _induct(work, _peel_order(inner, k, single), n % inner_q, c, single, steps)
        residues = _lift_even(inner_residues, inner_q) if m.is_even else inner_residues
        witness = _witness(fs, residues, n, threshold, branch, bounds)
        if witness.value_sum <= threshold:
            raise NoFiberWitness("induction result below threshold", value=str(witness.value_sum))
    except NoFiberWitness as e:
        logger.warning(f"⚠️ Induction on Z_{m.q} fell short ({e.message}); running the exact search")
        exact = exact_residue_search(fs, n)
        if exact is None or exact.value_sum <= threshold:
            raise InternalNoWitness(
                f"no residue tuple exceeds the threshold {threshold}",
                q=m.q, k=k, n=n, threshold=str(threshold),
                optimum=None if exact is None else str(exact.value_sum),
            )
        witness = _witness(fs, exact.residues, n, threshold, "exact-fallback", bounds)

    if steps:
        logger.debug(f"fiber steps on Z_{m.q}: {steps}")
    validate_residue_witness(fs, witness)
    return witness


def _lift_even(residues: Sequence[int], q1: int) -> Tuple[int, ...]:
    return tuple(crt_merge(x, 1, q1, 2) for x in residues)


def _witness(fs: Weights, residues: Sequence[int], n: int, threshold: Fraction, branch: str,
             bounds: Dict[str, Fraction]) -> ResidueWitness:
    q = fs[0].q
    value = sum((f(x) for f, x in zip(fs, residues)), Fraction(0))
    return ResidueWitness(
        q=q,
        k=len(fs),
        target=n % q,
        residues=tuple(int(x) for x in residues),
        value_sum=value,
        threshold=threshold,
        branch=branch,
        bounds=dict(bounds),
        meets_stated_bound=value > bounds["lemma_stated"],
    )


def validate_residue_witness(fs: Weights, w: ResidueWitness) -> None:
    """Congruence, positivity and threshold, recomputed exactly"""
    q = fs[0].q
    allowed = set(units(fs[0].modulus))
    problems = []
    if any(x not in allowed for x in w.residues):
        problems.append("non-unit residue")
    if sum(w.residues) % q != w.target % q:
        problems.append("congruence")
    if any(f(x) <= 0 for f, x in zip(fs, w.residues)):
        problems.append("positivity")
    if sum((f(x) for f, x in zip(fs, w.residues)), Fraction(0)) != w.value_sum:
        problems.append("value sum")
    if w.value_sum <= w.threshold:
        problems.append("threshold")
    if problems:
        raise InternalNoWitness("residue witness failed recomputation", problems=problems,
                                residues=list(w.residues))


# ============================================
# PUBLIC SELECTORS
# ============================================

def select_residues_single(f: WeightVector, k: int, c, n: int) -> ResidueWitness:
    """
    k units x_i of Z_q* with sum = n mod q, f(x_i) > 0, sum f(x_i) > k*c

    Requires c > 1/2 and mass(f) > c*phi(q).

    Example:
        >>> f = weight_vector(2, {1: 1})
        >>> select_residues_single(f, 4, "3/5", 4).residues
        (1, 1, 1, 1)
    """
    c = Fraction(c)
    if k < 4:
        raise BadK("need k >= 4", k=k)
    if c <= Fraction(1, 2):
        raise HypothesisUnmet("need c > 1/2", c=str(c))
    if f.mass <= c * f.modulus.totient:
        raise HypothesisUnmet("need mass(f) > c*phi(q)", mass=str(f.mass), bound=str(c * f.modulus.totient))
    return _solve([f] * k, c, n, single=True)


def select_residues_multi(fs: Weights, c, n: int) -> ResidueWitness:
    """
    One unit per weight function, summing to n mod q, with a large weight sum

    Requires c > (k+1)/(2k), total mass > k*c*phi(q) and no identically
    zero function. The invoked threshold is c*k, or 16/3*c - 1 when k = 4
    and 3 | q; the stated and recap bounds are reported alongside.
    """
    fs = list(fs)
    c = Fraction(c)
    k = len(fs)
    if k < 4:
        raise BadK("need k >= 4 weight functions", k=k)
    if len({f.q for f in fs}) != 1:
        raise InputError("weight functions must share one modulus", moduli=sorted({f.q for f in fs}))
    q = fs[0].q
    phi = fs[0].modulus.totient
    if c <= Fraction(k + 1, 2 * k):
        raise HypothesisUnmet("need c > (k+1)/(2k)", c=str(c), k=k)
    if k == 4 and q % 3 == 0 and c >= SHARP4_UPPER:
        raise HypothesisUnmet("k = 4 with 3 | q needs c < 15/16", c=str(c), q=q)
    if any(f.is_zero() for f in fs):
        raise HypothesisUnmet("a weight function is identically zero")
    total = sum((f.mass for f in fs), Fraction(0))
    if total <= k * c * phi:
        raise HypothesisUnmet("need total mass > k*c*phi(q)", total=str(total), bound=str(k * c * phi))
    return _solve(fs, c, n, single=False)


def exact_residue_search(fs: Weights, n: int) -> Optional[ResidueWitness]:
    """Optimal positive-weight tuple with sum = n mod q (max-plus DP over Z_q)"""
    q = fs[0].q
    columns = [{x: v for x, v in f.values.items() if v > 0} for f in fs]
    found = maxplus_tuple(columns, q, n)
    if found is None:
        return None
    residues, value = found
    return ResidueWitness(q=q, k=len(fs), target=n % q, residues=residues, value_sum=value,
                          threshold=Fraction(0), branch="exact")


def _brute_chunk(columns: List[List[Tuple[int, Fraction]]], last: Dict[int, Fraction], q: int, n: int,
                 first: Tuple[int, Fraction]):
    best = None
    best_value = None
    for rest in itertools.product(*columns[1:-1]):
        picks = (first,) + rest
        partial = sum(x for x, _ in picks)
        x_last = (n - partial) % q
        if x_last not in last:
            continue
        value = sum((v for _, v in picks), Fraction(0)) + last[x_last]
        if best_value is None or value > best_value:
            best = tuple(x for x, _ in picks) + (x_last,)
            best_value = value
    return best, best_value


def brute_force_residues(fs: Weights, n: int, n_jobs: Optional[int] = None) -> Optional[ResidueWitness]:
    """
    Exhaustive optimum over positive-weight tuples with sum = n mod q

    The last coordinate is determined by the others; work is split over
    the first coordinate.

    Raises:
        TooLarge: phi(q)^k above BRUTE_FORCE_LIMIT
    """
    fs = list(fs)
    q = fs[0].q
    k = len(fs)
    phi = fs[0].modulus.totient
    if phi ** k > settings.BRUTE_FORCE_LIMIT:
        raise TooLarge("phi(q)^k exceeds BRUTE_FORCE_LIMIT", q=q, k=k, limit=settings.BRUTE_FORCE_LIMIT)
    columns = [[(x, v) for x, v in sorted(f.values.items()) if v > 0] for f in fs]
    if any(not col for col in columns):
        return None
    if k == 1:
        x = n % q
        v = fs[0](x)
        if x not in fs[0].values or v <= 0:
            return None
        return ResidueWitness(q=q, k=1, target=x, residues=(x,), value_sum=v,
                              threshold=Fraction(0), branch="oracle")
    last = dict(columns[-1])
    jobs = n_jobs or settings.THREADS
    if jobs > 1:
        parts = Parallel(n_jobs=jobs, prefer="threads")(
            delayed(_brute_chunk)(columns, last, q, n, first) for first in columns[0]
        )
    else:
        parts = [_brute_chunk(columns, last, q, n, first) for first in columns[0]]

    best = None
    best_value = None
    for residues, value in parts:
        if residues is not None and (best_value is None or value > best_value):
            best, best_value = residues, value
    if best is None:
        return None
    return ResidueWitness(q=q, k=k, target=n % q, residues=best, value_sum=best_value,
                          threshold=Fraction(0), branch="oracle")


def admissible_targets(q: int, k: int) -> List[int]:
    """Residues n mod q reachable in principle (parity forced when q is even)"""
    if q % 2 == 0:
        return [n for n in range(q) if (n - k) % 2 == 0]
    return list(range(q))


# ============================================
# k = 3 CONTRAST
# ============================================

def triple_sum_obstruction(q: int = 15) -> Optional[Dict[str, object]]:
    """
    A dense subset of Z_q* whose 3-fold sumset misses residues

    Searches subsets of size floor(phi/2) + 1 (density above 1/2) and returns
    the first one, in enumeration order, whose sumset misses a residue.
    """
    modulus = factor_squarefree(q)
    residues = units(modulus)
    size = len(residues) // 2 + 1
    for subset in itertools.combinations(residues, size):
        reached = set(sumset([subset] * 3, q))
        missed = [x for x in range(q) if x not in reached]
        if missed:
            return {"q": q, "subset": list(subset), "density": Fraction(size, len(residues)), "missed": missed}
    return None


def residue_witness_payload(w: ResidueWitness) -> Dict[str, object]:
    return {
        "q": w.q,
        "k": w.k,
        "n": w.target,
        "residues": list(w.residues),
        "value_sum": w.value_sum,
        "threshold": w.threshold,
        "branch": w.branch,
        "bounds": w.bounds,
        "meets_stated_bound": w.meets_stated_bound,
    }

