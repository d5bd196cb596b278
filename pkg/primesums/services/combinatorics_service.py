"""
Combinatorics Service
Selection lemmas for nonincreasing [0,1] sequences as exact selectors

Each selector maximizes the selected value sum subject to an index-sum
floor, over positive entries only, with exact rational arithmetic. The
tuples used in the inductive constructions (alternating (0, n/2, 0, n/2, ...)
for one sequence, balanced tuples for several) are tried first and kept when
they reach the optimum.

Known discrepancy: the induction step for the k-sequence lemma states an
intermediate bound of 7/15 * kc where the conclusion needs kc; the selectors
use "> kc" as the contract.
"""

import itertools
from fractions import Fraction
from math import comb, factorial
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from joblib import Parallel, delayed

from primesums.core.config import settings
from primesums.core.errors import (
    BadK,
    BadShape,
    ContractViolation,
    HypothesisUnmet,
    InputError,
    NoWitness,
    TooLarge,
)
from primesums.core.logger import get_logger
from primesums.models.domain import SelectionWitness, ValueSequence

logger = get_logger(__name__)

LEMMAS = ("3.1", "3.2", "3.3")

SHARP4_LOWER = Fraction(5, 8)
SHARP4_UPPER = Fraction(15, 16)

Columns = Sequence[ValueSequence]


def as_sequence(values: Iterable) -> ValueSequence:
    if isinstance(values, ValueSequence):
        return values
    return ValueSequence(tuple(Fraction(v) for v in values))


# ============================================
# EXACT SELECTION (DP)
# ============================================

def _witness(cols: Columns, indices: Sequence[int], threshold: Fraction, lemma: str,
             fast_path: bool = False) -> SelectionWitness:
    indices = tuple(int(i) for i in indices)
    values = [cols[j][i] for j, i in enumerate(indices)]
    return SelectionWitness(
        indices=indices,
        index_sum=sum(indices),
        value_sum=sum(values, Fraction(0)),
        threshold=threshold,
        all_positive=all(v > 0 for v in values),
        lemma=lemma,
        fast_path=fast_path,
    )


def optimal_selection(cols: Columns, floor: int) -> Optional[Tuple[Tuple[int, ...], Fraction]]:
    """
    Lexicographically smallest tuple maximizing sum_j cols[j][i_j]

    Subject to sum i_j >= floor and every selected entry > 0. Runs a
    backward DP over (column, capped index sum).

    Returns:
        (indices, value_sum) or None when no admissible tuple exists
    """
    k = len(cols)
    floor = max(int(floor), 0)
    # best[j][t]: max value of columns j.. given index sum t so far (capped at floor)
    best: List[List[Optional[Fraction]]] = [[None] * (floor + 1) for _ in range(k + 1)]
    best[k][floor] = Fraction(0)
    for j in range(k - 1, -1, -1):
        col = cols[j]
        for t in range(floor + 1):
            top = None
            for i in range(len(col)):
                if col[i] <= 0:
                    continue
                rest = best[j + 1][min(t + i, floor)]
                if rest is None:
                    continue
                value = col[i] + rest
                if top is None or value > top:
                    top = value
            best[j][t] = top

    if best[0][0] is None:
        return None

    indices = []
    t = 0
    for j in range(k):
        col = cols[j]
        target = best[j][t]
        for i in range(len(col)):
            if col[i] <= 0:
                continue
            rest = best[j + 1][min(t + i, floor)]
            if rest is not None and col[i] + rest == target:
                indices.append(i)
                t = min(t + i, floor)
                break
    return tuple(indices), best[0][0]


def alternating_tuple(n: int, k: int) -> Tuple[int, ...]:
    """(0, n/2, 0, n/2, ...) of length k"""
    return tuple(0 if j % 2 == 0 else n // 2 for j in range(k))


def balanced_tuple(n: int, k: int) -> Tuple[int, ...]:
    """Index sum n spread over the leading columns, e.g. (1, 1, 0, 0) for n=2, k=4"""
    return tuple(n // k + (1 if j < n % k else 0) for j in range(k))


def _select(cols: Columns, floor: int, threshold: Fraction, lemma: str,
            fast: Optional[Tuple[int, ...]]) -> SelectionWitness:
    found = optimal_selection(cols, floor)
    if found is None or found[1] <= threshold:
        optimum = None if found is None else str(found[1])
        logger.error(f"❌ No witness above {threshold} for lemma {lemma} (optimum {optimum})")
        raise NoWitness(
            f"no admissible tuple exceeds the threshold {threshold}",
            lemma=lemma,
            threshold=str(threshold),
            optimum=optimum,
        )
    indices, optimum = found
    if fast is not None and all(i < len(col) for i, col in zip(fast, cols)):
        candidate = _witness(cols, fast, threshold, lemma, fast_path=True)
        if candidate.all_positive and candidate.index_sum >= floor and candidate.value_sum == optimum:
            return _checked(candidate, floor)
    return _checked(_witness(cols, indices, threshold, lemma), floor)


def _checked(w: SelectionWitness, floor: int) -> SelectionWitness:
    if not (w.all_positive and w.index_sum >= floor and w.value_sum > w.threshold):
        raise ContractViolation("selection witness failed recomputation", indices=list(w.indices))
    return w


# ============================================
# SELECTORS
# ============================================

def select_single(a, k: int, c, allow_odd: bool = False) -> SelectionWitness:
    """
    One nonincreasing sequence a_0..a_{n-1}, sum > n*c, c > 1/2

    Returns indices i_1..i_k with index sum >= n and value sum > k*c.

    Example:
        >>> select_single([1, 1], 4, "3/5").indices
        (0, 1, 0, 1)
    """
    seq = as_sequence(a)
    c = Fraction(c)
    n = len(seq)
    if k < 4:
        raise BadK("need k >= 4", k=k)
    if n < 2:
        raise BadShape("need a sequence of length >= 2", n=n)
    if n % 2 and not allow_odd:
        raise HypothesisUnmet("sequence length must be even (pass allow_odd to try odd n)", n=n)
    if c <= Fraction(1, 2):
        raise HypothesisUnmet("need c > 1/2", c=str(c))
    if seq.total <= n * c:
        raise HypothesisUnmet("need sum a_i > n*c", total=str(seq.total), bound=str(n * c))
    cols = [seq] * k
    return _select(cols, n, k * c, "3.1", alternating_tuple(n, k))


def select_sharp4(a, b, c, d, cp) -> SelectionWitness:
    """
    Four nonincreasing length-2 sequences with positive heads and total > 8*cp

    Returns (i, j, k, l) with index sum >= 2 and value sum > 16/3*cp - 1.
    cp must lie in (5/8, 15/16): at cp >= 15/16 the bound reaches 4 and
    no tuple of [0,1] values can exceed it.
    """
    cols = [as_sequence(s) for s in (a, b, c, d)]
    cp = Fraction(cp)
    if any(len(col) != 2 for col in cols):
        raise BadShape("select_sharp4 takes four sequences of length 2", lengths=[len(col) for col in cols])
    if not SHARP4_LOWER < cp < SHARP4_UPPER:
        raise HypothesisUnmet("need 5/8 < cp < 15/16", cp=str(cp))
    if any(col[0] <= 0 for col in cols):
        raise HypothesisUnmet("every sequence needs a positive first entry")
    total = sum((col.total for col in cols), Fraction(0))
    if total <= 8 * cp:
        raise HypothesisUnmet("need total > 8*cp", total=str(total), bound=str(8 * cp))
    return _select(cols, 2, sharp4_threshold(cp), "3.2", balanced_tuple(2, 4))


def sharp4_threshold(cp: Fraction) -> Fraction:
    return Fraction(16, 3) * Fraction(cp) - 1


def check_multi_shape(n: int, k: int) -> None:
    if not ((n >= 3 and k >= 4) or (n == 2 and k >= 5)):
        raise BadShape("need (n >= 3, k >= 4) or (n = 2, k >= 5); use select_sharp4 for n = 2, k = 4", n=n, k=k)


def select_multi(cols, c) -> SelectionWitness:
    """
    k nonincreasing sequences of common length n, positive heads, total > c*n*k

    Returns indices with index sum >= n and value sum > c*k, for
    c > (k+1)/(2k).

    Example:
        >>> select_multi([[1, 1, 1]] * 4, "7/10").indices
        (1, 1, 1, 0)
    """
    columns = [as_sequence(col) for col in cols]
    c = Fraction(c)
    k = len(columns)
    lengths = {len(col) for col in columns}
    if len(lengths) != 1:
        raise BadShape("columns must share one length", lengths=sorted(lengths))
    n = lengths.pop()
    check_multi_shape(n, k)
    if c <= Fraction(k + 1, 2 * k):
        raise HypothesisUnmet("need c > (k+1)/(2k)", c=str(c), k=k)
    if any(col[0] <= 0 for col in columns):
        raise HypothesisUnmet("every column needs a positive first entry")
    total = sum((col.total for col in columns), Fraction(0))
    if total <= c * n * k:
        raise HypothesisUnmet("need total > c*n*k", total=str(total), bound=str(c * n * k))
    return _select(columns, n, c * k, "3.3", balanced_tuple(n, k))


# ============================================
# ORACLE
# ============================================

def brute_force_select(cols, k: Optional[int] = None, index_sum_floor: int = 0) -> Optional[SelectionWitness]:
    """
    Exhaustive optimum over index tuples (DP when enumeration is too big)

    A single column with k given is repeated k times.

    Returns:
        Optimal witness (threshold 0) or None when no all-positive tuple
        meets the floor
    """
    columns = [as_sequence(col) for col in cols]
    if k is not None and len(columns) == 1:
        columns = columns * k
    limit = settings.BRUTE_FORCE_LIMIT
    space = 1
    for col in columns:
        space *= len(col)

    if space <= limit:
        best = None
        best_value = None
        for indices in itertools.product(*[range(len(col)) for col in columns]):
            if sum(indices) < index_sum_floor:
                continue
            values = [col[i] for col, i in zip(columns, indices)]
            if any(v <= 0 for v in values):
                continue
            value = sum(values, Fraction(0))
            if best_value is None or value > best_value:
                best, best_value = indices, value
        if best is None:
            return None
        return _witness(columns, best, Fraction(0), "oracle")

    if len(columns) * max(len(col) for col in columns) * (index_sum_floor + 1) > limit:
        raise TooLarge("instance too large for enumeration and DP", space=space, limit=limit)
    found = optimal_selection(columns, index_sum_floor)
    if found is None:
        return None
    return _witness(columns, found[0], Fraction(0), "oracle")


# ============================================
# GRID VERIFICATION
# ============================================

def nonincreasing_sequences(grid: Sequence[Fraction], n: int) -> List[Tuple[Fraction, ...]]:
    values = sorted(set(grid), reverse=True)
    return [tuple(s) for s in itertools.combinations_with_replacement(values, n)]


def _orderings(multiset: Sequence[int]) -> int:
    counts: Dict[int, int] = {}
    for item in multiset:
        counts[item] = counts.get(item, 0) + 1
    total = factorial(len(multiset))
    for count in counts.values():
        total //= factorial(count)
    return total


def _check_instance(lemma: str, columns: List[Tuple[Fraction, ...]], k: int, c: Fraction) -> Optional[Dict]:
    """None when the hypothesis fails, else a per-instance outcome"""
    try:
        if lemma == "3.1":
            witness = select_single(columns[0], k, c)
            floor = len(columns[0])
        elif lemma == "3.2":
            witness = select_sharp4(*columns, c)
            floor = 2
        else:
            witness = select_multi(columns, c)
            floor = len(columns[0])
    except HypothesisUnmet:
        return None
    except (NoWitness, ContractViolation) as e:
        return {"ok": False, "columns": [[str(v) for v in col] for col in columns], "reason": e.code}
    ok = witness.all_positive and witness.index_sum >= floor and witness.value_sum > witness.threshold
    result = {"ok": ok}
    if not ok:
        result.update({"columns": [[str(v) for v in col] for col in columns], "reason": "witness"})
    return result


def _check_chunk(lemma: str, chunk: List[Tuple[int, ...]], sequences, k: int, c: Fraction):
    checked = hits = weighted_checked = weighted_hits = 0
    failures = []
    for multiset in chunk:
        weight = _orderings(multiset)
        columns = [sequences[i] for i in multiset]
        outcome = _check_instance(lemma, columns, k, c)
        checked += 1
        weighted_checked += weight
        if outcome is None:
            continue
        hits += 1
        weighted_hits += weight
        if not outcome["ok"]:
            failures.append(outcome)
    return checked, hits, weighted_checked, weighted_hits, failures


def grid_verify(lemma: str, n: int, k: int, grid: Sequence, c, n_jobs: Optional[int] = None) -> Dict[str, object]:
    """
    Run a selector on every nonincreasing instance over a value grid

    The column-symmetric lemmas (3.2, 3.3) are enumerated by column
    multisets; weighted counts give the number of ordered matrices.

    Returns:
        {lemma, n, k, c, grid, instances_checked, hypothesis_hits,
         multisets_checked, multiset_hypothesis_hits, failures}

    Raises:
        TooLarge: more instances than GRID_BUDGET
    """
    lemma = str(lemma)
    if lemma not in LEMMAS:
        raise InputError(f"unknown lemma '{lemma}'", lemma=lemma, lemmas=list(LEMMAS))
    c = Fraction(c)
    values = sorted({Fraction(v) for v in grid})
    if any(v < 0 or v > 1 for v in values):
        raise InputError("grid values must lie in [0, 1]")
    if lemma == "3.2":
        n, k = 2, 4
    sequences = nonincreasing_sequences(values, n)
    width = 1 if lemma == "3.1" else k
    total = comb(len(sequences) + width - 1, width)
    if total > settings.GRID_BUDGET:
        raise TooLarge("grid instance count exceeds GRID_BUDGET", instances=total, budget=settings.GRID_BUDGET)

    multisets = list(itertools.combinations_with_replacement(range(len(sequences)), width))
    jobs = n_jobs or settings.THREADS
    size = max(1, len(multisets) // (4 * jobs) + 1)
    chunks = [multisets[i:i + size] for i in range(0, len(multisets), size)]
    logger.info(f"🔍 Lemma {lemma}: {len(multisets):,} instance class(es), n={n}, k={k}, c={c}")

    if jobs > 1 and len(chunks) > 1:
        parts = Parallel(n_jobs=jobs, prefer="threads")(
            delayed(_check_chunk)(lemma, chunk, sequences, k, c) for chunk in chunks
        )
    else:
        parts = [_check_chunk(lemma, chunk, sequences, k, c) for chunk in chunks]

    failures = [f for part in parts for f in part[4]]
    report = {
        "lemma": lemma,
        "n": n,
        "k": k,
        "c": c,
        "grid": values,
        "instances_checked": sum(part[2] for part in parts),
        "hypothesis_hits": sum(part[3] for part in parts),
        "multisets_checked": sum(part[0] for part in parts),
        "multiset_hypothesis_hits": sum(part[1] for part in parts),
        "failures": failures,
    }
    if failures:
        logger.error(f"❌ Lemma {lemma}: {len(failures)} counterexample(s)")
    else:
        logger.info(f"✅ Lemma {lemma}: no counterexamples in {report['hypothesis_hits']:,} hypothesis hits")
    return report


# ============================================
# SHARPNESS INSTANCES
# ============================================

def sharp4_family(eps, slack="1/1000000") -> Dict[str, object]:
    """
    a = b = c = (1, 2/3), d = (eps, 0) at cp = (5 + eps)/8 - slack

    The optimum minus the threshold shrinks with eps.
    """
    eps = Fraction(eps)
    slack = Fraction(slack)
    cp = (5 + eps) / 8 - slack
    head = [Fraction(1), Fraction(2, 3)]
    witness = select_sharp4(head, head, head, [eps, Fraction(0)], cp)
    gap = witness.value_sum - witness.threshold
    return {
        "eps": eps,
        "cp": cp,
        "indices": witness.indices,
        "optimum": witness.value_sum,
        "threshold": witness.threshold,
        "gap": gap,
        "within_two_eps": gap < 2 * eps,
    }


def single_sharpness_instance(n: int, k: int = 4) -> Dict[str, object]:
    """Constant 1/2 sequence: the optimum equals k*c at c = 1/2, never above it"""
    seq = as_sequence([Fraction(1, 2)] * n)
    found = optimal_selection([seq] * k, n)
    optimum = found[1] if found else Fraction(0)
    kc = Fraction(k, 2)
    return {"n": n, "k": k, "c": Fraction(1, 2), "optimum": optimum, "kc": kc, "strict_holds": optimum > kc}


def multi_sharpness_instance(k: int) -> Dict[str, object]:
    """Columns (1,1), (1,0), ..., (1,0): total c*n*k at c = (k+1)/(2k), no admissible tuple"""
    cols = [as_sequence([1, 1])] + [as_sequence([1, 0])] * (k - 1)
    total = sum((col.total for col in cols), Fraction(0))
    c = Fraction(k + 1, 2 * k)
    found = optimal_selection(cols, 2)
    return {"k": k, "c": c, "total": total, "cnk": c * 2 * k, "witness_exists": found is not None}
