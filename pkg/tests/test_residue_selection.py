"""
Test residue selection on Z_q* (prime base, CRT induction, oracle agreement)
"""

from fractions import Fraction

import pytest

from primesums.core.errors import BadK, HypothesisUnmet, InputError, ParityMismatch
from primesums.models.domain import WeightVector
from primesums.services.arithmetic_service import factor_squarefree, is_squarefree, units_of
from primesums.services.residue_service import (
    admissible_targets,
    brute_force_residues,
    exact_residue_search,
    fiber_average,
    prime_base_case,
    random_weight_family,
    random_weights,
    select_residues_multi,
    select_residues_single,
    selection_bounds,
    triple_sum_obstruction,
    validate_residue_witness,
    weight_vector,
)

F = Fraction


def ones(q: int):
    return weight_vector(q, {x: 1 for x in units_of(q)})


# ============================================
# Weight vectors
# ============================================

def test_weight_vector_rejects_non_units():
    with pytest.raises(InputError):
        weight_vector(15, {3: 1})
    with pytest.raises(InputError):
        weight_vector(5, {1: 2})
    f = weight_vector(15, {1: "1/2"})
    assert f(16) == F(1, 2)
    assert f.mass == F(1, 2)


def test_weight_vector_keys_are_the_units():
    modulus = factor_squarefree(15)
    with pytest.raises(InputError):
        WeightVector(modulus=modulus, values={1: 1})
    with pytest.raises(InputError):
        WeightVector(modulus=modulus, values={**{x: 1 for x in units_of(15)}, 3: 1})
    assert WeightVector(modulus=modulus, values={x: 1 for x in units_of(15)}).mass == 8
    assert WeightVector(modulus=factor_squarefree(1), values={0: 1}).mass == 1


def test_fiber_average_examples():
    g = fiber_average(ones(15), 5)
    assert g.q == 3
    assert g.values == {1: 1, 2: 1}

    g = fiber_average(weight_vector(15, {1: 1, 4: 1}), 5)
    assert g.values == {1: F(1, 2), 2: 0}


def test_fiber_average_conserves_mass():
    f = random_weights(105, seed=9)
    g = fiber_average(f, 7)
    assert g.q == 15
    assert g.mass * 6 == f.mass


# ============================================
# Single weight function
# ============================================

def test_single_modulus_two():
    w = select_residues_single(weight_vector(2, {1: 1}), 4, "3/5", 4)
    assert w.residues == (1, 1, 1, 1)
    assert w.value_sum == 4


def test_single_modulus_three():
    f = weight_vector(3, {1: 1, 2: F(9, 10)})
    w = select_residues_single(f, 4, "3/5", 5)
    assert sum(w.residues) % 3 == 2
    assert w.value_sum >= F(18, 5)
    assert w.value_sum > F(12, 5)
    assert brute_force_residues([f] * 4, 5).value_sum == w.value_sum


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_single_mod15_every_target(seed):
    f = random_weights(15, seed=seed, mass_floor="0.55")
    for n in range(15):
        w = select_residues_single(f, 4, "0.55", n)
        validate_residue_witness([f] * 4, w)
        assert sum(w.residues) % 15 == n
        assert brute_force_residues([f] * 4, n).value_sum >= w.value_sum


@pytest.mark.parametrize("q", [6, 15, 30, 105])
def test_crt_composition_congruence(q):
    f = ones(q)
    for n in admissible_targets(q, 4)[:12]:
        w = select_residues_single(f, 4, "3/5", n)
        assert sum(w.residues) % q == n % q
        assert all(x in f.values for x in w.residues)


def test_single_hypotheses():
    with pytest.raises(BadK):
        select_residues_single(ones(5), 3, "3/5", 1)
    with pytest.raises(HypothesisUnmet):
        select_residues_single(weight_vector(5, {1: 1}), 4, "3/5", 1)


# ============================================
# Several weight functions
# ============================================

def test_multi_mod3_branch():
    fs = [ones(3)] * 4
    w = select_residues_multi(fs, "0.64", 1)
    assert sum(w.residues) % 3 == 1
    assert w.value_sum == 4
    assert w.threshold == F(16, 3) * F(16, 25) - 1
    assert w.bounds["lemma_stated"] == 4 * w.threshold
    assert w.meets_stated_bound is False


def test_multi_modulus_two():
    w = select_residues_multi([weight_vector(2, {1: 1})] * 4, "7/10", 4)
    assert w.residues == (1, 1, 1, 1)
    with pytest.raises(ParityMismatch):
        select_residues_multi([weight_vector(2, {1: 1})] * 4, "7/10", 3)


def test_even_modulus_forces_parity():
    w = select_residues_multi([ones(6)] * 4, "7/10", 10)
    assert all(x % 2 == 1 for x in w.residues)
    assert sum(w.residues) % 6 == 4


def test_multi_hypotheses():
    with pytest.raises(HypothesisUnmet):
        select_residues_multi([ones(5)] * 4, "5/8", 1)
    with pytest.raises(HypothesisUnmet):
        select_residues_multi([ones(3)] * 4, "15/16", 1)
    with pytest.raises(HypothesisUnmet):
        select_residues_multi([ones(5)] * 3 + [weight_vector(5, {})], "7/10", 1)
    with pytest.raises(InputError):
        select_residues_multi([ones(5)] * 3 + [ones(7)], "7/10", 1)


@pytest.mark.parametrize("q", [2, 3, 5, 6, 7, 10, 15])
def test_multi_agrees_with_oracle(q):
    for seed in range(2):
        fs = random_weight_family(q, 4, seed, "7/10")
        for n in admissible_targets(q, 4):
            w = select_residues_multi(fs, "7/10", n)
            validate_residue_witness(fs, w)
            assert brute_force_residues(fs, n).value_sum >= w.value_sum


def test_selection_bounds():
    assert selection_bounds(5, 4, F(7, 10), single=False)["invoked"] == F(14, 5)
    bounds = selection_bounds(15, 4, F(7, 10), single=False)
    assert bounds["invoked"] == F(16, 3) * F(7, 10) - 1
    assert bounds["recap"] == (2 * F(7, 10) - 1) * 4


# ============================================
# Prime base case
# ============================================

def test_prime_base_all_ones():
    w = prime_base_case([ones(5)] * 4, "7/10", 3)
    assert sum(w.residues) % 5 == 3
    assert w.value_sum == 4
    assert w.branch.startswith("prime-base")


def test_prime_base_partial_support():
    f = weight_vector(7, {1: 1, 2: 1, 3: 1})
    for n in range(7):
        w = prime_base_case([f] * 4, "0.51", n, check_hypothesis=False)
        assert sum(w.residues) % 7 == n
        assert set(w.residues) <= {1, 2, 3}


def test_prime_base_low_mass():
    with pytest.raises(HypothesisUnmet):
        prime_base_case([weight_vector(5, {1: 1})] * 4, "7/10", 3)


# ============================================
# Oracle and contrast
# ============================================

def test_oracle_edge_cases():
    zero = weight_vector(5, {})
    assert brute_force_residues([zero] * 4, 2) is None
    trivial = weight_vector(1, {0: 1})
    w = brute_force_residues([trivial] * 4, 17)
    assert w.residues == (0, 0, 0, 0)


def test_three_summands_can_miss_residues():
    found = triple_sum_obstruction(15)
    assert found is not None
    assert found["density"] > F(1, 2)
    assert found["missed"]


# ============================================
# Every squarefree modulus up to 105
# ============================================

SQUAREFREE = [q for q in range(2, 106) if is_squarefree(q)]


@pytest.mark.slow
@pytest.mark.parametrize("q", SQUAREFREE)
@pytest.mark.parametrize("k", [4, 5])
def test_selection_on_every_small_modulus(q, k):
    for seed in range(2):
        fs = random_weight_family(q, k, seed, "7/10")
        f = random_weights(q, seed, mass_floor="3/5")
        for n in admissible_targets(q, k):
            w = select_residues_multi(fs, "7/10", n)
            validate_residue_witness(fs, w)
            assert exact_residue_search(fs, n).value_sum >= w.value_sum

            w = select_residues_single(f, k, "3/5", n)
            validate_residue_witness([f] * k, w)
            assert w.value_sum > k * F(3, 5)
