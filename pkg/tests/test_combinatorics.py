"""
Test the selection lemmas, the enumeration oracle and grid verification
"""

from fractions import Fraction

import pytest

from primesums.core.errors import BadK, BadShape, HypothesisUnmet, InputError, TooLarge
from primesums.models.schemas import SelectLemmaRequest
from primesums.services.combinatorics_service import (
    brute_force_select,
    grid_verify,
    multi_sharpness_instance,
    select_multi,
    select_sharp4,
    select_single,
    sharp4_family,
    single_sharpness_instance,
)

F = Fraction


# ============================================
# Single sequence
# ============================================

def test_select_single_all_ones():
    w = select_single([1, 1], 4, "3/5")
    assert w.indices == (0, 1, 0, 1)
    assert w.value_sum == 4
    assert w.fast_path


def test_select_single_half_values():
    w = select_single([1, F(1, 2)], 4, "37/50")
    assert w.value_sum == 3
    assert w.value_sum > w.threshold == F(74, 25)
    assert w.index_sum >= 2


def test_select_single_length_four():
    w = select_single([1, F(9, 10), F(2, 5), 0], 4, "11/20")
    assert w.indices == (1, 1, 1, 1)
    assert w.value_sum == F(18, 5)


def test_select_single_hypotheses():
    with pytest.raises(BadK):
        select_single([1, 1], 3, "3/5")
    with pytest.raises(HypothesisUnmet):
        select_single([1, 1, 1], 4, "3/5")
    with pytest.raises(HypothesisUnmet):
        select_single([1, 0], 4, "3/5")
    with pytest.raises(HypothesisUnmet):
        select_single([1, 1], 4, "1/2")
    with pytest.raises(InputError):
        select_single([F(1, 2), 1], 4, "3/5")


def test_select_single_odd_behind_flag():
    w = select_single([1, 1, 1], 4, "3/5", allow_odd=True)
    assert w.index_sum >= 3
    assert w.value_sum == 4


# ============================================
# Four length-2 sequences
# ============================================

def test_select_sharp4_all_ones():
    w = select_sharp4([1, 1], [1, 1], [1, 1], [1, 1], "0.63")
    assert w.indices == (1, 1, 0, 0)
    assert w.value_sum == 4


def test_select_sharp4_near_extremal():
    head = [1, F(2, 3)]
    w = select_sharp4(head, head, head, [F(1, 10), 0], "63/100")
    assert w.value_sum == F(73, 30)
    assert w.threshold == F(16, 3) * F(63, 100) - 1
    assert w.indices[3] == 0


def test_select_sharp4_hypotheses():
    with pytest.raises(HypothesisUnmet):
        select_sharp4([1, 1], [1, 1], [1, 1], [0, 0], "0.63")
    with pytest.raises(HypothesisUnmet):
        select_sharp4([1, 1], [1, 1], [1, 1], [1, 1], "0.6")
    with pytest.raises(HypothesisUnmet):
        select_sharp4([1, 1], [1, 1], [1, 1], [1, 1], "15/16")
    with pytest.raises(BadShape):
        select_sharp4([1, 1, 1], [1, 1], [1, 1], [1, 1], "0.63")


# ============================================
# k sequences
# ============================================

def test_select_multi_examples():
    w = select_multi([[1, 1, 1]] * 4, "7/10")
    assert w.indices == (1, 1, 1, 0)
    assert w.value_sum == 4

    w = select_multi([[1, F(4, 5)]] * 5, "13/20")
    assert w.indices == (1, 1, 0, 0, 0)
    assert w.value_sum == F(23, 5)


def test_select_multi_request_example():
    example = SelectLemmaRequest.model_config["json_schema_extra"]["example"]
    w = select_multi(example["columns"], F(16, 25))
    assert w.index_sum >= 3
    assert w.value_sum > w.threshold == F(64, 25)


def test_select_multi_shapes():
    with pytest.raises(BadShape):
        select_multi([[1, 1]] * 4, "7/10")
    with pytest.raises(BadShape):
        select_multi([[1, 1, 1], [1, 1], [1, 1, 1], [1, 1, 1]], "7/10")
    with pytest.raises(HypothesisUnmet):
        select_multi([[1, 1, 1]] * 4, "5/8")


# ============================================
# Oracle
# ============================================

def test_brute_force_matches_selectors():
    cases = [
        (select_single([1, F(1, 2)], 4, "37/50"), [[1, F(1, 2)]], 4, 2),
        (select_single([1, F(9, 10), F(2, 5), 0], 4, "11/20"), [[1, F(9, 10), F(2, 5), 0]], 4, 4),
        (select_multi([[1, F(4, 5)]] * 5, "13/20"), [[1, F(4, 5)]] * 5, None, 2),
    ]
    for witness, cols, k, floor in cases:
        best = brute_force_select(cols, k, floor)
        assert best.value_sum == witness.value_sum


def test_brute_force_degenerate_columns():
    assert brute_force_select([[0, 0]], 4, 2) is None
    one = brute_force_select([[1]], 4)
    assert one.indices == (0, 0, 0, 0)
    assert one.index_sum == 0


# ============================================
# Grid verification
# ============================================

def test_grid_lemma_single():
    report = grid_verify("3.1", 2, 4, ["0", "1/4", "1/2", "3/4", "1"], "0.51")
    assert report["failures"] == []
    assert report["hypothesis_hits"] > 0


def test_grid_lemma_sharp4():
    report = grid_verify("3.2", 2, 4, ["0", "1/3", "2/3", "1"], "0.64")
    assert report["failures"] == []
    assert report["hypothesis_hits"] > 0
    assert report["instances_checked"] == 10**4


def test_grid_lemma_multi():
    report = grid_verify("3.3", 3, 4, ["0", "1/2", "1"], "0.64")
    assert report["failures"] == []
    assert report["multisets_checked"] == 715
    assert report["instances_checked"] == 10**4


GRID = ["0", "1/4", "1/2", "3/4", "1"]


@pytest.mark.slow
@pytest.mark.parametrize("lemma, n, k, c", [
    ("3.1", 2, 4, "0.51"),
    ("3.1", 2, 5, "0.51"),
    ("3.1", 4, 4, "0.51"),
    ("3.1", 4, 5, "0.51"),
    ("3.2", 2, 4, "0.64"),
    ("3.2", 2, 4, "0.7"),
    ("3.3", 2, 5, F(3, 5) + F(1, 100)),
    ("3.3", 3, 4, F(5, 8) + F(1, 100)),
])
def test_full_value_grid(lemma, n, k, c):
    report = grid_verify(lemma, n, k, GRID, c)
    assert report["failures"] == []
    assert report["hypothesis_hits"] > 0


def test_grid_budget(monkeypatch):
    from primesums.core.config import settings

    monkeypatch.setattr(settings, "GRID_BUDGET", 10)
    with pytest.raises(TooLarge):
        grid_verify("3.3", 3, 4, ["0", "1/2", "1"], "0.64")


# ============================================
# Sharpness
# ============================================

def test_sharp4_gap_shrinks():
    gaps = [sharp4_family(eps)["gap"] for eps in ("1/10", "1/100", "1/1000")]
    assert all(g > 0 for g in gaps)
    assert gaps[0] > gaps[1] > gaps[2]
    assert sharp4_family("1/1000")["within_two_eps"]


def test_lemma_sharpness_instances():
    single = single_sharpness_instance(4, 4)
    assert single["optimum"] == single["kc"] == 2
    assert not single["strict_holds"]

    multi = multi_sharpness_instance(4)
    assert multi["total"] == multi["cnk"]
    assert not multi["witness_exists"]
