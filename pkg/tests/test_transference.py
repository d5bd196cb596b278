"""
Test the transference pipeline stages and the assembled report
"""

from math import log

import numpy as np
import pytest

from primesums.core.errors import InputError, NoPrimeInInterval
from primesums.services.prime_set_service import empty_subset, subset_from_spec
from primesums.services.transference_service import (
    bohr_set,
    build_config,
    build_weighted_indicators,
    choose_N,
    dft,
    inverse_dft,
    kfold_value,
    kfold_value_direct,
    load_config,
    parse_key_values,
    residue_weights,
    smallest_prime_in,
    smooth,
    superlevel_and_bohr,
    transference_report,
    wtrick,
)


# ============================================
# Config
# ============================================

def test_parse_key_values():
    text = """
    # quick run
    n = 1000
    kappa = 1/20   # default
    subset = mod3:1
    subset = all
    W_override = none
    """
    values = parse_key_values(text)
    assert values["n"] == "1000"
    assert values["kappa"] == "1/20"
    assert values["subsets"] == ["mod3:1", "all"]
    assert values["W_override"] is None

    values = parse_key_values("subsets = all; all ;mod3:1;empty")
    assert values["subsets"] == ["all", "all", "mod3:1", "empty"]

    with pytest.raises(InputError):
        parse_key_values("n 1000")


def test_build_config_validation():
    config = build_config({"n": "1000", "kappa": "auto", "subsets": ["all"]})
    assert config.kappa == "auto"
    assert config.subset_specs() == ["all"] * 4

    with pytest.raises(InputError):
        build_config({"n": 1001})
    with pytest.raises(InputError):
        build_config({"n": 1000, "W_override": 12})
    with pytest.raises(InputError):
        build_config({"n": 1000, "delta": "1"})
    with pytest.raises(InputError):
        build_config({"n": 1000, "subsets": ["all", "all"]})


def test_load_config(tmp_path):
    path = tmp_path / "run.conf"
    path.write_text("n = 1000\nW_override = 6\n", encoding="utf-8")
    config = load_config(path)
    assert config.n == 1000
    assert config.W_override == 6
    with pytest.raises(InputError):
        load_config(tmp_path / "missing.conf")


# ============================================
# W-trick, weights and N
# ============================================

def test_wtrick():
    result = wtrick(10**6)
    assert result["omega"] == pytest.approx(0.6564, abs=1e-3)
    assert result["W"] == 1
    assert wtrick(10**6, override=6)["W"] == 6
    with pytest.raises(InputError):
        wtrick(15)
    with pytest.raises(InputError):
        wtrick(10**6, override=12)


def test_residue_weights_all_primes():
    P = subset_from_spec("all", 50000)
    f, info = residue_weights(P, 10**5, 6, "1/10000", "1/2")
    assert set(f.values) == {1, 5}
    assert all(0.8 <= float(v) <= 1 for v in f.values.values())
    assert set(info["raw"]) == {1, 5}


def test_residue_weights_missing_class():
    P = subset_from_spec("mod3:1", 50000)
    f, _ = residue_weights(P, 10**5, 6, "1/10000", "1/2")
    assert f(5) == 0
    assert f(1) > 0


def test_choose_N():
    assert choose_N(10**5, 1, "0.05")["N"] == 105019
    chosen = choose_N(96, 1, "0.05")
    assert chosen["N"] == 101
    assert chosen["widenings"] == 0
    with pytest.raises(NoPrimeInInterval):
        smallest_prime_in(24, 28)


def test_weighted_indicators():
    a, alpha = build_weighted_indicators(empty_subset(101), 0, 1, 101)
    assert not a.any()
    assert alpha == 0

    a, alpha = build_weighted_indicators(subset_from_spec("all", 101), 0, 1, 101)
    assert a[7] * 101 == pytest.approx(log(7))
    assert a[8] == 0
    assert alpha == pytest.approx(float(a.sum()))


# ============================================
# Fourier stages
# ============================================

def test_dft_of_delta():
    assert np.allclose(dft([1, 0, 0, 0]).coefficients, np.ones(4))
    values = np.arange(7, dtype=np.float64)
    assert np.allclose(inverse_dft(dft(values)).real, values)
    with pytest.raises(InputError):
        dft([])


def test_bohr_set():
    assert bohr_set([1], 101, "0.05").tolist() == [0, 1, 2, 3, 4, 5, 96, 97, 98, 99, 100]
    assert len(bohr_set([0], 101, "0.05")) == 101


def test_superlevel_sets():
    spectrum = dft(np.full(101, 1 / 101))
    level = superlevel_and_bohr(spectrum, "1/2", "0.05")
    assert level["R"] == [0]
    assert len(level["B"]) == 101

    level = superlevel_and_bohr(spectrum, "3/2", "0.05")
    assert level["R"] == []
    assert len(level["B"]) == 101
    assert level["beta"].sum() == pytest.approx(1.0)


def test_smoothing_keeps_mass_and_damps():
    rng = np.random.default_rng(2)
    a = rng.random(53) / 53
    level = superlevel_and_bohr(dft(a), "0.2", "0.1")
    smoothed = smooth(a, level["beta"])
    assert smoothed.sum() == pytest.approx(a.sum())
    assert (dft(smoothed).magnitudes <= dft(a).magnitudes + 1e-12).all()


def test_kfold_value_paths_agree():
    rng = np.random.default_rng(6)
    vectors = [rng.random(31) for _ in range(4)]
    assert kfold_value(vectors, 9) == pytest.approx(kfold_value_direct(vectors, 9))


# ============================================
# Report
# ============================================

def test_quick_run_with_degenerate_w():
    report = transference_report(build_config({"n": 1000}))
    assert report["status"] == "complete"
    assert report["wtrick"]["W"] == 1
    assert report["selection"]["status"] == "degenerate"
    assert any(flag["error"] == "PipelineDegenerate" for flag in report["flags"])
    assert report["N"]["N"] == 1051
    assert report["checks"]["convolution_theorem"]["holds"]
    assert report["passed"]


def test_large_N_skips_exact_checks():
    report = transference_report(build_config({"n": 10**4}))
    assert report["checks"]["convolution_theorem"]["skipped"]
    assert "conv_a_direct" not in report["diagnostics"]


def test_empty_last_family_halts():
    config = build_config({"n": 1000, "subsets": ["mod3:1", "mod3:1", "all", "empty"]})
    report = transference_report(config)
    assert report["status"] == "halted"
    assert report["halted_at"] == "residue_weights"
    assert report["passed"]


@pytest.mark.slow
def test_full_run_with_w6():
    report = transference_report(build_config({"n": 10**5, "W_override": 6}))
    assert report["status"] == "complete"
    assert report["selection"]["status"] == "selected"
    assert report["checks"]["mass_preservation"]["holds"]
    assert report["checks"]["spectral_damping"]["holds"]
    assert report["lift"]["holds"]
    assert report["passed"]
