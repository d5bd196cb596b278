"""
Test the command-line surface: exit codes and JSON bodies
"""

import json

import pytest

from primesums.cli.main import build_parser, run
from primesums.models.schemas import SelectLemmaRequest


def _run(tmp_path, *argv):
    out = tmp_path / "out.json"
    code = run(list(argv) + ["--out", str(out)])
    body = json.loads(out.read_text(encoding="utf-8")) if out.exists() else None
    return code, body


# ============================================
# Counting
# ============================================

def test_count_with_direct_check(tmp_path):
    code, body = _run(tmp_path, "count", "--k", "2", "--n", "10", "--bound", "20", "--direct")
    assert code == 0
    assert body["count"] == 3
    assert body["direct"] == 3
    assert body["schema_version"] == "1.0"


def test_scan_writes_csv_and_summary(tmp_path):
    csv = tmp_path / "scan.csv"
    code, body = _run(tmp_path, "scan", "--subset", "mod3:1", "--k", "4", "--max", "2000",
                      "--parity", "even", "--csv", str(csv))
    assert code == 0
    assert body["obstruction_classes_mod3"] == [0, 2]
    lines = csv.read_text(encoding="utf-8").splitlines()
    assert lines[:2] == ["# schema_version=1.0", "n,count"]


def test_bad_subset_is_input_error(tmp_path):
    code, body = _run(tmp_path, "count", "--subset", "bogus", "--k", "2", "--n", "10")
    assert code == 2
    assert body["error"] == "BadSubsetSpec"
    assert body["schema_version"] == "1.0"


def test_sharpness(tmp_path):
    code, body = _run(tmp_path, "sharpness", "--bound", "500")
    assert code == 0
    assert body["holds"]
    assert {f["kind"] for f in body["families"]} == {"shifted-mod3", "empty-last"}


def test_output_is_byte_stable(tmp_path):
    argv = ["scan", "--k", "4", "--max", "1000", "--parity", "even"]
    first, second = tmp_path / "a.json", tmp_path / "b.json"
    assert run(argv + ["--out", str(first)]) == 0
    assert run(argv + ["--out", str(second)]) == 0
    assert first.read_bytes() == second.read_bytes()


def test_scan_rejects_bounds_the_convolution_cannot_hold(tmp_path, monkeypatch):
    from primesums.core.config import settings

    code, body = _run(tmp_path, "scan", "--k", "4", "--max", "1000", "--bound", str(2 * 10**7), "--large")
    assert code == 2
    assert body["error"] == "BoundTooLarge"

    monkeypatch.setattr(settings, "CONVOLUTION_OUTPUT_LIMIT", 1000)
    code, body = _run(tmp_path, "scan", "--k", "4", "--max", "400")
    assert code == 2
    assert body["error"] == "BoundTooLarge"
    assert body["details"]["limit"] == 1000


def test_scan_reports_tail_fields(tmp_path):
    code, body = _run(tmp_path, "scan", "--k", "4", "--max", "4000", "--bound", "1000")
    assert code == 0
    assert body["exact_up_to"] == 1006
    assert body["largest_zero"] is None
    assert body["tail_zero_count"] > 0
    assert body["represented_through"] < body["tail_first_zero"]


def test_sieve_with_threads(tmp_path):
    code, body = _run(tmp_path, "sieve", "--bound", "1000", "--threads", "2")
    assert code == 0
    assert body["count"] == 168
    assert body["largest"] == 997


# ============================================
# Lemmas and residues
# ============================================

def test_verify_grid(tmp_path):
    code, body = _run(tmp_path, "verify-grid", "--lemma", "3.3", "--n", "3", "--k", "4",
                      "--grid", "0,1/2,1", "--c", "0.64")
    assert code == 0
    assert body["failures"] == []


def test_select_lemma_schema_example(tmp_path):
    instance = tmp_path / "instance.json"
    example = SelectLemmaRequest.model_config["json_schema_extra"]["example"]
    instance.write_text(json.dumps(example), encoding="utf-8")
    code, body = _run(tmp_path, "select-lemma", "--instance", str(instance))
    assert code == 0
    assert body["lemma"] == "3.3"
    assert body["index_sum"] >= 3
    assert body["all_positive"]


def test_select_residues_with_oracle(tmp_path):
    weights = tmp_path / "weights.json"
    weights.write_text(json.dumps({"1": 1, "2": "1/2", "4": 1, "7": 1, "8": 1, "11": 1, "13": "3/4", "14": 1}),
                       encoding="utf-8")
    code, body = _run(tmp_path, "select-residues", "--q", "15", "--k", "4", "--c", "0.6", "--n", "7",
                      "--weights", str(weights), "--oracle")
    assert code == 0
    assert sum(body["residues"]) % 15 == 7


# ============================================
# Sumsets
# ============================================

def test_cd_check_modes(tmp_path):
    code, body = _run(tmp_path, "cd-check", "--sets", "1,2;3,4")
    assert code == 2
    assert body["error"] == "InputError"

    code, body = _run(tmp_path, "cd-check", "--p", "7", "--sets", "1,2;3,4")
    assert code == 0
    assert body["result"]["lhs"] == 3

    code, _ = _run(tmp_path, "cd-check")
    assert code == 2

    code, body = _run(tmp_path, "cd-check", "--seed", "5", "--instances", "30")
    assert code == 0
    assert body["holds_all"]


# ============================================
# Transference and health
# ============================================

def test_transference_rejects_odd_n(tmp_path):
    config = tmp_path / "run.conf"
    config.write_text("n = 1001\nk = 4\n", encoding="utf-8")
    code, body = _run(tmp_path, "transference", "--config", str(config))
    assert code == 2
    assert body["error"] == "InputError"


def test_health(tmp_path):
    code, body = _run(tmp_path, "health", "--detailed")
    assert code == 0
    assert body["status"] == "healthy"
    assert "budgets" in body


def test_unknown_log_level_is_rejected():
    with pytest.raises(SystemExit):
        build_parser().parse_args(["health", "--log-level", "LOUD"])
