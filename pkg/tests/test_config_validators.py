"""
Test settings, input validators, error payloads and logging setup
"""

import logging
from fractions import Fraction

import numpy as np
import pytest

from primesums.core.config import Settings, settings, validate_configuration
from primesums.core.errors import BadK, DefectSignal, InputError, InternalNoWitness, error_payload
from primesums.core.logger import get_logger, set_global_level
from primesums.utils.helpers import dump_json, to_fraction, to_plain
from primesums.utils.validators import (
    parse_fraction_list,
    parse_int_list,
    parse_set_list,
    require_residues,
    require_unit_interval,
)


# ============================================
# Settings
# ============================================

def test_settings_read_prefixed_environment(monkeypatch):
    monkeypatch.setenv("PRIMESUMS_BRUTE_FORCE_LIMIT", "1234")
    monkeypatch.setenv("PRIMESUMS_LOG_LEVEL", " debug ")
    fresh = Settings()
    assert fresh.BRUTE_FORCE_LIMIT == 1234
    assert fresh.LOG_LEVEL == "DEBUG"


def test_validate_configuration(monkeypatch):
    result = validate_configuration()
    assert result["valid"]
    assert result["issues"] == []

    monkeypatch.setattr(settings, "CONVOLUTION_MAX_LENGTH", 2**27)
    result = validate_configuration()
    assert not result["valid"]
    assert any("CONVOLUTION_MAX_LENGTH" in issue for issue in result["issues"])


# ============================================
# Conversion
# ============================================

def test_to_fraction():
    assert to_fraction("3/5") == Fraction(3, 5)
    assert to_fraction(0.64) == Fraction(16, 25)
    assert to_fraction(" 7 ") == 7
    with pytest.raises(InputError):
        to_fraction("abc")
    with pytest.raises(InputError):
        to_fraction("1/0")
    with pytest.raises(InputError):
        to_fraction(True)


def test_to_plain_and_dump_json():
    payload = {"b": Fraction(1, 3), "a": (np.int64(2), np.float64(0.5)), "c": {3, 1}, 4: np.bool_(True)}
    assert to_plain(payload) == {"b": "1/3", "a": [2, 0.5], "c": [1, 3], "4": True}
    text = dump_json(payload)
    assert text.endswith("\n")
    assert text.index('"4"') < text.index('"a"') < text.index('"b"')


# ============================================
# Validators
# ============================================

def test_parse_lists():
    assert parse_int_list("7, 13,19") == [7, 13, 19]
    assert parse_set_list("1,2;3,4") == [[1, 2], [3, 4]]
    assert parse_fraction_list("0, 1/2, 1") == [0, Fraction(1, 2), 1]
    with pytest.raises(InputError):
        parse_int_list("1,x")
    with pytest.raises(InputError):
        parse_set_list("1,2;3,y")
    with pytest.raises(InputError):
        parse_fraction_list(" , ")


def test_require_unit_interval():
    assert require_unit_interval(Fraction(1, 2), "c") == Fraction(1, 2)
    assert require_unit_interval(Fraction(1), "alpha", open_right=False) == 1
    with pytest.raises(InputError):
        require_unit_interval(Fraction(1), "c")
    with pytest.raises(InputError):
        require_unit_interval(Fraction(0), "c")


def test_require_residues():
    assert require_residues([2, 1, 2], 3) == [1, 2]
    with pytest.raises(InputError):
        require_residues([3], 3)


# ============================================
# Errors
# ============================================

def test_error_payload():
    body = error_payload(BadK("need k >= 4", k=3, values=(1, Fraction(1, 2))), "1.0")
    assert body == {
        "error": "BadK",
        "message": "need k >= 4",
        "details": {"k": 3, "values": [1, "1/2"]},
        "schema_version": "1.0",
    }


def test_error_hierarchy():
    assert issubclass(BadK, InputError)
    assert issubclass(BadK, ValueError)
    assert issubclass(InternalNoWitness, DefectSignal)
    assert not issubclass(InternalNoWitness, InputError)


# ============================================
# Logging
# ============================================

def test_logger_writes_to_stderr():
    logger = get_logger("primesums.test_logger")
    assert not logger.propagate
    assert len(logger.handlers) == 1
    assert logger.handlers[0].stream is not None


def test_set_global_level():
    logger = get_logger("primesums.test_levels")
    previous = logger.level
    set_global_level("error")
    try:
        assert logger.level == logging.ERROR
        assert all(h.level == logging.ERROR for h in logger.handlers)
    finally:
        set_global_level(logging.getLevelName(previous))
