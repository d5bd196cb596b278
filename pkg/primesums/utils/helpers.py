"""
Helper Functions
Exact-number conversion and deterministic serialization
"""

import hashlib
import json
import sys
from decimal import Decimal
from fractions import Fraction
from pathlib import Path
from typing import Any, Optional, Union

import numpy as np

from primesums.core.errors import InputError

Number = Union[int, float, str, Fraction, Decimal]


def to_fraction(value: Number) -> Fraction:
    """
    Convert user input to an exact rational

    Floats go through their shortest repr so 0.64 becomes 16/25, not the
    binary64 neighbour.

    Example:
        >>> to_fraction("3/5")
        Fraction(3, 5)
        >>> to_fraction(0.64)
        Fraction(16, 25)
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise InputError("booleans are not numbers", value=value)
    if isinstance(value, float):
        return Fraction(repr(value))
    try:
        return Fraction(str(value).strip())
    except (ValueError, ZeroDivisionError) as e:
        raise InputError(f"not a rational number: {value!r}", value=str(value)) from e


def fraction_str(value: Fraction) -> str:
    return str(Fraction(value))


def to_plain(value: Any) -> Any:
    """Recursively turn Fractions, numpy scalars and tuples into JSON-safe values"""
    if isinstance(value, Fraction):
        return fraction_str(value)
    if isinstance(value, dict):
        return {str(k): to_plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, set, frozenset)):
        items = sorted(value) if isinstance(value, (set, frozenset)) else value
        return [to_plain(v) for v in items]
    if isinstance(value, np.ndarray):
        return [to_plain(v) for v in value.tolist()]
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.bool_):
        return bool(value)
    return value


def dump_json(payload: Any) -> str:
    """Byte-stable JSON (sorted keys, fixed indent, trailing newline)"""
    return json.dumps(to_plain(payload), sort_keys=True, indent=2) + "\n"


def write_text(text: str, out: Optional[Union[str, Path]] = None) -> None:
    """Write to a file, or to stdout when out is None or '-'"""
    if out is None or str(out) == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    path = Path(out)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")


def fingerprint(*arrays: np.ndarray) -> str:
    """SHA-256 over the raw bytes of one or more arrays"""
    digest = hashlib.sha256()
    for array in arrays:
        array = np.ascontiguousarray(array)
        digest.update(str(array.dtype).encode())
        digest.update(str(array.shape).encode())
        digest.update(array.tobytes())
    return digest.hexdigest()
