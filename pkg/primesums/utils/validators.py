"""
Input Validators
Parsing of CLI and config-file values into checked Python values
"""

from fractions import Fraction
from typing import List, Sequence

from primesums.core.errors import InputError
from primesums.utils.helpers import to_fraction


def parse_int_list(text: str, name: str = "values") -> List[int]:
    """
    Parse '1,2,3' into [1, 2, 3]

    Example:
        >>> parse_int_list("7, 13,19")
        [7, 13, 19]
    """
    parts = [p.strip() for p in str(text).split(",") if p.strip()]
    try:
        return [int(p) for p in parts]
    except ValueError as e:
        raise InputError(f"{name} must be a comma-separated list of integers", **{name: text}) from e


def parse_fraction_list(text: str, name: str = "values") -> List[Fraction]:
    parts = [p.strip() for p in str(text).split(",") if p.strip()]
    if not parts:
        raise InputError(f"{name} is empty")
    return [to_fraction(p) for p in parts]


def parse_set_list(text: str) -> List[List[int]]:
    """Parse '1,2;3,4' into [[1, 2], [3, 4]]"""
    return [parse_int_list(chunk, "set") for chunk in str(text).split(";") if chunk.strip()]


def require_unit_interval(value: Fraction, name: str, open_left: bool = True, open_right: bool = True) -> Fraction:
    low_ok = value > 0 if open_left else value >= 0
    high_ok = value < 1 if open_right else value <= 1
    if not (low_ok and high_ok):
        raise InputError(f"{name} must lie in the unit interval", **{name: str(value)})
    return value


def require_residues(residues: Sequence[int], modulus: int) -> List[int]:
    bad = [r for r in residues if not 0 <= r < modulus]
    if bad:
        raise InputError("residues must lie in [0, m)", m=modulus, residues=list(residues))
    return sorted(set(residues))
