"""
Pydantic Schemas for CLI Input/Output Validation
"""

from fractions import Fraction
from typing import Any, Dict, List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from primesums.services.arithmetic_service import is_squarefree
from primesums.utils.helpers import to_fraction

Rational = Union[int, float, str]


def _rational(value: Any) -> Fraction:
    return to_fraction(value)


# ============================================
# COMBINATORICS SCHEMAS
# ============================================

class SelectLemmaRequest(BaseModel):
    """A selection-lemma instance read from JSON"""
    lemma: Literal["3.1", "3.2", "3.3"] = Field(..., description="Which selection lemma to apply")
    columns: List[List[Rational]] = Field(..., min_length=1, description="Nonincreasing sequences in [0, 1]")
    c: Rational = Field(..., description="Density parameter (cp for lemma 3.2)")
    k: Optional[int] = Field(None, ge=2, description="Summand count for lemma 3.1 (single column)")

    model_config = ConfigDict(
        json_schema_extra={
            "example": {
                "lemma": "3.3",
                "columns": [["1", "1", "1/2"], ["1", "1", "1/2"], ["1", "1", "1/2"], ["1", "1", "1/2"]],
                "c": "0.64",
            }
        }
    )

    @field_validator("c")
    @classmethod
    def _c_is_rational(cls, v):
        _rational(v)
        return v


class SelectionWitnessOut(BaseModel):
    """Selection-lemma witness"""
    lemma: str
    indices: List[int]
    index_sum: int
    value_sum: str
    threshold: str
    all_positive: bool
    fast_path: bool


class GridReport(BaseModel):
    """Exhaustive grid verification of a selection lemma"""
    lemma: str
    n: int
    k: int
    c: str
    grid: List[str]
    instances_checked: int
    hypothesis_hits: int
    multisets_checked: int
    multiset_hypothesis_hits: int
    failures: List[Dict[str, Any]]


# ============================================
# RESIDUE SELECTION SCHEMAS
# ============================================

class ResidueSelectionRequest(BaseModel):
    """Weights read from JSON: one map (single function) or k maps"""
    weights: Union[Dict[str, Rational], List[Dict[str, Rational]]]

    model_config = ConfigDict(
        json_schema_extra={
            "example": {"weights": {"1": 1, "2": "1/2", "4": 1, "7": 1, "8": 1, "11": 1, "13": "3/4", "14": 1}}
        }
    )


class ResidueWitnessOut(BaseModel):
    """Residue-selection witness"""
    q: int
    k: int
    n: int
    residues: List[int]
    value_sum: str
    threshold: str
    branch: str
    bounds: Dict[str, str]
    meets_stated_bound: Optional[bool] = None


# ============================================
# SUMSET SCHEMAS
# ============================================

class CDResult(BaseModel):
    """Cauchy-Davenport run"""
    instances: int
    seed: Optional[int] = None
    max_p: Optional[int] = None
    max_k: Optional[int] = None
    holds_all: bool
    failures: List[Dict[str, Any]]
    result: Optional[Dict[str, Any]] = None


class VarnavidesRun(BaseModel):
    """Varnavides-type property run"""
    k: int
    seed: int
    instances: int
    checked: int
    holds_all: bool
    failures: List[Dict[str, Any]]
    results: List[Dict[str, Any]]


# ============================================
# PRIME SET / REPRESENTATION SCHEMAS
# ============================================

class SubsetDump(BaseModel):
    """Serialized prime subset"""
    label: str
    bound: int
    count: int
    density: str
    primes: Optional[List[int]] = None
    path: Optional[str] = None


class ScanSummary(BaseModel):
    """Summary of a representation scan"""
    schema_version: str
    k: int
    labels: List[str]
    bound: int
    range: List[int]
    parity: str
    admissible: int
    zero_count: int
    largest_zero: Optional[int] = None
    min_count_after: Optional[int] = None
    median_count_after: Optional[float] = None
    zero_classes_mod3: List[int]
    obstruction_classes_mod3: List[int]
    exact_up_to: int
    tail_admissible: int = 0
    tail_zero_count: int = 0
    tail_first_zero: Optional[int] = None
    represented_through: Optional[int] = None
    hypotheses: Dict[str, Any]


# ============================================
# TRANSFERENCE SCHEMAS
# ============================================

class TransferenceConfig(BaseModel):
    """Inputs of the transference pipeline"""
    n: int = Field(..., ge=16, description="Target integer, n = k mod 2")
    k: int = Field(4, ge=4, description="Number of summands")
    kappa: Union[Fraction, Literal["auto"]] = Field(Fraction(1, 20), description="kappa > 0 or 'auto'")
    delta: Fraction = Field(Fraction(1, 5), description="Spectral super-level threshold in (0, 1)")
    epsilon: Fraction = Field(Fraction(1, 10), description="Bohr radius in (0, 1)")
    W_override: Optional[int] = Field(None, ge=1, description="Squarefree replacement for W")
    subsets: List[str] = Field(default_factory=lambda: ["all"], description="One spec, or k specs")

    model_config = ConfigDict(
        arbitrary_types_allowed=True,
        json_schema_extra={
            "example": {
                "n": 100000,
                "k": 4,
                "kappa": "1/20",
                "delta": "0.2",
                "epsilon": "0.1",
                "W_override": 6,
                "subsets": ["all"],
            }
        },
    )

    @field_validator("kappa", mode="before")
    @classmethod
    def _kappa(cls, v):
        if isinstance(v, str) and v.strip().lower() == "auto":
            return "auto"
        value = _rational(v)
        if value <= 0:
            raise ValueError("kappa must be positive")
        return value

    @field_validator("delta", "epsilon", mode="before")
    @classmethod
    def _unit(cls, v):
        value = _rational(v)
        if not 0 < value < 1:
            raise ValueError("must lie in (0, 1)")
        return value

    @field_validator("W_override")
    @classmethod
    def _squarefree(cls, v):
        if v is None:
            return v
        if not is_squarefree(v):
            raise ValueError(f"W_override {v} is not squarefree")
        return v

    @model_validator(mode="after")
    def _shape(self):
        if (self.n - self.k) % 2:
            raise ValueError("n must have the parity of k")
        if len(self.subsets) not in (1, self.k):
            raise ValueError("give one subset spec or exactly k")
        return self

    def subset_specs(self) -> List[str]:
        return self.subsets * self.k if len(self.subsets) == 1 else list(self.subsets)


class TransferenceReport(BaseModel):
    """Stage-by-stage transference diagnostics"""
    schema_version: str
    status: Literal["complete", "halted"]
    halted_at: Optional[str] = None
    reason: Optional[str] = None
    config: Dict[str, Any]
    stages: List[str]
    wtrick: Dict[str, Any]
    kappa: Dict[str, Any]
    weights: Dict[str, Any]
    selection: Optional[Dict[str, Any]] = None
    N: Optional[Dict[str, Any]] = None
    indicators: Optional[Dict[str, Any]] = None
    spectra: Optional[Dict[str, Any]] = None
    diagnostics: Optional[Dict[str, Any]] = None
    lift: Optional[Dict[str, Any]] = None
    checks: Dict[str, Any]
    flags: List[Dict[str, Any]]
    passed: bool


# ============================================
# ERROR SCHEMA
# ============================================

class ErrorResponse(BaseModel):
    """Structured error body"""
    error: str
    message: str
    details: Dict[str, Any] = Field(default_factory=dict)
    schema_version: Optional[str] = None
