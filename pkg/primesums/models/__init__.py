"""
Domain value objects and pydantic I/O schemas
"""

from primesums.models.domain import (
    BitVectorSet,
    PrimeSubset,
    PrimeTable,
    ResidueWitness,
    SelectionWitness,
    SpectrumProfile,
    SqfModulus,
    ValueSequence,
    WeightVector,
)
from primesums.models.schemas import (
    ErrorResponse,
    GridReport,
    ResidueWitnessOut,
    ScanSummary,
    SelectionWitnessOut,
    TransferenceConfig,
    TransferenceReport,
)

__all__ = [
    "BitVectorSet",
    "PrimeSubset",
    "PrimeTable",
    "ResidueWitness",
    "SelectionWitness",
    "SpectrumProfile",
    "SqfModulus",
    "ValueSequence",
    "WeightVector",
    "ErrorResponse",
    "GridReport",
    "ResidueWitnessOut",
    "ScanSummary",
    "SelectionWitnessOut",
    "TransferenceConfig",
    "TransferenceReport",
]
