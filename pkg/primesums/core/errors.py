"""
Error Types
Every module error carries a stable code so the CLI can emit structured JSON
"""

from typing import Any, Dict, Optional


class PrimeSumsError(Exception):
    """Base class for all library errors"""

    code = "PrimeSumsError"

    def __init__(self, message: str = "", **details: Any):
        super().__init__(message or self.code)
        self.message = message or self.code
        self.details: Dict[str, Any] = details

    def to_dict(self) -> Dict[str, Any]:
        return {
            "error": self.code,
            "message": self.message,
            "details": {k: _plain(v) for k, v in self.details.items()},
        }


def _plain(value: Any) -> Any:
    if isinstance(value, (int, float, str, bool)) or value is None:
        return value
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    return str(value)


class InputError(PrimeSumsError, ValueError):
    """A precondition on caller input failed"""

    code = "InputError"


class DefectSignal(PrimeSumsError, RuntimeError):
    """Something that a theorem guarantees did not happen - a bug, never user error"""

    code = "DefectSignal"


# ============================================
# number_core
# ============================================

class NotSquarefree(InputError):
    code = "NotSquarefree"


class BadFactor(InputError):
    code = "BadFactor"


class NotCoprime(InputError):
    code = "NotCoprime"


class BoundTooLarge(InputError):
    code = "BoundTooLarge"


# ============================================
# prime_sets
# ============================================

class EmptyResidues(InputError):
    code = "EmptyResidues"


class BadK(InputError):
    code = "BadK"


class BadSubsetSpec(InputError):
    code = "BadSubsetSpec"


# ============================================
# combinatorics / residue_selection
# ============================================

class HypothesisUnmet(InputError):
    code = "HypothesisUnmet"


class BadShape(InputError):
    code = "BadShape"


class TooLarge(InputError):
    code = "TooLarge"


class ParityMismatch(InputError):
    code = "ParityMismatch"


class NoWitness(DefectSignal):
    code = "NoWitness"


class InternalNoWitness(DefectSignal):
    code = "InternalNoWitness"


class NoFiberWitness(PrimeSumsError):
    """A fiber step of the CRT induction found nothing above its threshold"""

    code = "NoFiberWitness"


# ============================================
# sumsets / representations
# ============================================

class NotPrime(InputError):
    code = "NotPrime"


class EmptySet(InputError):
    code = "EmptySet"


class ConvolutionOverflow(PrimeSumsError, ArithmeticError):
    code = "Overflow"


class BoundMismatch(InputError):
    code = "BoundMismatch"


# ============================================
# transference
# ============================================

class NoPrimeInInterval(PrimeSumsError):
    code = "NoPrimeInInterval"


class PipelineDegenerate(PrimeSumsError):
    """Reported in the transference diagnostics, not raised to the caller"""

    code = "PipelineDegenerate"


class ContractViolation(DefectSignal):
    """A hard contract (witness soundness, oracle agreement) failed at runtime"""

    code = "ContractViolation"


def error_payload(exc: PrimeSumsError, schema_version: Optional[str] = None) -> Dict[str, Any]:
    """Structured error JSON body for the CLI"""
    body = exc.to_dict()
    if schema_version is not None:
        body["schema_version"] = schema_version
    return body
