"""
Residue Selection Commands
select-residues subcommand
"""

import argparse
import json
from pathlib import Path
from typing import List

from pydantic import ValidationError

from primesums.cli.output import emit
from primesums.core.errors import ContractViolation, InputError
from primesums.core.logger import get_logger
from primesums.models.domain import WeightVector
from primesums.models.schemas import ResidueSelectionRequest, ResidueWitnessOut
from primesums.services.residue_service import (
    brute_force_residues,
    residue_witness_payload,
    select_residues_multi,
    select_residues_single,
    weight_vector,
)
from primesums.utils.helpers import to_fraction

logger = get_logger(__name__)


def read_weights(path: str, q: int) -> List[WeightVector]:
    """One weight map (single function) or a list of maps, keyed by residue"""
    source = Path(path)
    if not source.exists():
        raise InputError(f"weights file not found: {path}", path=path)
    try:
        raw = json.loads(source.read_text(encoding="utf-8"))
        if not (isinstance(raw, dict) and "weights" in raw):
            raw = {"weights": raw}
        request = ResidueSelectionRequest(**raw)
    except json.JSONDecodeError as e:
        raise InputError(f"weights file is not JSON: {e}", path=path) from e
    except ValidationError as e:
        raise InputError("invalid weights", problems=[err["msg"] for err in e.errors()]) from e
    maps = request.weights if isinstance(request.weights, list) else [request.weights]
    try:
        return [weight_vector(q, {int(x): to_fraction(v) for x, v in m.items()}) for m in maps]
    except ValueError as e:
        if isinstance(e, InputError):
            raise
        raise InputError(f"weight keys must be integers: {e}") from e


def select_residues_command(args: argparse.Namespace) -> int:
    """Residue witness for n mod q; --oracle cross-checks by exhaustive search"""
    fs = read_weights(args.weights, args.q)
    c = to_fraction(args.c)
    if len(fs) == 1:
        witness = select_residues_single(fs[0], args.k, c, args.n)
        family = fs * args.k
    else:
        if len(fs) != args.k:
            raise InputError("number of weight maps must equal k", k=args.k, maps=len(fs))
        witness = select_residues_multi(fs, c, args.n)
        family = fs
    payload = residue_witness_payload(witness)

    if args.oracle:
        best = brute_force_residues(family, args.n)
        if best is None or best.value_sum < witness.value_sum:
            raise ContractViolation("exhaustive search disagrees with the witness",
                                    witness=str(witness.value_sum),
                                    optimum=None if best is None else str(best.value_sum))
        logger.info(f"✅ Oracle optimum {best.value_sum} >= witness {witness.value_sum}")

    emit(payload, args.out, ResidueWitnessOut)
    return 0


def register(subparsers, parents) -> None:
    p = subparsers.add_parser("select-residues", parents=parents, help="residue selection on JSON weights")
    p.add_argument("--q", type=int, required=True, help="squarefree modulus")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--c", required=True)
    p.add_argument("--n", type=int, required=True, help="target")
    p.add_argument("--weights", required=True, help="JSON map residue -> weight, or a list of k maps")
    p.add_argument("--oracle", action="store_true", help="confirm with exhaustive search")
    p.set_defaults(handler=select_residues_command)
