"""
Selection Lemma Commands
select-lemma and verify-grid subcommands
"""

import argparse
import json
from pathlib import Path

from pydantic import ValidationError

from primesums.cli.output import emit
from primesums.core.errors import InputError
from primesums.core.logger import get_logger
from primesums.models.domain import SelectionWitness
from primesums.models.schemas import GridReport, SelectLemmaRequest, SelectionWitnessOut
from primesums.services.combinatorics_service import LEMMAS, grid_verify, select_multi, select_sharp4, select_single
from primesums.utils.helpers import to_fraction
from primesums.utils.validators import parse_fraction_list

logger = get_logger(__name__)


def read_instance(path: str) -> SelectLemmaRequest:
    source = Path(path)
    if not source.exists():
        raise InputError(f"instance file not found: {path}", path=path)
    try:
        return SelectLemmaRequest(**json.loads(source.read_text(encoding="utf-8")))
    except json.JSONDecodeError as e:
        raise InputError(f"instance file is not JSON: {e}", path=path) from e
    except ValidationError as e:
        raise InputError("invalid selection instance", problems=[err["msg"] for err in e.errors()]) from e


def witness_payload(w: SelectionWitness) -> dict:
    return {
        "lemma": w.lemma,
        "indices": list(w.indices),
        "index_sum": w.index_sum,
        "value_sum": w.value_sum,
        "threshold": w.threshold,
        "all_positive": w.all_positive,
        "fast_path": w.fast_path,
    }


def select_lemma_command(args: argparse.Namespace) -> int:
    """Apply one selection lemma to a JSON instance"""
    request = read_instance(args.instance)
    columns = [[to_fraction(v) for v in col] for col in request.columns]
    c = to_fraction(request.c)
    if request.lemma == "3.1":
        if len(columns) != 1 or request.k is None:
            raise InputError("lemma 3.1 takes one column and k")
        witness = select_single(columns[0], request.k, c)
    elif request.lemma == "3.2":
        if len(columns) != 4:
            raise InputError("lemma 3.2 takes four columns", columns=len(columns))
        witness = select_sharp4(*columns, c)
    else:
        witness = select_multi(columns, c)
    emit(witness_payload(witness), args.out, SelectionWitnessOut)
    return 0


def verify_grid_command(args: argparse.Namespace) -> int:
    """Exhaustive lemma check over a value grid; exit 1 on any counterexample"""
    grid = parse_fraction_list(args.grid, "grid")
    report = grid_verify(args.lemma, args.n, args.k, grid, to_fraction(args.c))
    emit(report, args.out, GridReport)
    return 1 if report["failures"] else 0


def register(subparsers, parents) -> None:
    p = subparsers.add_parser("select-lemma", parents=parents, help="run a selection lemma on a JSON instance")
    p.add_argument("--instance", required=True, help="JSON file with lemma, columns, c (and k for 3.1)")
    p.set_defaults(handler=select_lemma_command)

    p = subparsers.add_parser("verify-grid", parents=parents, help="exhaustive grid verification of a lemma")
    p.add_argument("--lemma", choices=LEMMAS, required=True)
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--k", type=int, default=4)
    p.add_argument("--grid", required=True, help="comma-separated values in [0, 1]")
    p.add_argument("--c", required=True, help="density parameter (cp for lemma 3.2)")
    p.set_defaults(handler=verify_grid_command)
