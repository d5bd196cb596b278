"""
Counting Commands
count, scan and sharpness subcommands
"""

import argparse
from typing import List

from primesums.cli.output import emit
from primesums.core.config import settings
from primesums.core.errors import BoundTooLarge, ContractViolation, InputError
from primesums.core.logger import get_logger
from primesums.models.domain import PrimeSubset
from primesums.models.schemas import ScanSummary
from primesums.services.combinatorics_service import (
    multi_sharpness_instance,
    sharp4_family,
    single_sharpness_instance,
)
from primesums.services.prime_set_service import (
    SHARPNESS_KINDS,
    lower_density_estimate,
    obstruction_classes,
    sharpness_family,
    subset_from_spec,
)
from primesums.services.representation_service import (
    PARITIES,
    count_kfold,
    direct_count,
    scan_csv,
    scan_theorem,
)
from primesums.utils.helpers import write_text

logger = get_logger(__name__)


def _subsets(specs: List[str], k: int, bound: int) -> List[PrimeSubset]:
    specs = specs or ["all"]
    if len(specs) == 1:
        specs = specs * k
    if len(specs) != k:
        raise InputError("give one --subset or exactly k", k=k, subsets=len(specs))
    return [subset_from_spec(spec, bound) for spec in specs]


def _check_scan_bound(bound: int, large: bool, k: int) -> None:
    if bound > settings.SCAN_LARGE_BOUND:
        raise BoundTooLarge("scan bound above SCAN_LARGE_BOUND", bound=bound, limit=settings.SCAN_LARGE_BOUND)
    if k * bound + 1 > settings.CONVOLUTION_OUTPUT_LIMIT:
        raise BoundTooLarge("k*bound exceeds CONVOLUTION_OUTPUT_LIMIT", bound=bound, k=k,
                            limit=settings.CONVOLUTION_OUTPUT_LIMIT)
    if bound > settings.SCAN_DEFAULT_BOUND and not large:
        raise InputError("scan bound above SCAN_DEFAULT_BOUND needs --large",
                         bound=bound, limit=settings.SCAN_DEFAULT_BOUND)


def count_command(args: argparse.Namespace) -> int:
    """Exact ordered count for one n, optionally checked by enumeration"""
    bound = args.bound or max(args.n, 2)
    subsets = _subsets(args.subset, args.k, bound)
    count = count_kfold(subsets, args.n)
    payload = {"k": args.k, "n": args.n, "bound": bound, "labels": [P.label for P in subsets], "count": count}
    if args.direct:
        oracle = direct_count(subsets, args.n)
        payload["direct"] = oracle
        if oracle != count:
            raise ContractViolation("convolution count disagrees with enumeration", n=args.n,
                                    count=count, direct=oracle)
    emit(payload, args.out)
    return 0


def scan_command(args: argparse.Namespace) -> int:
    """Counts for every admissible n in [--min, --max]; CSV rows plus a JSON summary"""
    bound = args.bound or args.max
    _check_scan_bound(bound, args.large, args.k)
    subsets = _subsets(args.subset, args.k, bound)
    low = args.min if args.min is not None else 2 * args.k
    table, summary = scan_theorem(subsets, args.k, (low, args.max), args.parity)
    if args.csv:
        write_text(scan_csv(table), args.csv)
        logger.info(f"💾 Wrote {len(table)} rows to {args.csv}")
    emit(summary, args.out, ScanSummary)
    return 0


def _family_report(kind: str, k: int, bound: int, shift: int) -> dict:
    family = sharpness_family(kind, k, bound, shift)
    table, summary = scan_theorem(family, k, (2 * k, bound), "all")
    blocked = obstruction_classes(family, 3)
    in_blocked = table[(table["n"] % 3).isin(blocked)]
    violations = int((in_blocked["count"] != 0).sum())
    densities = [lower_density_estimate(P) for P in family]
    return {
        "kind": kind,
        "shift": shift,
        "labels": summary["labels"],
        "densities": densities,
        "density_sum": sum(densities),
        "obstruction_classes_mod3": blocked,
        "checked": int(len(in_blocked)),
        "violations": violations,
        "zero_count": summary["zero_count"],
        "admissible": summary["admissible"],
        "holds": violations == 0 and bool(blocked),
    }


def sharpness_command(args: argparse.Namespace) -> int:
    """Both critical-density families with their zero-count verification"""
    _check_scan_bound(args.bound, args.large, args.k)
    kinds = SHARPNESS_KINDS if args.kind == "all" else (args.kind,)
    shifts = (1, 2) if args.shift is None else (args.shift,)
    families = []
    for kind in kinds:
        for shift in (shifts if kind == "shifted-mod3" else (1,)):
            families.append(_family_report(kind, args.k, args.bound, shift))
    lemmas = {
        "single": single_sharpness_instance(4, args.k),
        "multi": multi_sharpness_instance(args.k),
        "sharp4": [sharp4_family(eps) for eps in ("1/10", "1/100", "1/1000")],
    }
    holds = all(f["holds"] for f in families)
    emit({"k": args.k, "bound": args.bound, "families": families, "lemmas": lemmas, "holds": holds}, args.out)
    if not holds:
        logger.error("❌ A sharpness family produced a representation in a blocked class")
    return 0 if holds else 1


def register(subparsers, parents) -> None:
    p = subparsers.add_parser("count", parents=parents, help="ordered k-fold count for one n")
    p.add_argument("--subset", action="append", default=[], help="subset spec (once, or k times)")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--bound", type=int, help="subset bound (default n)")
    p.add_argument("--direct", action="store_true", help="cross-check by enumeration")
    p.set_defaults(handler=count_command)

    p = subparsers.add_parser("scan", parents=parents, help="counts over a range of n with a summary")
    p.add_argument("--subset", action="append", default=[], help="subset spec (once, or k times)")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--max", type=int, required=True, help="largest n scanned")
    p.add_argument("--min", type=int, help="smallest n scanned (default 2k)")
    p.add_argument("--bound", type=int, help="subset bound (default --max)")
    p.add_argument("--parity", choices=PARITIES, default="k")
    p.add_argument("--csv", help="write the per-n table here")
    p.add_argument("--large", action="store_true", help="allow bounds above SCAN_DEFAULT_BOUND")
    p.set_defaults(handler=scan_command)

    p = subparsers.add_parser("sharpness", parents=parents, help="critical-density families and their zero counts")
    p.add_argument("--kind", choices=SHARPNESS_KINDS + ("all",), default="all")
    p.add_argument("--k", type=int, default=4)
    p.add_argument("--bound", type=int, default=10**4)
    p.add_argument("--shift", type=int, choices=(1, 2))
    p.add_argument("--large", action="store_true")
    p.set_defaults(handler=sharpness_command)
