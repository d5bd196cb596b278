"""
Prime Table Commands
sieve, subset and density subcommands
"""

import argparse

from primesums.cli.output import emit
from primesums.core.logger import get_logger
from primesums.models.schemas import SubsetDump
from primesums.services.prime_set_service import density_trend, lower_density_estimate, subset_from_spec
from primesums.services.sieve_service import sieve_service
from primesums.utils.validators import parse_int_list

logger = get_logger(__name__)


def sieve_command(args: argparse.Namespace) -> int:
    """Build (or load from cache) the prime table up to --bound"""
    table = sieve_service.sieve(args.bound)
    payload = {"bound": table.bound, "count": table.count(), "largest": int(table.primes()[-1])}
    if args.save:
        payload["path"] = str(table.save(args.save))
        logger.info(f"💾 Saved table to {payload['path']}")
    emit(payload, args.out)
    return 0


def subset_command(args: argparse.Namespace) -> int:
    """Construct a prime subset from a spec and optionally save its bit-vector"""
    subset = subset_from_spec(args.spec, args.bound)
    payload = {
        "label": subset.label,
        "bound": subset.bound,
        "count": subset.count(),
        "density": lower_density_estimate(subset),
    }
    if args.list:
        payload["primes"] = subset.primes().tolist()
    if args.save:
        payload["path"] = str(subset.save(args.save))
    emit(payload, args.out, SubsetDump)
    return 0


def density_command(args: argparse.Namespace) -> int:
    """Finite-bound density estimates at several bounds"""
    subset = subset_from_spec(args.spec, args.bound)
    bounds = parse_int_list(args.bounds, "bounds") if args.bounds else [args.bound]
    trend = density_trend(subset, bounds)
    emit({
        "label": subset.label,
        "bound": subset.bound,
        "trend": [{"bound": b, "density": d, "approx": float(d)} for b, d in trend],
    }, args.out)
    return 0


def register(subparsers, parents) -> None:
    p = subparsers.add_parser("sieve", parents=parents, help="build and cache the prime table")
    p.add_argument("--bound", type=int, required=True)
    p.add_argument("--save", help="write the bit-vector table to this path")
    p.set_defaults(handler=sieve_command)

    p = subparsers.add_parser("subset", parents=parents, help="construct and serialize a prime subset")
    p.add_argument("--spec", required=True, help="e.g. all, mod3:1, random:0.55:7, finite:3,5,7")
    p.add_argument("--bound", type=int, required=True)
    p.add_argument("--list", action="store_true", help="include the primes in the output")
    p.add_argument("--save", help="write the bit-vector to this path")
    p.set_defaults(handler=subset_command)

    p = subparsers.add_parser("density", parents=parents, help="density estimates at several bounds")
    p.add_argument("--spec", required=True)
    p.add_argument("--bound", type=int, required=True)
    p.add_argument("--bounds", help="comma-separated bounds <= --bound")
    p.set_defaults(handler=density_command)
