"""
Sumset Commands
cd-check and varnavides subcommands
"""

import argparse

from primesums.cli.output import emit
from primesums.core.errors import InputError
from primesums.models.schemas import CDResult, VarnavidesRun
from primesums.services.sumset_service import cauchy_davenport_check, cauchy_davenport_run, varnavides_run
from primesums.utils.validators import parse_set_list


def cd_check_command(args: argparse.Namespace) -> int:
    """Cauchy-Davenport on given sets, or on seeded random instances"""
    if args.sets:
        if args.p is None:
            raise InputError("--sets needs --p")
        result = cauchy_davenport_check(args.p, parse_set_list(args.sets))
        report = {"instances": 1, "holds_all": result["holds"],
                  "failures": [] if result["holds"] else [result], "result": result}
    else:
        if args.seed is None:
            raise InputError("random instances need --seed")
        report = cauchy_davenport_run(args.instances, args.seed, args.max_p, args.max_k)
    body = emit(report, args.out, CDResult)
    return 0 if body["holds_all"] else 1


def varnavides_command(args: argparse.Namespace) -> int:
    """Seeded lower-bound check for k-fold representation counts in Z_N"""
    report = varnavides_run(args.k, args.instances, args.seed, args.max_N)
    emit(report, args.out, VarnavidesRun)
    return 0 if report["holds_all"] else 1


def register(subparsers, parents) -> None:
    p = subparsers.add_parser("cd-check", parents=parents, help="Cauchy-Davenport on given or random sets")
    p.add_argument("--p", type=int, help="prime modulus for --sets")
    p.add_argument("--sets", help="semicolon-separated sets, e.g. '1,2;3,4'")
    p.add_argument("--seed", type=int)
    p.add_argument("--instances", type=int, default=100)
    p.add_argument("--max-p", dest="max_p", type=int, default=101)
    p.add_argument("--max-k", dest="max_k", type=int, default=5)
    p.set_defaults(handler=cd_check_command)

    p = subparsers.add_parser("varnavides", parents=parents, help="seeded Varnavides-type property run")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--instances", type=int, default=100)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--max-N", dest="max_N", type=int, default=500)
    p.set_defaults(handler=varnavides_command)
