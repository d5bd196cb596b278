"""
Transference Command
Runs the residue-selection / Fourier pipeline from a key=value config file
"""

import argparse

from primesums.cli.output import emit
from primesums.core.logger import get_logger
from primesums.models.schemas import TransferenceReport
from primesums.services.transference_service import load_config, transference_report

logger = get_logger(__name__)


def transference_command(args: argparse.Namespace) -> int:
    """Exit 1 when a hard check fails; a halted run with no hard failures exits 0"""
    config = load_config(args.config)
    report = transference_report(config)
    emit(report, args.out, TransferenceReport)
    if report["status"] == "halted":
        logger.warning(f"⚠️ Halted at {report['halted_at']}: {report['reason']}")
    return 0 if report["passed"] else 1


def register(subparsers, parents) -> None:
    p = subparsers.add_parser("transference", parents=parents, help="run the transference pipeline")
    p.add_argument("--config", required=True, help="key=value file (n, k, kappa, delta, epsilon, W_override, subset)")
    p.set_defaults(handler=transference_command)
