"""
primesums Command Line
Subcommands for prime tables, k-fold counts, selection lemmas and transference
"""

import argparse
import sys
import time
from typing import List, Optional

from primesums.cli.commands import COMMAND_MODULES
from primesums.cli.output import emit
from primesums.core.config import settings
from primesums.core.errors import DefectSignal, PrimeSumsError, error_payload
from primesums.core.logger import get_logger, set_global_level
from primesums.models.schemas import ErrorResponse

logger = get_logger(__name__)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write JSON here instead of stdout")
    common.add_argument("--threads", type=int, help="worker threads for sieving")
    common.add_argument("--log-level", dest="log_level", type=str.upper,
                        choices=("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"))

    parser = argparse.ArgumentParser(
        prog="primesums",
        description="Sums of primes from dense subsets: exact counts and constructive witnesses",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {settings.APP_VERSION}")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for module in COMMAND_MODULES:
        module.register(subparsers, [common])
    return parser


def run(argv: Optional[List[str]] = None) -> int:
    """
    Parse arguments and dispatch

    Returns:
        0 on success, 2 for input errors, 1 for defects and failed checks
    """
    args = build_parser().parse_args(argv)
    if args.log_level:
        set_global_level(args.log_level)

    threads = settings.THREADS
    if args.threads:
        if args.threads < 1:
            logger.error("❌ --threads must be at least 1")
            return 2
        settings.THREADS = args.threads

    start_time = time.time()
    logger.debug(f"📨 primesums {args.command}")
    try:
        code = args.handler(args)
    except PrimeSumsError as e:
        body = error_payload(e, settings.SCHEMA_VERSION)
        emit(body, args.out, ErrorResponse)
        logger.error(f"❌ {e.code}: {e.message}")
        return 1 if isinstance(e, DefectSignal) else 2
    finally:
        settings.THREADS = threads
    logger.debug(f"✅ {args.command} finished with {code} ({time.time() - start_time:.2f}s)")
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
