"""
Health Check Command
Settings, budget validation and cache status
"""

import argparse
import platform
from datetime import datetime
from typing import Dict

from primesums.cli.output import emit
from primesums.core.config import settings, validate_configuration
from primesums.core.logger import get_logger
from primesums.services.cache_service import cache_service

logger = get_logger(__name__)


def health_report(detailed: bool = False) -> Dict:
    """
    Basic health check

    Returns name, version and configuration validity; the detailed form
    adds the budgets and cache statistics.
    """
    validation = validate_configuration()
    report = {
        "status": "healthy" if validation["valid"] else "misconfigured",
        "timestamp": datetime.now().isoformat(),
        "version": settings.APP_VERSION,
        "configuration": validation,
    }
    if detailed:
        report["application"] = {
            "name": settings.APP_NAME,
            "schema_version": settings.SCHEMA_VERSION,
            "python": platform.python_version(),
            "threads": settings.THREADS,
        }
        report["budgets"] = {
            "sieve_max_bound": settings.SIEVE_MAX_BOUND,
            "convolution_max_length": settings.CONVOLUTION_MAX_LENGTH,
            "convolution_output_limit": settings.CONVOLUTION_OUTPUT_LIMIT,
            "brute_force_limit": settings.BRUTE_FORCE_LIMIT,
            "grid_budget": settings.GRID_BUDGET,
            "scan_default_bound": settings.SCAN_DEFAULT_BOUND,
            "scan_large_bound": settings.SCAN_LARGE_BOUND,
            "exact_check_max_n": settings.EXACT_CHECK_MAX_N,
        }
        report["cache"] = cache_service.get_stats()
    return report


def health_command(args: argparse.Namespace) -> int:
    report = health_report(args.detailed)
    for issue in report["configuration"]["issues"]:
        logger.error(f"❌ {issue}")
    for warning in report["configuration"]["warnings"]:
        logger.warning(f"⚠️ {warning}")
    emit(report, args.out)
    return 0 if report["configuration"]["valid"] else 2


def register(subparsers, parents) -> None:
    p = subparsers.add_parser("health", parents=parents, help="configuration and cache status")
    p.add_argument("--detailed", action="store_true")
    p.set_defaults(handler=health_command)
