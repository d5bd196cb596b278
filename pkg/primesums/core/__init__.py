"""
Core module initialization
"""

from primesums.core.config import settings, get_settings, validate_configuration
from primesums.core.logger import setup_logger, get_logger, app_logger

__all__ = [
    "settings",
    "get_settings",
    "validate_configuration",
    "setup_logger",
    "get_logger",
    "app_logger",
]
