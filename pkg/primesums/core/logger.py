"""
Colored Logging System
Colored console logs on stderr (stdout carries JSON/CSV) and optional file logs
"""

import logging
import sys
from datetime import datetime
from pathlib import Path
from typing import Optional

import colorlog

from primesums.core.config import settings


# Color scheme
LOG_COLORS = {
    'DEBUG': 'cyan',
    'INFO': 'green',
    'WARNING': 'yellow',
    'ERROR': 'red',
    'CRITICAL': 'red,bg_white',
}

# Console format (with colors)
CONSOLE_FORMAT = (
    '%(log_color)s%(levelname)-8s%(reset)s '
    '%(green)s%(asctime)s%(reset)s '
    '%(blue)s[%(name)s]%(reset)s '
    '%(white)s%(message)s%(reset)s'
)

# File format (no colors)
FILE_FORMAT = '%(levelname)-8s %(asctime)s [%(name)s] %(message)s'


def setup_logger(
    name: str,
    log_level: Optional[str] = None,
    log_to_file: Optional[bool] = None
) -> logging.Logger:
    """
    Setup colored logger

    Args:
        name: Logger name
        log_level: Log level (defaults to settings.LOG_LEVEL)
        log_to_file: Save logs under settings.LOG_DIR (defaults to settings.LOG_TO_FILE)

    Returns:
        Configured logger

    Example:
        >>> logger = setup_logger("primesums.sieve")
        >>> logger.info("Sieve built")
    """
    level = getattr(logging, (log_level or settings.LOG_LEVEL).upper())
    to_file = settings.LOG_TO_FILE if log_to_file is None else log_to_file

    logger = logging.getLogger(name)
    logger.setLevel(level)
    logger.handlers = []  # Clear existing handlers
    logger.propagate = False

    # Console handler (colored)
    console = colorlog.StreamHandler(sys.stderr)
    console.setLevel(level)
    console.setFormatter(
        colorlog.ColoredFormatter(
            CONSOLE_FORMAT,
            datefmt='%Y-%m-%d %H:%M:%S',
            log_colors=LOG_COLORS
        )
    )
    logger.addHandler(console)

    # File handler (no colors)
    if to_file:
        log_dir = Path(settings.LOG_DIR)
        log_dir.mkdir(parents=True, exist_ok=True)

        log_file = log_dir / f"{name}_{datetime.now().strftime('%Y%m%d')}.log"
        file_handler = logging.FileHandler(log_file, encoding='utf-8')
        file_handler.setLevel(level)
        file_handler.setFormatter(
            logging.Formatter(FILE_FORMAT, datefmt='%Y-%m-%d %H:%M:%S')
        )
        logger.addHandler(file_handler)

    return logger


def get_logger(name: str) -> logging.Logger:
    """Get or create logger"""
    return setup_logger(name)


def set_global_level(log_level: str) -> None:
    """Re-level every primesums logger (used by the CLI --log-level flag)"""
    level = getattr(logging, log_level.upper())
    for logger_name in list(logging.root.manager.loggerDict):
        if logger_name.startswith("primesums"):
            existing = logging.getLogger(logger_name)
            existing.setLevel(level)
            for handler in existing.handlers:
                handler.setLevel(level)


# Default library logger
app_logger = setup_logger("primesums")
