"""
Configuration Management
Loads and validates environment variables (prefix PRIMESUMS_)
Budgets for sieving, convolution, brute-force oracles and the CLI cache
"""

from functools import lru_cache
from pathlib import Path
from typing import Dict, List

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    """Library and CLI settings from environment variables"""

    # ============================================
    # APPLICATION
    # ============================================
    APP_NAME: str = "primesums"
    APP_VERSION: str = "1.0.0"
    SCHEMA_VERSION: str = "1.0"

    # ============================================
    # LOGGING
    # ============================================
    LOG_LEVEL: str = "INFO"
    LOG_TO_FILE: bool = False
    LOG_DIR: str = "logs"

    # ============================================
    # CACHE (prime tables)
    # ============================================
    CACHE_DIR: str = ".primesums_cache"
    USE_DISK_CACHE: bool = True
    MAX_CACHE_SIZE: int = Field(default=8, ge=1)

    # ============================================
    # SIEVE
    # ============================================
    SIEVE_MAX_BOUND: int = Field(default=10**8, ge=2)
    SIEVE_SEGMENT_SIZE: int = Field(default=2**18, ge=1024)

    # ============================================
    # PARALLELISM
    # ============================================
    THREADS: int = Field(default=1, ge=1)

    # ============================================
    # CONVOLUTION
    # ============================================
    NTT_DIRECT_THRESHOLD: int = Field(default=64, ge=1)
    CONVOLUTION_MAX_LENGTH: int = Field(default=2**24, ge=2)
    CONVOLUTION_OUTPUT_LIMIT: int = Field(default=2**26, ge=2)

    # ============================================
    # ORACLES / ENUMERATION BUDGETS
    # ============================================
    BRUTE_FORCE_LIMIT: int = Field(default=10**7, ge=1)
    GRID_BUDGET: int = Field(default=5 * 10**6, ge=1)

    # ============================================
    # SCANS
    # ============================================
    SCAN_DEFAULT_BOUND: int = 10**6
    SCAN_LARGE_BOUND: int = 10**7

    # ============================================
    # TRANSFERENCE
    # ============================================
    KAPPA_WIDENING: bool = True
    MAX_KAPPA_WIDENINGS: int = Field(default=8, ge=0)
    EXACT_CHECK_MAX_N: int = 2048
    FLOAT_TOLERANCE: float = 1e-9

    # ============================================
    # VALIDATORS
    # ============================================

    @field_validator("LOG_LEVEL", mode="before")
    @classmethod
    def normalize_level(cls, v):
        if isinstance(v, str):
            return v.strip().upper()
        return v

    # ============================================
    # COMPUTED PROPERTIES
    # ============================================

    @property
    def cache_path(self) -> Path:
        """Cache directory as a Path (not created here)"""
        return Path(self.CACHE_DIR)

    model_config = {
        "env_file": ".env",
        "env_prefix": "PRIMESUMS_",
        "case_sensitive": True,
        "extra": "ignore",
    }


@lru_cache()
def get_settings() -> Settings:
    """Get cached settings instance"""
    return Settings()


# Global settings instance
settings = get_settings()


# ============================================
# CONFIGURATION VALIDATION
# ============================================

def validate_configuration() -> Dict[str, object]:
    """
    Validate budget settings against each other

    Returns:
        Dict with validation results
    """
    issues: List[str] = []
    warnings: List[str] = []

    if settings.SIEVE_SEGMENT_SIZE > settings.SIEVE_MAX_BOUND:
        warnings.append("SIEVE_SEGMENT_SIZE exceeds SIEVE_MAX_BOUND - single segment sieve")

    if settings.SCAN_DEFAULT_BOUND > settings.SIEVE_MAX_BOUND:
        issues.append("SCAN_DEFAULT_BOUND exceeds SIEVE_MAX_BOUND - default scans cannot sieve")

    if settings.CONVOLUTION_MAX_LENGTH > 2**26:
        issues.append("CONVOLUTION_MAX_LENGTH above 2^26 - no NTT prime supports that length")

    if 4 * settings.SCAN_LARGE_BOUND + 1 > settings.CONVOLUTION_OUTPUT_LIMIT:
        warnings.append("SCAN_LARGE_BOUND scans at k=4 exceed CONVOLUTION_OUTPUT_LIMIT")

    if settings.LOG_LEVEL not in {"DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"}:
        issues.append(f"Unknown LOG_LEVEL {settings.LOG_LEVEL}")

    return {
        "valid": len(issues) == 0,
        "issues": issues,
        "warnings": warnings,
    }
