"""
Services module initialization
Global service instances; the remaining services are plain function modules
"""

from primesums.services.cache_service import CacheService, cache_service
from primesums.services.sieve_service import SieveService, sieve_service

__all__ = [
    "cache_service",
    "sieve_service",
    "CacheService",
    "SieveService",
]
