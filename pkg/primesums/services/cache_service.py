"""
Cache Service
In-memory LRU of prime tables plus bit-vector files under CACHE_DIR
"""

import hashlib
import json
from pathlib import Path
from typing import Any, Dict, Optional, Union

from cachetools import LRUCache

from primesums.core.config import settings
from primesums.core.logger import get_logger
from primesums.models.domain import PrimeTable

logger = get_logger(__name__)


class CacheService:
    """
    Prime-table cache with unique ID generation

    Features:
    - SHA-256 ids for request parameters
    - LRU of recently built tables (any cached table serves smaller bounds)
    - Persistent bit-vector files (8-byte bound header + packed bits)
    """

    def __init__(
        self,
        max_size: Optional[int] = None,
        cache_dir: Optional[Union[str, Path]] = None,
        use_disk: Optional[bool] = None,
    ):
        """
        Initialize cache service

        Args:
            max_size: Maximum tables held in memory (default from settings)
            cache_dir: Directory for table files (default settings.CACHE_DIR)
            use_disk: Persist tables (default settings.USE_DISK_CACHE)
        """
        self.max_size = max_size or settings.MAX_CACHE_SIZE
        self.cache: LRUCache = LRUCache(maxsize=self.max_size)
        self._cache_dir = Path(cache_dir) if cache_dir is not None else None
        self._use_disk = use_disk
        self.hits = 0
        self.misses = 0

        logger.debug(f"✅ Cache Service initialized (Max: {self.max_size})")

    @property
    def cache_dir(self) -> Path:
        return self._cache_dir if self._cache_dir is not None else settings.cache_path

    @property
    def use_disk(self) -> bool:
        return settings.USE_DISK_CACHE if self._use_disk is None else self._use_disk

    def generate_unique_id(self, data: Any) -> str:
        """
        Generate unique ID from data using SHA256 hash

        Example:
            >>> cache = CacheService()
            >>> cache.generate_unique_id({"bound": 100}) == cache.generate_unique_id({"bound": 100})
            True
        """
        if isinstance(data, (dict, list)):
            data_str = json.dumps(data, sort_keys=True)
        else:
            data_str = str(data)
        unique_id = hashlib.sha256(data_str.encode()).hexdigest()
        logger.debug(f"🔑 Generated ID: {unique_id[:16]}...")
        return unique_id

    def table_path(self, bound: int) -> Path:
        key = self.generate_unique_id({"kind": "prime_table", "bound": bound})
        return self.cache_dir / f"primes_{bound}_{key[:16]}.bits"

    def get_table(self, bound: int) -> Optional[PrimeTable]:
        """
        Cached table covering [0, bound], restricted to bound

        Returns:
            PrimeTable or None on a miss
        """
        exact = self.cache.get(bound)
        if exact is not None:
            self.hits += 1
            logger.debug(f"✅ Cache hit: primes <= {bound}")
            return exact

        covering = [b for b in list(self.cache.keys()) if b >= bound]
        if covering:
            self.hits += 1
            table = self.cache[min(covering)].restrict(bound)
            logger.debug(f"✅ Cache hit: primes <= {bound} (restricted from {min(covering)})")
            return table

        if self.use_disk:
            path = self.table_path(bound)
            if path.exists():
                try:
                    table = PrimeTable.load(path)
                except (OSError, ValueError) as e:
                    logger.warning(f"⚠️ Ignoring unreadable cache file {path}: {e}")
                else:
                    if table.bound == bound:
                        self.hits += 1
                        self.cache[bound] = table
                        logger.info(f"📦 Loaded primes <= {bound} from {path}")
                        return table

        self.misses += 1
        logger.debug(f"❌ Cache miss: primes <= {bound}")
        return None

    def put_table(self, table: PrimeTable) -> Optional[Path]:
        """Store a table in memory and, when enabled, on disk"""
        self.cache[table.bound] = table
        if not self.use_disk:
            return None
        path = self.table_path(table.bound)
        try:
            table.save(path)
        except OSError as e:
            logger.warning(f"⚠️ Could not persist prime table to {path}: {e}")
            return None
        logger.info(f"💾 Cached primes <= {table.bound} at {path}")
        return path

    def clear(self) -> None:
        """Clear the in-memory cache (files are left in place)"""
        self.cache.clear()
        self.hits = 0
        self.misses = 0
        logger.debug("🧹 Cache cleared")

    def get_stats(self) -> Dict[str, object]:
        return {
            "size": len(self.cache),
            "max_size": self.max_size,
            "hits": self.hits,
            "misses": self.misses,
            "bounds": sorted(self.cache.keys()),
            "cache_dir": str(self.cache_dir),
            "use_disk": self.use_disk,
        }


# Global cache instance
cache_service = CacheService()
