"""
Content-addressed cache of serialized result records.

Each record is stored as ``<digest>.json`` under the cache directory, so a
repeated command with the same canonical configuration is answered from
disk.
"""

import logging
from pathlib import Path
from typing import Optional

logger = logging.getLogger(__name__)


class ResultCache:
    """JSON file cache keyed by config digest."""

    def __init__(self, cache_dir: str = ".cache"):
        """Initialize cache.

        Args:
            cache_dir: Directory holding the cached records
        """
        self.cache_dir = Path(cache_dir)
        self.cache_dir.mkdir(parents=True, exist_ok=True)

    def path(self, digest: str) -> Path:
        return self.cache_dir / f"{digest}.json"

    def load(self, digest: str) -> Optional[str]:
        """Stored record text, or None on a miss."""
        cache_file = self.path(digest)
        if not cache_file.exists():
            return None
        logger.info(f"Loading result from cache ({digest[:12]})...")
        return cache_file.read_text()

    def store(self, digest: str, text: str) -> Path:
        """Write record text atomically."""
        cache_file = self.path(digest)
        partial = cache_file.with_suffix(".tmp")
        partial.write_text(text)
        partial.replace(cache_file)
        logger.debug(f"Cached result to {cache_file}")
        return cache_file
