from threading import Lock
from typing import Any, Callable, Hashable, Optional

from cachetools import LRUCache


class DatasetCache:
    """
    In-process cache for prepared datasets
    Sweeps re-run the same corpus many times; preparation happens once per key
    """

    def __init__(self, maxsize: int = 8):
        self._cache: LRUCache = LRUCache(maxsize=maxsize)
        self._lock = Lock()
        self.hits = 0
        self.misses = 0

    def get(self, key: Hashable) -> Optional[Any]:
        with self._lock:
            value = self._cache.get(key)
            if value is not None:
                self.hits += 1
            return value

    def set(self, key: Hashable, value: Any):
        with self._lock:
            self._cache[key] = value

    def get_or_create(self, key: Hashable, factory: Callable[[], Any]) -> Any:
        """Return cached value or build it with factory()"""
        cached = self.get(key)
        if cached is not None:
            return cached
        with self._lock:
            self.misses += 1
        value = factory()
        self.set(key, value)
        return value

    def clear(self):
        with self._lock:
            self._cache.clear()

    def __len__(self) -> int:
        return len(self._cache)

    def __contains__(self, key: Hashable) -> bool:
        return key in self._cache


dataset_cache = DatasetCache()
