from .cache import DatasetCache, dataset_cache
from .logger import get_logger
from .seeding import derive_rng, derive_seed

__all__ = ['DatasetCache', 'dataset_cache', 'get_logger', 'derive_rng', 'derive_seed']
