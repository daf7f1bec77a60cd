import hashlib
from typing import Union

import numpy as np

Key = Union[str, int]


def derive_seed(master_seed: int, *keys: Key) -> int:
    """Keyed hash of the master seed: hash(master_seed, key_1, ..., key_n)"""
    digest = hashlib.sha256(repr((int(master_seed),) + tuple(keys)).encode('utf-8')).digest()
    return int.from_bytes(digest[:8], 'big')


def derive_rng(master_seed: int, *keys: Key) -> np.random.Generator:
    """Independent generator for one stream, e.g. ("channel", user, cycle, "uplink").

    Streams never share state, so toggling one component (or running users in
    parallel) leaves every other stream untouched.
    """
    return np.random.default_rng(derive_seed(master_seed, *keys))
