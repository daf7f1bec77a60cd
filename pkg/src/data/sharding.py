from typing import List, Tuple

import numpy as np

from src.exceptions import DatasetError
from src.models import EncodedDataset


def split_and_shard(samples: EncodedDataset, n_users: int, test_fraction: float = 0.10,
                    seed: int = 0) -> Tuple[List[EncodedDataset], EncodedDataset]:
    """
    Seeded shuffle, last test_fraction held out as the shared test set, the rest
    cut into n_users equal disjoint shards (remainder dropped)
    """
    if n_users < 1:
        raise DatasetError(f"need at least one user, got {n_users}")
    total = len(samples)
    n_test = int(round(total * test_fraction))
    n_train = total - n_test
    if n_train < n_users:
        raise DatasetError(f"{n_train} training samples cannot be sharded across {n_users} users")

    order = np.random.default_rng(seed).permutation(total)
    train_idx, test_idx = order[:n_train], order[n_train:]
    per_user = n_train // n_users
    shards = [samples.subset(train_idx[u * per_user:(u + 1) * per_user]) for u in range(n_users)]
    return shards, samples.subset(test_idx)
