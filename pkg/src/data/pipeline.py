from dataclasses import dataclass
from typing import List

from config import settings
from src.models import EncodedDataset, Vocab
from src.utils.cache import dataset_cache
from src.utils.logger import get_logger
from src.utils.seeding import derive_seed
from .corpus import generate_synthetic_corpus, load_corpus
from .sharding import split_and_shard
from .vocab import build_vocab, encode_corpus

logger = get_logger(__name__)


@dataclass(frozen=True)
class PreparedData:
    vocab: Vocab
    shards: List[EncodedDataset]
    test: EncodedDataset

    @property
    def train_size(self) -> int:
        return sum(len(s) for s in self.shards)


def prepare_data(cfg) -> PreparedData:
    """Corpus → vocab → encoded samples → user shards + shared test set (cached per process)"""
    key = (cfg.dataset, cfg.dataset_layout, cfg.max_records, cfg.synthetic_records, cfg.label_noise,
           cfg.seed, cfg.users, cfg.test_fraction)
    return dataset_cache.get_or_create(key, lambda: _prepare(cfg))


def _prepare(cfg) -> PreparedData:
    if cfg.dataset == 'synthetic':
        n_records = cfg.synthetic_records if cfg.max_records is None else min(cfg.synthetic_records, cfg.max_records)
        corpus = generate_synthetic_corpus(n_records, seed=derive_seed(cfg.seed, 'synthetic'),
                                           label_noise=cfg.label_noise)
    else:
        corpus = load_corpus(cfg.dataset, cfg.max_records, seed=derive_seed(cfg.seed, 'data'),
                             layout=cfg.dataset_layout)

    vocab = build_vocab(corpus, max_words=settings.VOCAB_SIZE)
    samples = encode_corpus(corpus, vocab, settings.MAX_SEQUENCE_LENGTH)
    shards, test = split_and_shard(samples, cfg.users, cfg.test_fraction, seed=derive_seed(cfg.seed, 'split'))
    logger.info(f"✅ Prepared {len(samples)} samples: {cfg.users} shard(s) of {len(shards[0])}, "
                f"{len(test)} test, vocab {vocab.size}")
    return PreparedData(vocab=vocab, shards=shards, test=test)
