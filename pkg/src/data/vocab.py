import re
from collections import Counter
from typing import Iterable, List

import numpy as np

from src.exceptions import DatasetError
from src.models import Corpus, EncodedDataset, Vocab

OOV_TOKEN = '<oov>'
_STRIP = re.compile(r"[^a-z0-9'@#]")


def tokenize(text: str) -> List[str]:
    """Lowercase, split on whitespace, drop characters outside [a-z0-9'@#]"""
    tokens = []
    for raw in text.lower().split():
        if raw == OOV_TOKEN:
            tokens.append(raw)
            continue
        token = _STRIP.sub('', raw)
        if token:
            tokens.append(token)
    return tokens


def build_vocab(corpus: Corpus, max_words: int = 10_000) -> Vocab:
    """Top max_words tokens by frequency (ties lexicographic) get ids 1..max_words"""
    if len(corpus) == 0:
        raise DatasetError("cannot build a vocabulary from an empty corpus")
    counts = Counter(token for text in corpus.texts for token in tokenize(text) if token != OOV_TOKEN)
    ranked = sorted(counts.items(), key=lambda item: (-item[1], item[0]))[:max_words]
    return Vocab(token_to_id={token: i for i, (token, _) in enumerate(ranked, start=1)}, max_words=max_words)


def encode(text: str, vocab: Vocab, max_len: int = 30) -> np.ndarray:
    """Token ids right-padded with 0 (or truncated) to exactly max_len"""
    ids = np.zeros(max_len, dtype=np.int64)
    tokens = tokenize(text)[:max_len]
    ids[:len(tokens)] = [vocab.lookup(token) for token in tokens]
    return ids


def decode(ids: Iterable[int], vocab: Vocab) -> str:
    """Inverse of encode up to vocabulary coverage: trailing padding dropped,
    interior zeros written as the out-of-vocabulary marker"""
    ids = list(int(i) for i in ids)
    while ids and ids[-1] == 0:
        ids.pop()
    return ' '.join(vocab.id_to_token[i] if i else OOV_TOKEN for i in ids)


def encode_corpus(corpus: Corpus, vocab: Vocab, max_len: int = 30) -> EncodedDataset:
    ids = np.zeros((len(corpus), max_len), dtype=np.int64)
    for row, text in enumerate(corpus.texts):
        ids[row] = encode(text, vocab, max_len)
    return EncodedDataset(ids=ids, labels=corpus.labels)
