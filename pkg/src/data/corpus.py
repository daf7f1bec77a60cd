from pathlib import Path
from typing import List, Optional, Tuple, Union

import numpy as np
import pandas as pd

from src.exceptions import DatasetError
from src.models import Corpus
from src.utils.logger import get_logger

logger = get_logger(__name__)

# Sentiment140: polarity, id, date, query, user, text (latin-1)
SENTIMENT140_COLUMNS = 6
POLARITY_TO_LABEL = {0: 0, 4: 1}


def load_corpus(path: Union[str, Path], max_records: Optional[int] = None, seed: int = 0,
                layout: str = 'sentiment140') -> Corpus:
    """
    Read a Sentiment140 CSV (polarity in field 1, text in field 6) or a two-column
    label,text CSV. Malformed rows are skipped and counted. When the file holds
    more than max_records rows a seeded uniform subsample (original order kept)
    is returned.
    """
    bad_lines: List[List[str]] = []
    frame = pd.read_csv(
        path,
        header=None,
        dtype=str,
        encoding='latin-1',
        engine='python',
        keep_default_na=False,
        on_bad_lines=lambda line: bad_lines.append(line),
    )

    if layout == 'sentiment140':
        expected, label_col, text_col = SENTIMENT140_COLUMNS, 0, 5
    elif layout == 'simple':
        expected, label_col, text_col = 2, 0, 1
    else:
        raise DatasetError(f"unknown corpus layout {layout!r}")

    if frame.shape[1] != expected:
        raise DatasetError(f"{path}: expected {expected} columns for layout {layout!r}, found {frame.shape[1]}")

    records, skipped = _parse_rows(frame[label_col].tolist(), frame[text_col].tolist(), layout)
    skipped += len(bad_lines)

    if skipped:
        logger.warning(f"⚠️ Skipped {skipped} malformed rows in {path}")

    if max_records is not None and len(records) > max_records:
        rng = np.random.default_rng(seed)
        keep = np.sort(rng.choice(len(records), size=max_records, replace=False))
        records = [records[i] for i in keep]

    logger.info(f"✅ Loaded {len(records)} records from {path} ({layout})")
    return Corpus(records=records, skipped=skipped)


def _parse_rows(labels: List[str], texts: List[str], layout: str) -> Tuple[List[Tuple[int, str]], int]:
    records = []
    skipped = 0
    for raw_label, text in zip(labels, texts):
        if not isinstance(text, str):
            skipped += 1
            continue
        try:
            value = int(str(raw_label).strip().strip('"'))
        except ValueError:
            skipped += 1
            continue
        if layout == 'sentiment140':
            if value not in POLARITY_TO_LABEL:
                skipped += 1
                continue
            label = POLARITY_TO_LABEL[value]
        else:
            if value not in (0, 1):
                skipped += 1
                continue
            label = value
        records.append((label, text))
    return records, skipped


# Keyword pools for the synthetic stand-in corpus
POSITIVE_WORDS = ('good', 'great', 'love', 'happy', 'awesome', 'nice', 'fun', 'best', 'thanks', 'excited',
                  'amazing', 'cool', 'glad', 'lol', 'yay', 'sweet')
NEGATIVE_WORDS = ('bad', 'sad', 'hate', 'sick', 'tired', 'miss', 'sorry', 'worst', 'ugh', 'bored', 'awful',
                  'hurts', 'cry', 'lost', 'broken', 'fail')


def generate_synthetic_corpus(n_records: int, seed: int = 0, filler_vocab: int = 3000,
                              label_noise: float = 0.1, min_len: int = 8, max_len: int = 30) -> Corpus:
    """
    Keyword-driven tweets: the label follows whichever sentiment pool contributes
    more words; `label_noise` flips that fraction of labels so accuracy plateaus
    below 1 like the real corpus. Filler words follow a Zipf-like frequency profile.
    Tweets never exceed the encoded sequence length, so no keyword is truncated away.
    """
    if n_records < 1:
        raise DatasetError("synthetic corpus needs at least one record")
    rng = np.random.default_rng(seed)
    filler = np.array([f"w{i}" for i in range(filler_vocab)])
    ranks = np.arange(1, filler_vocab + 1, dtype=np.float64)
    filler_p = (1.0 / ranks) / np.sum(1.0 / ranks)

    records = []
    for _ in range(n_records):
        length = int(rng.integers(min_len, max_len + 1))
        label = int(rng.integers(0, 2))
        n_sentiment = int(rng.integers(1, 4))
        strong = POSITIVE_WORDS if label else NEGATIVE_WORDS
        weak = NEGATIVE_WORDS if label else POSITIVE_WORDS
        n_weak = int(rng.integers(0, n_sentiment))
        words = list(rng.choice(filler, size=max(length - n_sentiment - n_weak, 0), p=filler_p))
        words += list(rng.choice(strong, size=n_sentiment))
        words += list(rng.choice(weak, size=n_weak))
        rng.shuffle(words)
        if rng.random() < label_noise:
            label = 1 - label
        records.append((label, ' '.join(words)))
    return Corpus(records=records)
