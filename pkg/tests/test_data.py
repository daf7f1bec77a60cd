import numpy as np
import pytest

from src.data import (build_vocab, decode, encode, encode_corpus, generate_synthetic_corpus, load_corpus, prepare_data,
                      split_and_shard, tokenize)
from src.exceptions import DatasetError
from src.models import Corpus, EncodedDataset
from src.utils.cache import dataset_cache


def write_sentiment140(path, rows):
    lines = [f'"{polarity}","{i}","Mon Apr 06 2009","NO_QUERY","user{i}","{text}"' for i, (polarity, text) in
             enumerate(rows)]
    path.write_text('\n'.join(lines) + '\n', encoding='latin-1')
    return path


class TestLoadCorpus:
    def test_polarity_mapping(self, tmp_path):
        path = write_sentiment140(tmp_path / 'tweets.csv', [(0, 'bad day'), (4, 'good day'), (0, 'sad'), (4, 'yay')])
        corpus = load_corpus(path)
        assert list(corpus.labels) == [0, 1, 0, 1]
        assert corpus.texts[1] == 'good day'

    def test_subsample_is_seeded(self, tmp_path):
        path = write_sentiment140(tmp_path / 'tweets.csv', [(0, 'a'), (4, 'b'), (0, 'c'), (4, 'd')])
        first = load_corpus(path, max_records=2, seed=3)
        second = load_corpus(path, max_records=2, seed=3)
        assert len(first) == 2
        assert first.records == second.records

    def test_bad_polarity_skipped_and_counted(self, tmp_path):
        path = write_sentiment140(tmp_path / 'tweets.csv', [(0, 'a'), (2, 'neutral'), (4, 'b')])
        corpus = load_corpus(path)
        assert len(corpus) == 2
        assert corpus.skipped == 1

    def test_simple_layout(self, tmp_path):
        path = tmp_path / 'simple.csv'
        path.write_text('1,loved it\n0,hated it\n', encoding='latin-1')
        corpus = load_corpus(path, layout='simple')
        assert list(corpus.labels) == [1, 0]

    def test_missing_file(self, tmp_path):
        with pytest.raises(OSError):
            load_corpus(tmp_path / 'absent.csv')

    def test_labels_restricted_to_binary(self):
        with pytest.raises(DatasetError):
            Corpus(records=[(2, 'x')])


class TestVocab:
    def test_size_counts_reserved_id(self):
        vocab = build_vocab(Corpus(records=[(0, 'a b c'), (1, 'a b')]))
        assert vocab.size == 4

    def test_frequency_then_lexicographic(self):
        vocab = build_vocab(Corpus(records=[(0, 'zeta alpha beta'), (1, 'beta zeta')]))
        assert vocab.token_to_id == {'beta': 1, 'zeta': 2, 'alpha': 3}

    def test_caps_at_max_words(self):
        texts = ' '.join(f"t{i}" for i in range(12_000))
        vocab = build_vocab(Corpus(records=[(0, texts)]), max_words=10_000)
        assert vocab.size == 10_001
        assert len(set(vocab.token_to_id.values())) == 10_000

    def test_deterministic(self, small_corpus):
        assert build_vocab(small_corpus).token_to_id == build_vocab(small_corpus).token_to_id

    def test_empty_corpus(self):
        with pytest.raises(DatasetError):
            build_vocab(Corpus(records=[]))


class TestEncode:
    @pytest.fixture
    def vocab(self):
        return build_vocab(Corpus(records=[(1, 'good good day'), (0, 'bad day')]))

    def test_empty_text(self, vocab):
        np.testing.assert_array_equal(encode('', vocab), np.zeros(30, dtype=np.int64))

    def test_case_folding_and_padding(self, vocab):
        ids = encode('Good GOOD good', vocab)
        assert ids[0] == ids[1] == ids[2] == vocab.lookup('good')
        assert not ids[3:].any()

    def test_truncation(self, vocab):
        ids = encode(' '.join(['day'] * 40), vocab)
        assert ids.shape == (30,)
        assert np.all(ids == vocab.lookup('day'))

    def test_punctuation_stripped(self):
        assert tokenize("Good!!! day... @bob #win don't") == ['good', 'day', '@bob', '#win', "don't"]

    def test_reencode_is_fixed_point(self, small_corpus):
        vocab = build_vocab(small_corpus)
        for text in small_corpus.texts[:50]:
            ids = encode(text, vocab)
            np.testing.assert_array_equal(encode(decode(ids, vocab), vocab), ids)

    def test_ids_within_vocab(self, small_dataset):
        assert small_dataset.ids.shape[1] == 30
        assert small_dataset.ids.min() >= 0 and small_dataset.ids.max() <= 10_000


class TestSharding:
    def test_hundred_samples_one_user(self):
        samples = EncodedDataset(np.zeros((100, 30)), np.zeros(100))
        shards, test = split_and_shard(samples, 1)
        assert len(shards[0]) == 90 and len(test) == 10

    def test_disjoint_equal_shards(self, small_dataset):
        tagged = EncodedDataset(np.arange(len(small_dataset))[:, None].repeat(30, axis=1), small_dataset.labels)
        shards, test = split_and_shard(tagged, 3, seed=5)
        sizes = {len(s) for s in shards}
        assert sizes == {(len(tagged) - len(test)) // 3}
        seen = [set(s.ids[:, 0]) for s in shards] + [set(test.ids[:, 0])]
        for i in range(len(seen)):
            for j in range(i + 1, len(seen)):
                assert not seen[i] & seen[j]

    def test_seeded(self, small_dataset):
        a, _ = split_and_shard(small_dataset, 3, seed=9)
        b, _ = split_and_shard(small_dataset, 3, seed=9)
        for x, y in zip(a, b):
            np.testing.assert_array_equal(x.ids, y.ids)

    def test_too_few_samples(self):
        samples = EncodedDataset(np.zeros((3, 30)), np.zeros(3))
        with pytest.raises(DatasetError):
            split_and_shard(samples, 5)


class TestSyntheticCorpus:
    def test_size_and_labels(self):
        corpus = generate_synthetic_corpus(200, seed=1)
        assert len(corpus) == 200
        assert set(corpus.labels) <= {0, 1}

    def test_seeded(self):
        assert generate_synthetic_corpus(50, seed=4).records == generate_synthetic_corpus(50, seed=4).records

    def test_label_noise_zero_keeps_keywords_aligned(self):
        corpus = generate_synthetic_corpus(100, seed=2, label_noise=0.0)
        for label, text in corpus.records:
            words = text.split()
            positive = sum(w in ('good', 'great', 'love', 'happy', 'awesome', 'nice', 'fun', 'best', 'thanks',
                                 'excited', 'amazing', 'cool', 'glad', 'lol', 'yay', 'sweet') for w in words)
            negative = sum(w in ('bad', 'sad', 'hate', 'sick', 'tired', 'miss', 'sorry', 'worst', 'ugh', 'bored',
                                 'awful', 'hurts', 'cry', 'lost', 'broken', 'fail') for w in words)
            assert (positive > negative) == bool(label)

    def test_tweets_fit_the_sequence_length(self):
        corpus = generate_synthetic_corpus(300, seed=3)
        assert max(len(text.split()) for text in corpus.texts) <= 30

    def test_noise_rate_roughly_matches(self):
        clean = generate_synthetic_corpus(2000, seed=5, label_noise=0.0)
        noisy = generate_synthetic_corpus(2000, seed=5, label_noise=0.1)
        flipped = np.mean(np.array(clean.labels) != np.array(noisy.labels))
        assert 0.05 < flipped < 0.15


class TestPipeline:
    def test_prepared_once_per_key(self, make_config):
        cfg = make_config(scheme='fl', users=3)
        first = prepare_data(cfg)
        second = prepare_data(cfg.replace(cycles=5))
        assert first is second
        assert dataset_cache.hits >= 1

    def test_shards_match_users(self, make_config):
        data = prepare_data(make_config(scheme='fl', users=3))
        assert len(data.shards) == 3
        assert len(data.test) == 60
        assert data.train_size == 540
