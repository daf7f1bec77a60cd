from .corpus import generate_synthetic_corpus, load_corpus
from .pipeline import PreparedData, prepare_data
from .sharding import split_and_shard
from .vocab import OOV_TOKEN, build_vocab, decode, encode, encode_corpus, tokenize

__all__ = ['PreparedData', 'prepare_data', 'generate_synthetic_corpus', 'load_corpus', 'split_and_shard', 'OOV_TOKEN',
           'build_vocab', 'decode', 'encode', 'encode_corpus', 'tokenize']
