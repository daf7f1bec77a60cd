from .settings import *

__all__ = [
    'ENV_PREFIX',
    'VOCAB_SIZE',
    'MAX_SEQUENCE_LENGTH',
    'BATCH_SIZE',
    'LEARNING_RATE',
    'MOMENTUM',
    'CLIP_THRESHOLD',
    'BANDWIDTH_HZ',
    'POWER_W',
    'SCHEME_DEFAULTS',
    'METRICS_SCHEMA_VERSION',
]
