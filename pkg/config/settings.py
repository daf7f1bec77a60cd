import math
import os

from dotenv import load_dotenv

load_dotenv()

# Every default below can be overridden with an environment variable WLSIM_<NAME>
ENV_PREFIX = 'WLSIM_'


def _env(name: str, default: str) -> str:
    return os.getenv(f'{ENV_PREFIX}{name}', default)


# Data
VOCAB_SIZE: int = int(_env('VOCAB_SIZE', '10000'))
MAX_SEQUENCE_LENGTH: int = int(_env('MAX_SEQUENCE_LENGTH', '30'))
TEST_FRACTION: float = float(_env('TEST_FRACTION', '0.10'))

# Architecture
EMBEDDING_DIM = 8
CONV_FILTERS = 32
CONV_KERNEL = 3
POOL_SIZE = 2
LSTM_UNITS = 32
DENSE_UNITS = 16
COMPRESSION_FACTOR = 4
SPLIT_CUT_INDEX = 3
L2_COEFFICIENT: float = float(_env('L2', '1e-4'))
# Unit-scale embeddings keep the logit spread well above zero at init
EMBEDDING_INIT_RANGE: float = float(_env('EMBEDDING_INIT_RANGE', '1.0'))

# Optimizer
BATCH_SIZE: int = int(_env('BATCH_SIZE', '512'))
LEARNING_RATE: float = float(_env('LR', '0.01'))
MOMENTUM: float = float(_env('MOMENTUM', '0.9'))
LR_DECAY: float = float(_env('LR_DECAY', '0.9'))
LR_STEP_EPOCHS: int = int(_env('LR_STEP_EPOCHS', '5'))
CLIP_THRESHOLD: float = float(_env('CLIP', '0.5'))
BCE_EPSILON = 1e-7

# Channel
BANDWIDTH_HZ: float = float(_env('BANDWIDTH_HZ', '100000'))
POWER_W: float = float(_env('POWER_W', '0.001'))
SNR_DB: float = float(_env('SNR_DB', '20'))
FADING: str = _env('FADING', 'rayleigh')
FADING_NORM: float = float(_env('FADING_NORM', '1.0'))

# Schemes: users / cycles / local epochs
SCHEME_DEFAULTS = {
    'fl': {'users': 3, 'cycles': 7, 'local_epochs': 5},
    'sl': {'users': 1, 'cycles': 50, 'local_epochs': 1},
    'cl': {'users': 3, 'cycles': 50, 'local_epochs': 1},
}
TEXT_PRESET_FL_CYCLES = 50
QUANT_BITS: int = int(_env('QUANT_BITS', '8'))
SL_TRANSPORT_BITS = 16
SL_CYCLE_FRACTION: float = float(_env('SL_CYCLE_FRACTION', '0.04'))
CL_LABEL_BITS = 2

# Energy proxies (rough desk figures)
JOULES_PER_FLOP: float = float(_env('JOULES_PER_FLOP', '1e-9'))
GRAMS_CO2_PER_JOULE: float = float(_env('GRAMS_PER_JOULE', '1.11e-4'))

# Privacy
PRIVACY_SAMPLES: int = int(_env('PRIVACY_SAMPLES', '1000'))
PRIVACY_EPOCHS: int = int(_env('PRIVACY_EPOCHS', '300'))
PRIVACY_BATCH_SIZE: int = int(_env('PRIVACY_BATCH_SIZE', '64'))
FL_PROJECTION_DIM = 448
ADVERSARY_HIDDEN = (128, 64, 128)
# Early stop: epochs allowed without a relative loss drop of ADVERSARY_MIN_IMPROVEMENT
ADVERSARY_PATIENCE: int = int(_env('ADVERSARY_PATIENCE', '20'))
ADVERSARY_MIN_IMPROVEMENT = 1e-3
ADVERSARY_CLIP = 1.0

# Desk scale
SYNTHETIC_RECORDS: int = int(_env('SYNTHETIC_RECORDS', '20000'))
LABEL_NOISE: float = float(_env('LABEL_NOISE', '0.1'))
SEED: int = int(_env('SEED', '0'))

METRICS_SCHEMA_VERSION = 'wlsim-metrics/v1'
INF = math.inf
