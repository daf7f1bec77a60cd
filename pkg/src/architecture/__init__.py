from .checkpoint import load_checkpoint, save_checkpoint
from .sentiment import EMBEDDING_ROWS, PARAM_COUNT, SentimentModel, build_model, flatten_params, unflatten_params
from .split import CompressionCodec, SplitModel, server_forward, user_forward

__all__ = ['load_checkpoint', 'save_checkpoint', 'EMBEDDING_ROWS', 'PARAM_COUNT', 'SentimentModel', 'build_model',
           'flatten_params', 'unflatten_params', 'CompressionCodec', 'SplitModel', 'server_forward', 'user_forward']
