"""
Checkpoint byte layout (all integers little-endian):

    magic      4 bytes  b"WLSM"
    version    uint16   1
    n_arrays   uint32
    per array, in Sequential.named_params order:
        name_len  uint16, name (utf-8, "<layer index>.<kind>.<param>")
        ndim      uint8,  dims (uint32 each)
    values     float32 little-endian, the flat parameter vector
"""
import struct
from pathlib import Path
from typing import List, Tuple, Union

import numpy as np

from src.exceptions import ShapeError
from src.nn import Sequential
from src.utils.logger import get_logger
from .sentiment import flatten_params, unflatten_params

logger = get_logger(__name__)

MAGIC = b'WLSM'
VERSION = 1


def _entries(model: Sequential) -> List[Tuple[str, Tuple[int, ...]]]:
    index = {id(layer): i for i, layer in enumerate(model.layers)}
    return [(f"{index[id(layer)]}.{layer.kind}.{name}", layer.params[name].shape)
            for layer, name in model.named_params()]


def save_checkpoint(model: Sequential, path: Union[str, Path]) -> int:
    """Write the model; returns the number of bytes written"""
    entries = _entries(model)
    header = bytearray(MAGIC)
    header += struct.pack('<HI', VERSION, len(entries))
    for name, shape in entries:
        encoded = name.encode('utf-8')
        header += struct.pack('<H', len(encoded)) + encoded
        header += struct.pack('<B', len(shape)) + struct.pack(f'<{len(shape)}I', *shape)
    payload = bytes(header) + flatten_params(model).astype('<f4').tobytes()
    Path(path).write_bytes(payload)
    logger.info(f"💾 Saved checkpoint {path} ({len(payload)} bytes)")
    return len(payload)


def load_checkpoint(path: Union[str, Path], model: Sequential) -> Sequential:
    """Read parameters into an already built model with the same layout"""
    data = Path(path).read_bytes()
    if data[:4] != MAGIC:
        raise ShapeError(f"{path}: not a checkpoint file")
    version, n_arrays = struct.unpack_from('<HI', data, 4)
    if version != VERSION:
        raise ShapeError(f"{path}: unsupported checkpoint version {version}")
    offset = 10
    entries = []
    for _ in range(n_arrays):
        (name_len,) = struct.unpack_from('<H', data, offset)
        offset += 2
        name = data[offset:offset + name_len].decode('utf-8')
        offset += name_len
        (ndim,) = struct.unpack_from('<B', data, offset)
        offset += 1
        shape = struct.unpack_from(f'<{ndim}I', data, offset)
        offset += 4 * ndim
        entries.append((name, tuple(shape)))
    if entries != _entries(model):
        raise ShapeError(f"{path}: layout does not match the model")
    flat = np.frombuffer(data, dtype='<f4', offset=offset)
    return unflatten_params(model, flat.astype(np.float32))
