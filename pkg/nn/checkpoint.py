"""
Model checkpoint file: b"XPKM", u16 version, u32 JSON length, JSON (model spec
and training manifest), u64 parameter count, little-endian f64 parameters.
"""
import json
import logging
import struct
from pathlib import Path
from typing import Dict, Optional, Tuple, Union

import numpy as np

from .layers import ShapeMismatchError
from .model import Model, ModelSpec, parameter_count

logger = logging.getLogger(__name__)

CHECKPOINT_MAGIC = b'XPKM'
CHECKPOINT_VERSION = 1
_PREFIX = struct.Struct('<4sHI')
_COUNT = struct.Struct('<Q')


class CheckpointFormatError(ValueError):
    """Checkpoint file is corrupt or of an unsupported version"""


def encode_checkpoint(model: Model, manifest: Optional[Dict] = None) -> bytes:
    header = json.dumps(
        {'model_spec': model.spec.to_dict(), 'manifest': manifest or {}, 'trained': model.trained},
        sort_keys=True,
    ).encode('utf-8')
    return (
        _PREFIX.pack(CHECKPOINT_MAGIC, CHECKPOINT_VERSION, len(header))
        + header
        + _COUNT.pack(model.params.size)
        + model.params.astype('<f8').tobytes()
    )


def save_checkpoint(model: Model, path: Union[str, Path], manifest: Optional[Dict] = None) -> str:
    """Write the checkpoint; returns the model checksum"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(encode_checkpoint(model, manifest))
    checksum = model.checksum()
    logger.info(f"Saved '{model.spec.variant}' checkpoint to {path} ({checksum[:12]})")
    return checksum


def decode_checkpoint(data: bytes) -> Tuple[Model, Dict]:
    if len(data) < _PREFIX.size:
        raise CheckpointFormatError("Checkpoint truncated before its header")
    magic, version, header_len = _PREFIX.unpack_from(data)
    if magic != CHECKPOINT_MAGIC:
        raise CheckpointFormatError(f"Bad checkpoint magic {magic!r}")
    if version != CHECKPOINT_VERSION:
        raise CheckpointFormatError(f"Unsupported checkpoint version {version}")
    offset = _PREFIX.size
    try:
        header = json.loads(data[offset:offset + header_len].decode('utf-8'))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise CheckpointFormatError(f"Checkpoint header unreadable: {e}")
    offset += header_len
    if len(data) < offset + _COUNT.size:
        raise CheckpointFormatError("Checkpoint truncated before its parameters")
    (count,) = _COUNT.unpack_from(data, offset)
    offset += _COUNT.size

    spec = ModelSpec.from_dict(header['model_spec'])
    expected = parameter_count(spec)
    if count != expected:
        raise ShapeMismatchError(f"Checkpoint holds {count} parameters, its model spec needs {expected}")
    if len(data) != offset + 8 * count:
        raise CheckpointFormatError(f"Checkpoint parameter block has {len(data) - offset} bytes, expected {8 * count}")

    model = Model(spec)
    model.load_parameters(np.frombuffer(data, dtype='<f8', count=count, offset=offset))
    model.trained = bool(header.get('trained', True))
    return model, header.get('manifest', {})


def load_checkpoint(path: Union[str, Path], expected_input_shape: Optional[Tuple[int, ...]] = None) -> Tuple[Model, Dict]:
    """Model and training manifest; rejects spec or shape mismatches"""
    model, manifest = decode_checkpoint(Path(path).read_bytes())
    if expected_input_shape is not None and tuple(expected_input_shape) != model.input_shape:
        raise ShapeMismatchError(
            f"Model at {path} takes inputs of shape {model.input_shape}, data has {tuple(expected_input_shape)}"
        )
    logger.info(f"Loaded '{model.spec.variant}' model from {path}")
    return model, manifest
