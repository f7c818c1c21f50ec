"""
Binary checkpoint format (all integers little-endian)::

    b'TAPT'                      magic
    u32                          format version
    u32                          header length in bytes
    header                       canonical JSON: {"config": {...},
                                 "normalization": bool}
    float64[...]                 every ModelParams array, in
                                 ModelParams.named_arrays() order
    float64[F], float64[F]       z-score mean and std, when present
    u32                          CRC32 of everything above
"""
import json
import logging
import struct
import zlib
from dataclasses import dataclass
from typing import Optional

import numpy as np

from core.exceptions import ConfigError, LoadError, TappingError
from network.model import ModelConfig, build
from tapping.dataset import NormStats, atomic_write


logger = logging.getLogger(__name__)

MAGIC = b'TAPT'
FORMAT_VERSION = 1
_U32 = struct.Struct('<I')
_FLOAT = np.dtype('<f8')


@dataclass
class Checkpoint:
    params: object
    config: ModelConfig
    stats: Optional[NormStats] = None


def _canonical_json(data):
    return json.dumps(data, sort_keys=True, separators=(',', ':'))


def encode_checkpoint(params, stats=None):
    header = _canonical_json({
        'config': params.config.to_dict(),
        'normalization': stats is not None,
    }).encode('utf-8')
    chunks = [MAGIC, _U32.pack(FORMAT_VERSION), _U32.pack(len(header)),
              header]
    for _, array in params.named_arrays():
        chunks.append(np.ascontiguousarray(array, dtype=_FLOAT).tobytes())
    if stats is not None:
        chunks.append(np.ascontiguousarray(stats.mean, _FLOAT).tobytes())
        chunks.append(np.ascontiguousarray(stats.std, _FLOAT).tobytes())
    body = b''.join(chunks)
    return body + _U32.pack(zlib.crc32(body) & 0xFFFFFFFF)


def save_checkpoint(params, path, stats=None):
    payload = encode_checkpoint(params, stats)

    def write(tmp):
        with open(tmp, 'wb') as handle:
            handle.write(payload)

    atomic_write(path, write)
    logger.info('Saved checkpoint %s (%d bytes)', path, len(payload))
    return path


def decode_checkpoint(payload):
    """Parse checkpoint bytes; any inconsistency raises LoadError."""
    minimum = len(MAGIC) + 3 * _U32.size
    if len(payload) < minimum:
        raise LoadError('checkpoint is truncated')
    if payload[:4] != MAGIC:
        raise LoadError('not a checkpoint file (bad magic bytes)')
    body, (crc,) = payload[:-4], _U32.unpack(payload[-4:])
    if zlib.crc32(body) & 0xFFFFFFFF != crc:
        raise LoadError('checkpoint is truncated or corrupt (CRC mismatch)')
    (version,) = _U32.unpack_from(body, 4)
    if version != FORMAT_VERSION:
        raise LoadError(
            f'checkpoint format version {version}, expected {FORMAT_VERSION}'
        )
    (header_len,) = _U32.unpack_from(body, 8)
    offset = 12 + header_len
    try:
        header = json.loads(body[12:offset].decode('utf-8'))
        config = ModelConfig.from_dict(header['config']).validate()
        params = build(config)
    except (ValueError, KeyError, TypeError, TappingError) as exc:
        raise LoadError(f'checkpoint header is invalid: {exc}') from exc

    arrays = params.named_arrays()
    expected = sum(a.size for _, a in arrays)
    if header.get('normalization'):
        expected += 2 * config.input_features
    values = np.frombuffer(body, dtype=_FLOAT, offset=offset) \
        if (len(body) - offset) % _FLOAT.itemsize == 0 else None
    if values is None or values.size != expected:
        raise LoadError(
            'checkpoint arrays do not match the shapes its config implies'
        )
    cursor = 0
    for _, array in arrays:
        array[...] = values[cursor:cursor + array.size].reshape(array.shape)
        cursor += array.size
    stats = None
    if header.get('normalization'):
        width = config.input_features
        stats = NormStats(
            values[cursor:cursor + width].copy(),
            values[cursor + width:cursor + 2 * width].copy(),
        )
    return Checkpoint(params, config, stats)


def load_checkpoint(path):
    try:
        with open(path, 'rb') as handle:
            payload = handle.read()
    except OSError as exc:
        raise LoadError(f'cannot read checkpoint {path}: {exc}') from exc
    checkpoint = decode_checkpoint(payload)
    logger.info('Loaded checkpoint %s', path)
    return checkpoint


def check_compatible(config, n_features, expected=None):
    """Refuse data, or an expected architecture, the checkpoint cannot
    serve."""
    if n_features != config.input_features:
        raise ConfigError(
            f'checkpoint expects {config.input_features} features, '
            f'data has {n_features}'
        )
    if expected is not None:
        for name, value in expected.to_dict().items():
            if name == 'seed':
                continue
            if getattr(config, name) != value:
                raise ConfigError(
                    f'checkpoint {name}={getattr(config, name)!r} does not '
                    f'match expected {value!r}'
                )
