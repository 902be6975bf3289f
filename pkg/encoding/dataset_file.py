"""
Binary dataset file.

Layout (little-endian): b"XPKY", u16 version, u8 n_qubits, u64 count, then
``count`` packed records (rho as row-major complex128, class u8, eof f64 with
NaN for absent, purity f64, seed u64), then the JSON manifest up to EOF. The
manifest checksum is the SHA-256 of everything before it.
"""
import hashlib
import json
import logging
import struct
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from datagen import GenSpec, LabeledState
from labeling import class_enum
from qcore import DensityMatrix, InvalidDensityMatrixError

logger = logging.getLogger(__name__)

MAGIC = b'XPKY'
FORMAT_VERSION = 1
HEADER = struct.Struct('<4sHBQ')
BASIS_ORDER = 'qubit A most significant; |q_A q_B q_C>; row-major'


class DatasetFormatError(ValueError):
    """Dataset file is corrupt, truncated or of an unsupported version"""


def record_dtype(n_qubits: int) -> np.dtype:
    d = 2 ** n_qubits
    return np.dtype([
        ('rho', '<c16', (d, d)),
        ('label', 'u1'),
        ('eof', '<f8'),
        ('purity', '<f8'),
        ('seed', '<u8'),
    ])


def _pack_records(records: Sequence[LabeledState], n_qubits: int) -> np.ndarray:
    packed = np.zeros(len(records), dtype=record_dtype(n_qubits))
    for i, r in enumerate(records):
        if r.rho.n_qubits != n_qubits:
            raise ValueError(f"Record {i} has {r.rho.n_qubits} qubits, file holds {n_qubits}")
        packed[i] = (r.rho.matrix, int(r.label), np.nan if r.eof is None else r.eof, r.purity, r.seed_used)
    return packed


def encode_dataset(
    records: Sequence[LabeledState],
    spec: Union[GenSpec, Dict],
    extra: Optional[Dict] = None,
    audit: Optional[Dict] = None,
) -> Tuple[bytes, str]:
    """Serialised file contents and their checksum"""
    spec_dict = spec.to_dict() if isinstance(spec, GenSpec) else dict(spec)
    n_qubits = int(spec_dict['n_qubits'])
    body = HEADER.pack(MAGIC, FORMAT_VERSION, n_qubits, len(records)) + \
        _pack_records(records, n_qubits).tobytes()
    checksum = hashlib.sha256(body).hexdigest()
    manifest = {
        'format': 'XPKY',
        'version': FORMAT_VERSION,
        'basis_order': BASIS_ORDER,
        'gen_spec': spec_dict,
        'creation': extra or {},
        'm_used': [int(r.m_used) for r in records],
        'audit': audit or {},
        'checksum': checksum,
    }
    return body + json.dumps(manifest, sort_keys=True, indent=2).encode('utf-8'), checksum


def write_dataset(
    records: Sequence[LabeledState],
    spec: Union[GenSpec, Dict],
    path: Union[str, Path],
    extra: Optional[Dict] = None,
    audit: Optional[Dict] = None,
) -> str:
    """Write records and manifest to ``path``; returns the checksum"""
    data, checksum = encode_dataset(records, spec, extra, audit)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(data)
    logger.info(f"Wrote {len(records)} records to {path} (sha256 {checksum[:12]})")
    return checksum


def decode_dataset(data: bytes, validate: bool = True) -> Tuple[List[LabeledState], Dict]:
    if len(data) < HEADER.size:
        raise DatasetFormatError(f"File truncated: {len(data)} bytes, header needs {HEADER.size}")
    magic, version, n_qubits, count = HEADER.unpack_from(data)
    if magic != MAGIC:
        raise DatasetFormatError(f"Bad magic {magic!r}, expected {MAGIC!r}")
    if version != FORMAT_VERSION:
        raise DatasetFormatError(f"Unsupported dataset version {version} (reader handles {FORMAT_VERSION})")
    if n_qubits not in (2, 3):
        raise DatasetFormatError(f"Unsupported qubit count {n_qubits}")

    dtype = record_dtype(n_qubits)
    end = HEADER.size + count * dtype.itemsize
    if len(data) < end:
        raise DatasetFormatError(f"File truncated: {count} records need {end} bytes, found {len(data)}")
    try:
        manifest = json.loads(data[end:].decode('utf-8'))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise DatasetFormatError(f"Manifest unreadable: {e}")
    checksum = hashlib.sha256(data[:end]).hexdigest()
    if manifest.get('checksum') != checksum:
        raise DatasetFormatError(f"Checksum mismatch: manifest {manifest.get('checksum')}, data {checksum}")

    packed = np.frombuffer(data, dtype=dtype, count=count, offset=HEADER.size)
    m_used = manifest.get('m_used') or [1] * count
    classes = class_enum(n_qubits)
    records = []
    for i, row in enumerate(packed):
        try:
            rho = DensityMatrix.from_matrix(np.array(row['rho']), validate=validate)
        except InvalidDensityMatrixError as e:
            raise DatasetFormatError(f"Record {i} is not a density matrix: {e}")
        eof = float(row['eof'])
        records.append(LabeledState(
            rho=rho,
            label=classes(int(row['label'])),
            eof=None if np.isnan(eof) else eof,
            purity=float(row['purity']),
            m_used=int(m_used[i]),
            seed_used=int(row['seed']),
        ))
    return records, manifest


def read_dataset(path: Union[str, Path], validate: bool = True) -> Tuple[List[LabeledState], Dict]:
    """Records and manifest; raises DatasetFormatError on any integrity failure"""
    path = Path(path)
    records, manifest = decode_dataset(path.read_bytes(), validate=validate)
    logger.info(f"Read {len(records)} records from {path}")
    return records, manifest


def read_gen_spec(manifest: Dict) -> GenSpec:
    return GenSpec.from_dict(manifest['gen_spec'])
