"""
Network encodings, Pauli-basis tools and the dataset file format
"""

from .tensors import (
    to_extended_tensor,
    from_extended_tensor,
    to_extended_batch,
    channel_symmetry_error,
    records_to_arrays,
)
from .pauli import (
    PauliIndex,
    PAULI_MATRICES,
    pauli_indices,
    non_identity_indices,
    pauli_label,
    parse_pauli_label,
    pauli_operator,
    pauli_coefficients,
    reconstruct,
    incomplete_density,
    incomplete_batch,
    retained_to_ignored,
    random_retained_subset,
    measurement_count,
)
from .dataset_file import (
    DatasetFormatError,
    MAGIC,
    FORMAT_VERSION,
    HEADER,
    record_dtype,
    encode_dataset,
    decode_dataset,
    write_dataset,
    read_dataset,
    read_gen_spec,
)

__all__ = [
    'to_extended_tensor',
    'from_extended_tensor',
    'to_extended_batch',
    'channel_symmetry_error',
    'records_to_arrays',
    'PauliIndex',
    'PAULI_MATRICES',
    'pauli_indices',
    'non_identity_indices',
    'pauli_label',
    'parse_pauli_label',
    'pauli_operator',
    'pauli_coefficients',
    'reconstruct',
    'incomplete_density',
    'incomplete_batch',
    'retained_to_ignored',
    'random_retained_subset',
    'measurement_count',
    'DatasetFormatError',
    'MAGIC',
    'FORMAT_VERSION',
    'HEADER',
    'record_dtype',
    'encode_dataset',
    'decode_dataset',
    'write_dataset',
    'read_dataset',
    'read_gen_spec',
]
