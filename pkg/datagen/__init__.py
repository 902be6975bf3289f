"""
Labelled two- and three-qubit dataset generation
"""

from labeling import StateClass, TwoQubitClass, ThreeQubitClass

from .special_states import SpecialKind, ghz_state, w_state, graph_state, special_state
from .generator import (
    GenSpec,
    GeneratorMode,
    TwoQubitSource,
    LabeledState,
    RetryBudgetExceeded,
    DEFAULT_PURITY_TARGETS,
    random_pure_state,
    random_density_matrix,
    haar_unitary,
    draw_weights,
    mix_to_purity,
    interleave_ac_b,
    generate_class,
    generate_random_two_qubit,
    nonzero_fraction,
)
from .dataset import (
    Dataset,
    ConstructionAuditError,
    partition_count,
    derive_seed,
    build_dataset,
    audit_dataset,
    record_violations,
)

__all__ = [
    'StateClass',
    'TwoQubitClass',
    'ThreeQubitClass',
    'SpecialKind',
    'ghz_state',
    'w_state',
    'graph_state',
    'special_state',
    'GenSpec',
    'GeneratorMode',
    'TwoQubitSource',
    'LabeledState',
    'RetryBudgetExceeded',
    'DEFAULT_PURITY_TARGETS',
    'random_pure_state',
    'random_density_matrix',
    'haar_unitary',
    'draw_weights',
    'mix_to_purity',
    'interleave_ac_b',
    'generate_class',
    'generate_random_two_qubit',
    'nonzero_fraction',
    'Dataset',
    'ConstructionAuditError',
    'partition_count',
    'derive_seed',
    'build_dataset',
    'audit_dataset',
    'record_violations',
]
