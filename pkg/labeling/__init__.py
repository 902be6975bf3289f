"""
Entanglement measures and labels for XpookyNet datasets
"""

from .entanglement import (
    EOF_THRESHOLD,
    PT_THRESHOLD,
    CUTS,
    TwoQubitClass,
    ThreeQubitClass,
    StateClass,
    EntanglementReport,
    class_enum,
    class_names,
    concurrence_two_qubit,
    eof_two_qubit,
    eof_from_concurrence,
    floored_sqrt,
    label_two_qubit,
    label_from_eof,
    negativity,
    min_pt_eigenvalue,
    is_npt,
    entanglement_report,
)

__all__ = [
    'EOF_THRESHOLD',
    'PT_THRESHOLD',
    'CUTS',
    'TwoQubitClass',
    'ThreeQubitClass',
    'StateClass',
    'EntanglementReport',
    'class_enum',
    'class_names',
    'concurrence_two_qubit',
    'eof_two_qubit',
    'eof_from_concurrence',
    'floored_sqrt',
    'label_two_qubit',
    'label_from_eof',
    'negativity',
    'min_pt_eigenvalue',
    'is_npt',
    'entanglement_report',
]
