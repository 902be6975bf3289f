"""
Balanced dataset assembly and the post-build construction audit
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from math import comb
from typing import Dict, List, Optional

import numpy as np

from labeling import ThreeQubitClass, TwoQubitClass, min_pt_eigenvalue
from qcore import density_violations, purity

from .generator import (
    GenSpec,
    LabeledState,
    RetryBudgetExceeded,
    TwoQubitSource,
    generate_class,
    generate_random_two_qubit,
)

logger = logging.getLogger(__name__)

AUDIT_PSD_TOL = -1e-10
AUDIT_NPT_TOL = -1e-9
PURITY_FIELD_TOL = 1e-10

# separable cut checked PT-positive, entangled cut checked NPT
PARTIAL_CUTS = {
    ThreeQubitClass.AB_C: ('C|AB', 'A|BC'),
    ThreeQubitClass.A_BC: ('A|BC', 'C|AB'),
    ThreeQubitClass.AC_B: ('B|AC', 'A|BC'),
}
ALL_CUTS = ('A|BC', 'B|AC', 'C|AB')


class ConstructionAuditError(RuntimeError):
    """Sampled records contradict their class construction"""


@dataclass
class Dataset:
    spec: GenSpec
    records: List[LabeledState]
    audit: Dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.records)

    def class_counts(self) -> Dict[int, int]:
        counts = {int(c): 0 for c in self.spec.classes()}
        for record in self.records:
            counts[int(record.label)] += 1
        return counts


def partition_count(n_qubits: int) -> int:
    """Number of entangled partition classes: sum_{i=2}^{N} C(N, i)"""
    if n_qubits < 2:
        raise ValueError(f"partition_count needs at least 2 qubits, got {n_qubits}")
    return sum(comb(n_qubits, i) for i in range(2, n_qubits + 1))


def derive_seed(seed: int, index: int) -> int:
    state = np.random.SeedSequence([int(seed), int(index)]).generate_state(1, dtype=np.uint64)
    return int(state[0])


def _record_job(spec: GenSpec, state_class, index: int) -> LabeledState:
    seed_used = derive_seed(spec.seed, index)
    rng = np.random.default_rng(seed_used)
    return generate_class(state_class, spec, rng, seed_used=seed_used)


def _random_source_records(spec: GenSpec) -> List[LabeledState]:
    buckets = {TwoQubitClass.SEP: [], TwoQubitClass.ENT: []}
    drawn = {TwoQubitClass.SEP: 0, TwoQubitClass.ENT: 0}
    index = 0
    limit = spec.retry_budget * spec.count_per_class * 2
    while min(len(b) for b in buckets.values()) < spec.count_per_class:
        if index >= limit:
            raise RetryBudgetExceeded(
                f"Random two-qubit source filled {{Sep: {len(buckets[TwoQubitClass.SEP])}, "
                f"Ent: {len(buckets[TwoQubitClass.ENT])}}} of {spec.count_per_class} in {limit} draws"
            )
        seed_used = derive_seed(spec.seed, index)
        record = generate_random_two_qubit(spec, np.random.default_rng(seed_used), seed_used)
        index += 1
        drawn[record.label] += 1
        if len(buckets[record.label]) < spec.count_per_class:
            buckets[record.label].append(record)
    logger.info(
        f"Random source drew {drawn[TwoQubitClass.ENT]} Ent and {drawn[TwoQubitClass.SEP]} Sep states"
    )
    return buckets[TwoQubitClass.SEP] + buckets[TwoQubitClass.ENT]


def build_dataset(spec: GenSpec, workers: int = 1, audit: bool = True) -> Dataset:
    """Generate ``count_per_class`` records per class and shuffle them from ``spec.seed``.

    Record ``i`` draws from its own stream seeded by (spec.seed, i), so the output
    does not depend on ``workers``.
    """
    if spec.n_qubits == 2 and spec.two_qubit_source is TwoQubitSource.RANDOM:
        records = _random_source_records(spec)
    else:
        jobs = [
            (state_class, k * spec.count_per_class + j)
            for k, state_class in enumerate(spec.classes())
            for j in range(spec.count_per_class)
        ]
        logger.info(
            f"Generating {len(jobs)} {spec.n_qubits}-qubit records with {workers} worker(s)"
        )
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as executor:
                records = list(executor.map(lambda job: _record_job(spec, *job), jobs))
        else:
            records = [_record_job(spec, state_class, index) for state_class, index in jobs]

    order = np.random.default_rng(spec.seed).permutation(len(records))
    dataset = Dataset(spec, [records[i] for i in order])
    if audit:
        dataset.audit = audit_dataset(dataset, spec.audit_samples)
    logger.info(f"Dataset ready: {len(dataset)} records, class counts {dataset.class_counts()}")
    return dataset


def record_violations(record: LabeledState, n_qubits: int) -> List[str]:
    """Construction-soundness problems of a single record (empty when sound)"""
    m = record.rho.matrix
    problems = list(density_violations(m))
    if abs(purity(m) - record.purity) > PURITY_FIELD_TOL:
        problems.append(f"stored purity {record.purity} differs from {purity(m)}")

    if n_qubits == 2:
        if record.eof is None:
            problems.append("two-qubit record without EoF")
        lowest = min_pt_eigenvalue(m, 'A|B')
        if record.label == TwoQubitClass.ENT and lowest >= AUDIT_NPT_TOL:
            problems.append("Ent record has a PSD partial transpose")
        elif record.label == TwoQubitClass.SEP and lowest < AUDIT_PSD_TOL:
            problems.append("Sep record is NPT across A|B")
        return problems

    label = ThreeQubitClass(record.label)
    if label is ThreeQubitClass.SEP:
        for cut in ALL_CUTS:
            if min_pt_eigenvalue(m, cut) < AUDIT_PSD_TOL:
                problems.append(f"Sep record is NPT across {cut}")
    elif label is ThreeQubitClass.ABC:
        for cut in ALL_CUTS:
            if min_pt_eigenvalue(m, cut) >= AUDIT_NPT_TOL:
                problems.append(f"ABC record is PPT across {cut}")
    else:
        separable, entangled = PARTIAL_CUTS[label]
        if min_pt_eigenvalue(m, separable) < AUDIT_PSD_TOL:
            problems.append(f"{label.label} record is NPT across {separable}")
        if min_pt_eigenvalue(m, entangled) >= AUDIT_NPT_TOL:
            problems.append(f"{label.label} record is PPT across {entangled}")
    return problems


def audit_dataset(dataset: Dataset, samples: Optional[int] = None, raise_on_failure: bool = True) -> Dict:
    """Recheck class construction on a deterministic sample of records"""
    samples = dataset.spec.audit_samples if samples is None else samples
    n = min(samples, len(dataset.records))
    picks = np.random.default_rng(dataset.spec.seed ^ 0xA5A5).choice(len(dataset.records), n, replace=False) \
        if n else np.array([], dtype=int)

    violations = []
    for i in picks:
        for problem in record_violations(dataset.records[int(i)], dataset.spec.n_qubits):
            violations.append({'index': int(i), 'problem': problem})

    result = {'samples': int(n), 'violations': violations}
    if violations:
        logger.error(f"Construction audit found {len(violations)} violation(s) in {n} samples")
        if raise_on_failure:
            raise ConstructionAuditError(f"{violations[0]['problem']} (record {violations[0]['index']})")
    else:
        logger.info(f"Construction audit passed on {n} samples")
    return result
