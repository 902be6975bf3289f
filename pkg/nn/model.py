"""
Model specifications, the XpookyNet variant family and the flat-parameter model
"""
import hashlib
import json
import logging
from dataclasses import asdict, dataclass
from enum import Enum
from typing import ClassVar, Dict, List, Optional, Tuple, Union

import numpy as np

from .layers import (
    BN_EPS,
    BN_MOMENTUM,
    LEAKY_SLOPE,
    BatchNorm,
    Branch,
    Conv2D,
    Dense,
    Flatten,
    Layer,
    LeakyReLU,
    SeparableConv2D,
    ShapeMismatchError,
    Sigmoid,
    Softmax,
)
from .losses import LossKind, compute_loss

logger = logging.getLogger(__name__)


class Variant(str, Enum):
    NN = 'nn'
    SIMPLE = 'simple'
    BRCH = 'brch'
    BNSEP = 'bnsep'
    BRCH_BNSEP = 'brch-bnsep'


class Task(str, Enum):
    CLASSIFY = 'classify'
    BINARY = 'binary'
    REGRESS = 'regress'


class Head(str, Enum):
    SOFTMAX = 'softmax'
    SIGMOID = 'sigmoid'
    LINEAR = 'linear'


HEAD_LOSS = {Head.SOFTMAX: LossKind.CCE, Head.SIGMOID: LossKind.BCE, Head.LINEAR: LossKind.MSE}


@dataclass
class ConvSpec:
    kind: ClassVar[str] = 'conv'
    filters: int
    kernel: Tuple[int, int]


@dataclass
class SepConvSpec:
    kind: ClassVar[str] = 'sepconv'
    filters: int
    kernel: Tuple[int, int]


@dataclass
class BatchNormSpec:
    kind: ClassVar[str] = 'batchnorm'
    eps: float = BN_EPS
    momentum: float = BN_MOMENTUM


@dataclass
class LeakyReLUSpec:
    kind: ClassVar[str] = 'leakyrelu'
    a: float = LEAKY_SLOPE


@dataclass
class FlattenSpec:
    kind: ClassVar[str] = 'flatten'


@dataclass
class DenseSpec:
    kind: ClassVar[str] = 'dense'
    units: int


@dataclass
class BranchSpec:
    kind: ClassVar[str] = 'branch'
    stacks: List[List["LayerSpec"]]


LayerSpec = Union[ConvSpec, SepConvSpec, BatchNormSpec, LeakyReLUSpec, FlattenSpec, DenseSpec, BranchSpec]
LAYER_SPECS = {cls.kind: cls for cls in
               (ConvSpec, SepConvSpec, BatchNormSpec, LeakyReLUSpec, FlattenSpec, DenseSpec, BranchSpec)}


def layer_to_dict(spec: LayerSpec) -> Dict:
    if isinstance(spec, BranchSpec):
        return {'kind': spec.kind, 'stacks': [[layer_to_dict(s) for s in stack] for stack in spec.stacks]}
    d = {'kind': spec.kind, **asdict(spec)}
    if 'kernel' in d:
        d['kernel'] = list(d['kernel'])
    return d


def layer_from_dict(d: Dict) -> LayerSpec:
    d = dict(d)
    kind = d.pop('kind')
    if kind not in LAYER_SPECS:
        raise ValueError(f"Unknown layer kind '{kind}'")
    if kind == 'branch':
        return BranchSpec([[layer_from_dict(s) for s in stack] for stack in d['stacks']])
    if 'kernel' in d:
        d['kernel'] = tuple(d['kernel'])
    return LAYER_SPECS[kind](**d)


def build_layer(spec: LayerSpec) -> Layer:
    if isinstance(spec, ConvSpec):
        return Conv2D(spec.filters, spec.kernel)
    if isinstance(spec, SepConvSpec):
        return SeparableConv2D(spec.filters, spec.kernel)
    if isinstance(spec, BatchNormSpec):
        return BatchNorm(spec.eps, spec.momentum)
    if isinstance(spec, LeakyReLUSpec):
        return LeakyReLU(spec.a)
    if isinstance(spec, FlattenSpec):
        return Flatten()
    if isinstance(spec, DenseSpec):
        return Dense(spec.units)
    if isinstance(spec, BranchSpec):
        return Branch([[build_layer(s) for s in stack] for stack in spec.stacks])
    raise ValueError(f"Unknown layer spec {spec!r}")


@dataclass
class ModelSpec:
    input_shape: Tuple[int, int, int]
    layers: List[LayerSpec]
    head: Head
    variant: str = 'custom'
    task: Task = Task.CLASSIFY

    def __post_init__(self):
        self.input_shape = tuple(int(v) for v in self.input_shape)
        self.head = Head(self.head)
        self.task = Task(self.task)

    @property
    def loss(self) -> LossKind:
        return HEAD_LOSS[self.head]

    @property
    def n_qubits(self) -> int:
        return int(np.log2(self.input_shape[0]))

    def to_dict(self) -> Dict:
        return {
            'input_shape': list(self.input_shape),
            'layers': [layer_to_dict(s) for s in self.layers],
            'head': self.head.value,
            'variant': self.variant,
            'task': self.task.value,
        }

    @classmethod
    def from_dict(cls, d: Dict) -> "ModelSpec":
        return cls(
            input_shape=tuple(d['input_shape']),
            layers=[layer_from_dict(s) for s in d['layers']],
            head=d['head'],
            variant=d.get('variant', 'custom'),
            task=d.get('task', Task.CLASSIFY.value),
        )


# unpadded stride-1 kernels; a 4x4 map admits only three shrinking layers
SIMPLE_KERNELS = {
    2: (2, 1, 2, 1, 1, 1, 1, 1, 1, 1),
    3: (4, 2, 1, 2, 1, 1, 1, 1, 1, 1),
}
SIMPLE_FILTERS = (16, 16, 16, 32, 32, 32, 64, 64, 64, 64)

# principal artery: four layers before the branches, four after
ARTERY_KERNELS = {
    2: ((2, 1, 1, 1), (1, 1, 1, 1)),
    3: ((4, 1, 1, 1), (2, 1, 1, 1)),
}
ARTERY_FILTERS = ((16, 16, 32, 32), (64, 64, 64, 64))
# every branch shrinks the map by the same amount so the outputs concatenate
BRANCH_KERNELS = {
    2: (((2, 2), (1, 1)), ((1, 1), (2, 2)), ((2, 1), (1, 2))),
    3: (((3, 3), (1, 1)), ((2, 2), (2, 2)), ((1, 1), (3, 3))),
}
BRANCH_FILTERS = 32
DENSE_UNITS = 64
NN_UNITS = (128, 64)


def _kernel(k) -> Tuple[int, int]:
    return (k, k) if isinstance(k, int) else tuple(k)


def _conv_block(filters: int, kernel, separable: bool, first: bool) -> List[LayerSpec]:
    if separable and not first:
        return [SepConvSpec(filters, _kernel(kernel)), BatchNormSpec(), LeakyReLUSpec()]
    if separable:
        return [ConvSpec(filters, _kernel(kernel)), BatchNormSpec(), LeakyReLUSpec()]
    return [ConvSpec(filters, _kernel(kernel)), LeakyReLUSpec()]


def _head(task: Task, n_qubits: int) -> Tuple[int, Head]:
    if task is Task.CLASSIFY:
        return (2 if n_qubits == 2 else 5), Head.SOFTMAX
    if task is Task.BINARY:
        if n_qubits != 2:
            raise ValueError("The binary sigmoid head is defined for two-qubit data only")
        return 1, Head.SIGMOID
    if n_qubits != 2:
        raise ValueError("EoF regression is defined for two-qubit data only")
    return 1, Head.LINEAR


def build_model(variant, n_qubits: int, task=Task.CLASSIFY) -> ModelSpec:
    """ModelSpec of one XpookyNet variant for 2^N x 2^N x 2 inputs"""
    try:
        variant = Variant(variant)
    except ValueError:
        raise ValueError(f"Unknown variant '{variant}', expected one of {[v.value for v in Variant]}")
    task = Task(task)
    if n_qubits not in (2, 3):
        raise ValueError(f"Models are defined for 2 or 3 qubits, got {n_qubits}")
    outputs, head = _head(task, n_qubits)
    dim = 2 ** n_qubits
    separable = variant in (Variant.BNSEP, Variant.BRCH_BNSEP)
    layers: List[LayerSpec] = []

    if variant is Variant.NN:
        layers.append(FlattenSpec())
        for units in NN_UNITS:
            layers += [DenseSpec(units), LeakyReLUSpec()]
    elif variant in (Variant.SIMPLE, Variant.BNSEP):
        for i, (k, f) in enumerate(zip(SIMPLE_KERNELS[n_qubits], SIMPLE_FILTERS)):
            layers += _conv_block(f, k, separable, first=i == 0)
        layers += [FlattenSpec(), DenseSpec(DENSE_UNITS), LeakyReLUSpec()]
    else:
        before, after = ARTERY_KERNELS[n_qubits]
        for i, (k, f) in enumerate(zip(before, ARTERY_FILTERS[0])):
            layers += _conv_block(f, k, separable, first=i == 0)
        stacks = []
        for kernels in BRANCH_KERNELS[n_qubits]:
            stack = []
            for k in kernels:
                stack += _conv_block(BRANCH_FILTERS, k, separable, first=False)
            stacks.append(stack)
        layers.append(BranchSpec(stacks))
        for k, f in zip(after, ARTERY_FILTERS[1]):
            layers += _conv_block(f, k, separable, first=False)
        layers += [FlattenSpec(), DenseSpec(DENSE_UNITS), LeakyReLUSpec()]

    layers.append(DenseSpec(outputs))
    spec = ModelSpec((dim, dim, 2), layers, head, variant.value, task)
    check_shapes(spec)
    return spec


def _head_layer(head: Head) -> Optional[Layer]:
    if head is Head.SOFTMAX:
        return Softmax()
    if head is Head.SIGMOID:
        return Sigmoid()
    return None


def _chain(spec: ModelSpec) -> List[Layer]:
    layers = [build_layer(s) for s in spec.layers]
    head = _head_layer(spec.head)
    if head is not None:
        layers.append(head)
    shape = spec.input_shape
    for layer in layers:
        shape = layer.build(shape)
    if len(shape) != 1:
        raise ShapeMismatchError(f"Network must end on a flat output, got {shape}")
    return layers


def check_shapes(spec: ModelSpec) -> Tuple[int, ...]:
    """Static shape chaining; returns the output shape"""
    return _chain(spec)[-1].output_shape


def count_conv_layers(spec: ModelSpec) -> int:
    return sum(layer.conv_layers for layer in _chain(spec))


def parameter_count(spec: ModelSpec) -> int:
    return sum(int(np.prod(s)) for layer in _chain(spec) for s in layer.param_shapes())


class Model:
    """Layer chain over one flat parameter vector; each layer holds views into it"""

    def __init__(self, spec: ModelSpec, seed: int = 0):
        self.spec = spec
        self.layers = _chain(spec)
        shapes = [(layer, layer.param_shapes()) for layer in self.layers]
        total = sum(int(np.prod(s)) for _, layer_shapes in shapes for s in layer_shapes)
        self.params = np.zeros(total)
        self.grads = np.zeros(total)
        self.trained = False

        offset = 0
        for layer, layer_shapes in shapes:
            p_views, g_views = [], []
            for s in layer_shapes:
                size = int(np.prod(s))
                p_views.append(self.params[offset:offset + size].reshape(s))
                g_views.append(self.grads[offset:offset + size].reshape(s))
                offset += size
            layer.bind(p_views, g_views)

        rng = np.random.default_rng(seed)
        for layer in self.layers:
            layer.initialize(rng)
        logger.debug(f"Model '{spec.variant}' built with {total} parameters")

    @property
    def input_shape(self) -> Tuple[int, int, int]:
        return self.spec.input_shape

    @property
    def output_size(self) -> int:
        return self.layers[-1].output_shape[0]

    @property
    def conv_layers(self) -> int:
        return sum(layer.conv_layers for layer in self.layers)

    @property
    def dense_layers(self) -> List[Dense]:
        return [layer for layer in self.layers if isinstance(layer, Dense)]

    def load_parameters(self, values: np.ndarray) -> None:
        values = np.asarray(values, dtype=np.float64)
        if values.shape != self.params.shape:
            raise ShapeMismatchError(
                f"Parameter vector has {values.size} entries, model '{self.spec.variant}' needs {self.params.size}"
            )
        self.params[...] = values

    def check_batch(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if x.ndim == len(self.input_shape):
            x = x[None]
        if x.shape[1:] != self.input_shape:
            raise ShapeMismatchError(f"Model expects inputs of shape {self.input_shape}, got {x.shape[1:]}")
        return x

    def forward(self, x: np.ndarray, train: bool = False) -> np.ndarray:
        y = self.check_batch(x)
        for layer in self.layers:
            y = layer.forward(y, train)
        return y

    def backward(self, dy: np.ndarray) -> np.ndarray:
        for layer in reversed(self.layers):
            dy = layer.backward(dy)
        return dy

    def loss_and_grad(self, x: np.ndarray, targets: np.ndarray, train: bool = True) -> Tuple[float, np.ndarray]:
        """Forward, loss and backward; gradients land in ``self.grads``. Returns (loss, outputs)"""
        predictions = self.forward(x, train=train)
        loss, dy = compute_loss(self.spec.loss, predictions, targets)
        self.backward(dy)
        return loss, predictions

    def predict(self, x: np.ndarray, batch_size: int = 1024) -> np.ndarray:
        """Class probabilities, or EoF estimates clamped to [0, 1] for the linear head"""
        x = self.check_batch(x)
        out = np.concatenate([self.forward(x[i:i + batch_size]) for i in range(0, len(x), batch_size)]) \
            if len(x) else np.zeros((0, self.output_size))
        if self.spec.head is Head.LINEAR:
            return np.clip(out[:, 0], 0.0, 1.0)
        return out

    def predict_classes(self, x: np.ndarray) -> np.ndarray:
        out = self.predict(x)
        if self.spec.head is Head.SIGMOID:
            return (out[:, 0] > 0.5).astype(np.int64)
        if self.spec.head is Head.LINEAR:
            raise ValueError("A regression model does not predict classes")
        return np.argmax(out, axis=1)

    def checksum(self) -> str:
        digest = hashlib.sha256(json.dumps(self.spec.to_dict(), sort_keys=True).encode('utf-8'))
        digest.update(self.params.astype('<f8').tobytes())
        return digest.hexdigest()
