"""
Deterministic numpy network engine and the XpookyNet model family
"""

from .layers import (
    ShapeMismatchError,
    Layer,
    Conv2D,
    SeparableConv2D,
    BatchNorm,
    LeakyReLU,
    Flatten,
    Dense,
    Softmax,
    Sigmoid,
    Branch,
)
from .losses import LossKind, compute_loss, one_hot
from .optim import SGD, PlateauScheduler, sgd_step, plateau_update
from .model import (
    Variant,
    Task,
    Head,
    ConvSpec,
    SepConvSpec,
    BatchNormSpec,
    LeakyReLUSpec,
    FlattenSpec,
    DenseSpec,
    BranchSpec,
    ModelSpec,
    Model,
    build_model,
    check_shapes,
    count_conv_layers,
    parameter_count,
)
from .training import TrainConfig, TrainResult, HISTORY_COLUMNS, prepare_targets, train, predict
from .checkpoint import CheckpointFormatError, save_checkpoint, load_checkpoint

__all__ = [
    'ShapeMismatchError',
    'Layer',
    'Conv2D',
    'SeparableConv2D',
    'BatchNorm',
    'LeakyReLU',
    'Flatten',
    'Dense',
    'Softmax',
    'Sigmoid',
    'Branch',
    'LossKind',
    'compute_loss',
    'one_hot',
    'SGD',
    'PlateauScheduler',
    'sgd_step',
    'plateau_update',
    'Variant',
    'Task',
    'Head',
    'ConvSpec',
    'SepConvSpec',
    'BatchNormSpec',
    'LeakyReLUSpec',
    'FlattenSpec',
    'DenseSpec',
    'BranchSpec',
    'ModelSpec',
    'Model',
    'build_model',
    'check_shapes',
    'count_conv_layers',
    'parameter_count',
    'TrainConfig',
    'TrainResult',
    'HISTORY_COLUMNS',
    'prepare_targets',
    'train',
    'predict',
    'CheckpointFormatError',
    'save_checkpoint',
    'load_checkpoint',
]
