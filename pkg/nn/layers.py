"""
Layer kinds of the network engine.

Tensors are NHWC float64 arrays (batch, height, width, channels); dense layers
take (batch, features). Parameters are not owned by the layers: ``bind`` hands
each layer views into the model's flat parameter and gradient vectors, and
``backward`` writes into the gradient views.
"""
import logging
from typing import List, Optional, Sequence, Tuple

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

logger = logging.getLogger(__name__)

Shape = Tuple[int, ...]

BN_EPS = 1e-5
BN_MOMENTUM = 0.9
LEAKY_SLOPE = 0.01


class ShapeMismatchError(ValueError):
    """Tensor shape does not match what a layer or model expects"""


def _windows(x: np.ndarray, kh: int, kw: int) -> np.ndarray:
    # (B, H', W', C, kh, kw)
    return sliding_window_view(x, (kh, kw), axis=(1, 2))


def _fan_in_uniform(rng: np.random.Generator, shape: Shape, fan_in: int) -> np.ndarray:
    limit = np.sqrt(6.0 / fan_in)
    return rng.uniform(-limit, limit, size=shape)


class Layer:
    kind = 'layer'

    def __init__(self):
        self.input_shape: Optional[Shape] = None
        self.output_shape: Optional[Shape] = None
        self.params: List[np.ndarray] = []
        self.grads: List[np.ndarray] = []
        self._cache = None

    @property
    def conv_layers(self) -> int:
        return 0

    def build(self, input_shape: Shape) -> Shape:
        """Record the per-sample input shape and return the output shape"""
        self.input_shape = tuple(input_shape)
        self.output_shape = self._output_shape(self.input_shape)
        return self.output_shape

    def _output_shape(self, input_shape: Shape) -> Shape:
        return input_shape

    def param_shapes(self) -> List[Shape]:
        return []

    def bind(self, params: Sequence[np.ndarray], grads: Sequence[np.ndarray]) -> None:
        self.params = list(params)
        self.grads = list(grads)

    def initialize(self, rng: np.random.Generator) -> None:
        pass

    def check_input(self, x: np.ndarray) -> None:
        if x.shape[1:] != self.input_shape:
            raise ShapeMismatchError(
                f"{self.kind} expects per-sample shape {self.input_shape}, got {x.shape[1:]}"
            )

    def forward(self, x: np.ndarray, train: bool = False) -> np.ndarray:
        raise NotImplementedError

    def backward(self, dy: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _cached(self):
        if self._cache is None:
            raise RuntimeError(f"{self.kind}.backward called without a cached forward pass")
        return self._cache


class Conv2D(Layer):
    """Valid, stride-1 cross-correlation summed over input channels"""
    kind = 'conv'

    def __init__(self, filters: int, kernel: Tuple[int, int]):
        super().__init__()
        self.filters = int(filters)
        self.kernel = (int(kernel[0]), int(kernel[1]))

    @property
    def conv_layers(self) -> int:
        return 1

    def _output_shape(self, input_shape):
        if len(input_shape) != 3:
            raise ShapeMismatchError(f"{self.kind} needs an (h, w, c) input, got {input_shape}")
        h, w, _ = input_shape
        kh, kw = self.kernel
        if kh > h or kw > w:
            raise ShapeMismatchError(f"{kh}x{kw} kernel does not fit a {h}x{w} map")
        return (h - kh + 1, w - kw + 1, self.filters)

    def param_shapes(self):
        kh, kw = self.kernel
        return [(kh, kw, self.input_shape[2], self.filters), (self.filters,)]

    def initialize(self, rng):
        kh, kw = self.kernel
        self.params[0][...] = _fan_in_uniform(rng, self.params[0].shape, kh * kw * self.input_shape[2])
        self.params[1][...] = 0.0

    def forward(self, x, train=False):
        self.check_input(x)
        w, b = self.params
        windows = _windows(x, *self.kernel)
        self._cache = windows
        return np.einsum('bhwcpq,pqcf->bhwf', windows, w) + b

    def backward(self, dy):
        windows = self._cached()
        w, _ = self.params
        self.grads[0][...] = np.einsum('bhwcpq,bhwf->pqcf', windows, dy)
        self.grads[1][...] = dy.sum(axis=(0, 1, 2))
        dx = np.zeros((dy.shape[0],) + self.input_shape)
        oh, ow = dy.shape[1], dy.shape[2]
        for p in range(self.kernel[0]):
            for q in range(self.kernel[1]):
                dx[:, p:p + oh, q:q + ow, :] += dy @ w[p, q].T
        return dx


class SeparableConv2D(Conv2D):
    """Depthwise spatial kernel per channel, then a 1x1 pointwise mix"""
    kind = 'sepconv'

    def param_shapes(self):
        kh, kw = self.kernel
        c = self.input_shape[2]
        return [(kh, kw, c), (c, self.filters), (self.filters,)]

    def initialize(self, rng):
        kh, kw = self.kernel
        c = self.input_shape[2]
        self.params[0][...] = _fan_in_uniform(rng, self.params[0].shape, kh * kw)
        self.params[1][...] = _fan_in_uniform(rng, self.params[1].shape, c)
        self.params[2][...] = 0.0

    def forward(self, x, train=False):
        self.check_input(x)
        depthwise, pointwise, b = self.params
        windows = _windows(x, *self.kernel)
        d = np.einsum('bhwcpq,pqc->bhwc', windows, depthwise)
        self._cache = (windows, d)
        return d @ pointwise + b

    def backward(self, dy):
        windows, d = self._cached()
        depthwise, pointwise, _ = self.params
        self.grads[1][...] = np.einsum('bhwc,bhwf->cf', d, dy)
        self.grads[2][...] = dy.sum(axis=(0, 1, 2))
        dd = dy @ pointwise.T
        self.grads[0][...] = np.einsum('bhwcpq,bhwc->pqc', windows, dd)
        dx = np.zeros((dy.shape[0],) + self.input_shape)
        oh, ow = dy.shape[1], dy.shape[2]
        for p in range(self.kernel[0]):
            for q in range(self.kernel[1]):
                dx[:, p:p + oh, q:q + ow, :] += dd * depthwise[p, q]
        return dx


class BatchNorm(Layer):
    """Per-channel normalisation over every axis but the last.

    Parameters: scale, shift, running mean, running variance. The running
    statistics live in the parameter vector but never receive gradient.
    """
    kind = 'batchnorm'

    def __init__(self, eps: float = BN_EPS, momentum: float = BN_MOMENTUM):
        super().__init__()
        self.eps = float(eps)
        self.momentum = float(momentum)

    def param_shapes(self):
        c = (self.input_shape[-1],)
        return [c, c, c, c]

    def initialize(self, rng):
        gamma, beta, mean, var = self.params
        gamma[...] = 1.0
        beta[...] = 0.0
        mean[...] = 0.0
        var[...] = 1.0

    def forward(self, x, train=False):
        self.check_input(x)
        gamma, beta, running_mean, running_var = self.params
        axes = tuple(range(x.ndim - 1))
        if train:
            mean = x.mean(axis=axes)
            var = x.var(axis=axes)
            running_mean[...] = self.momentum * running_mean + (1.0 - self.momentum) * mean
            running_var[...] = self.momentum * running_var + (1.0 - self.momentum) * var
        else:
            mean, var = running_mean.copy(), running_var.copy()
        inv_std = 1.0 / np.sqrt(var + self.eps)
        x_hat = (x - mean) * inv_std
        self._cache = (x_hat, inv_std, train)
        return gamma * x_hat + beta

    def backward(self, dy):
        x_hat, inv_std, train = self._cached()
        gamma = self.params[0]
        axes = tuple(range(dy.ndim - 1))
        self.grads[0][...] = np.sum(dy * x_hat, axis=axes)
        self.grads[1][...] = np.sum(dy, axis=axes)
        self.grads[2][...] = 0.0
        self.grads[3][...] = 0.0
        dx_hat = dy * gamma
        if not train:
            return dx_hat * inv_std
        n = dy.size // dy.shape[-1]
        return inv_std / n * (
            n * dx_hat - dx_hat.sum(axis=axes) - x_hat * np.sum(dx_hat * x_hat, axis=axes)
        )


class LeakyReLU(Layer):
    kind = 'leakyrelu'

    def __init__(self, a: float = LEAKY_SLOPE):
        super().__init__()
        self.a = float(a)

    def forward(self, x, train=False):
        self.check_input(x)
        self._cache = x < 0.0
        return np.where(self._cache, self.a * x, x)

    def backward(self, dy):
        negative = self._cached()
        return np.where(negative, self.a * dy, dy)


class Flatten(Layer):
    kind = 'flatten'

    def _output_shape(self, input_shape):
        return (int(np.prod(input_shape)),)

    def forward(self, x, train=False):
        self.check_input(x)
        self._cache = True
        return x.reshape(x.shape[0], -1)

    def backward(self, dy):
        self._cached()
        return dy.reshape((dy.shape[0],) + self.input_shape)


class Dense(Layer):
    kind = 'dense'

    def __init__(self, units: int):
        super().__init__()
        self.units = int(units)

    def _output_shape(self, input_shape):
        if len(input_shape) != 1:
            raise ShapeMismatchError(f"dense needs a flat input, got {input_shape}")
        return (self.units,)

    def param_shapes(self):
        return [(self.input_shape[0], self.units), (self.units,)]

    def initialize(self, rng):
        self.params[0][...] = _fan_in_uniform(rng, self.params[0].shape, self.input_shape[0])
        self.params[1][...] = 0.0

    def forward(self, x, train=False):
        self.check_input(x)
        self._cache = x
        w, b = self.params
        return x @ w + b

    def backward(self, dy):
        x = self._cached()
        w, _ = self.params
        self.grads[0][...] = x.T @ dy
        self.grads[1][...] = dy.sum(axis=0)
        return dy @ w.T


class Softmax(Layer):
    kind = 'softmax'

    def forward(self, x, train=False):
        self.check_input(x)
        z = np.exp(x - x.max(axis=-1, keepdims=True))
        y = z / z.sum(axis=-1, keepdims=True)
        self._cache = y
        return y

    def backward(self, dy):
        y = self._cached()
        return y * (dy - np.sum(dy * y, axis=-1, keepdims=True))


class Sigmoid(Layer):
    kind = 'sigmoid'

    def forward(self, x, train=False):
        self.check_input(x)
        y = 0.5 * (1.0 + np.tanh(0.5 * x))
        self._cache = y
        return y

    def backward(self, dy):
        y = self._cached()
        return dy * y * (1.0 - y)


class Branch(Layer):
    """Parallel layer stacks on the same input, merged by channel concatenation"""
    kind = 'branch'

    def __init__(self, stacks: Sequence[Sequence[Layer]]):
        super().__init__()
        if not stacks:
            raise ValueError("branch needs at least one stack")
        self.stacks = [list(stack) for stack in stacks]

    @property
    def conv_layers(self) -> int:
        return sum(layer.conv_layers for stack in self.stacks for layer in stack)

    def _output_shape(self, input_shape):
        outputs = []
        for stack in self.stacks:
            shape = input_shape
            for layer in stack:
                shape = layer.build(shape)
            outputs.append(shape)
        spatial = {s[:-1] for s in outputs}
        if len(spatial) != 1:
            raise ShapeMismatchError(f"branch stacks end on different spatial shapes {sorted(spatial)}")
        return outputs[0][:-1] + (sum(s[-1] for s in outputs),)

    def sublayers(self) -> List[Layer]:
        return [layer for stack in self.stacks for layer in stack]

    def param_shapes(self):
        return [shape for layer in self.sublayers() for shape in layer.param_shapes()]

    def bind(self, params, grads):
        super().bind(params, grads)
        params, grads = list(params), list(grads)
        for layer in self.sublayers():
            k = len(layer.param_shapes())
            layer.bind(params[:k], grads[:k])
            params, grads = params[k:], grads[k:]

    def initialize(self, rng):
        for layer in self.sublayers():
            layer.initialize(rng)

    def forward(self, x, train=False):
        self.check_input(x)
        outputs = []
        for stack in self.stacks:
            y = x
            for layer in stack:
                y = layer.forward(y, train)
            outputs.append(y)
        self._cache = [y.shape[-1] for y in outputs]
        return np.concatenate(outputs, axis=-1)

    def backward(self, dy):
        widths = self._cached()
        dx = np.zeros((dy.shape[0],) + self.input_shape)
        start = 0
        for stack, width in zip(self.stacks, widths):
            g = dy[..., start:start + width]
            start += width
            for layer in reversed(stack):
                g = layer.backward(g)
            dx += g
        return dx
