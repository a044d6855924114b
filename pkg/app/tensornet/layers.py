"""
Layers for the numpy network engine.

Image tensors are laid out NHWC, sequences N x T x F. Every layer caches what
its backward pass needs during ``forward`` and accumulates parameter gradients
into ``grads`` during ``backward``. Composite layers own child layers and
expose their parameters under dotted names.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from collections.abc import Iterator
from typing import Any, ClassVar

import numpy as np
from errors import ShapeMismatch, SpecError

Shape = tuple[int, ...]


def he_normal(rng: np.random.Generator, shape: Shape, fan_in: int) -> np.ndarray:
    return rng.normal(0.0, math.sqrt(2.0 / fan_in), size=shape)


def glorot_uniform(
    rng: np.random.Generator, shape: Shape, fan_in: int, fan_out: int
) -> np.ndarray:
    limit = math.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=shape)


class Layer(ABC):
    """Base class: parameters, gradients, forward/backward, config round trip."""

    kind: ClassVar[str]
    registry: ClassVar[dict[str, type[Layer]]] = {}

    def __init_subclass__(cls, **kwargs: Any) -> None:
        super().__init_subclass__(**kwargs)
        if "kind" in cls.__dict__:
            Layer.registry[cls.kind] = cls

    def __init__(self) -> None:
        self.params: dict[str, np.ndarray] = {}
        self.grads: dict[str, np.ndarray] = {}

    @abstractmethod
    def forward(self, x: np.ndarray) -> np.ndarray: ...

    @abstractmethod
    def backward(self, grad: np.ndarray) -> np.ndarray:
        """Return the gradient w.r.t. the input; accumulate parameter grads."""

    @abstractmethod
    def output_shape(self, input_shape: Shape) -> Shape:
        """Output shape for a per-sample input shape (batch axis excluded)."""

    def config(self) -> dict[str, Any]:
        return {"kind": self.kind}

    def children(self) -> list[Layer]:
        return []

    def initialize(self, rng: np.random.Generator) -> None:
        for child in self.children():
            child.initialize(rng)

    def zero_grads(self) -> None:
        for name, value in self.params.items():
            self.grads[name] = np.zeros_like(value)
        for child in self.children():
            child.zero_grads()

    def named_parameters(self, prefix: str = "") -> Iterator[tuple[str, np.ndarray]]:
        for name, value in self.params.items():
            yield f"{prefix}{name}", value
        for k, child in enumerate(self.children()):
            yield from child.named_parameters(f"{prefix}{k}.")

    def named_gradients(self, prefix: str = "") -> Iterator[tuple[str, np.ndarray]]:
        for name in self.params:
            yield f"{prefix}{name}", self.grads[name]
        for k, child in enumerate(self.children()):
            yield from child.named_gradients(f"{prefix}{k}.")

    def astype(self, dtype: np.dtype[Any] | type) -> None:
        for name in self.params:
            self.params[name] = self.params[name].astype(dtype)
        for child in self.children():
            child.astype(dtype)

    @staticmethod
    def from_config(config: dict[str, Any]) -> Layer:
        options = dict(config)
        kind = options.pop("kind")
        cls = Layer.registry.get(kind)
        if cls is None:
            raise SpecError(f"unknown layer kind {kind!r}")
        return cls.build(options)

    @classmethod
    def build(cls, options: dict[str, Any]) -> Layer:
        return cls(**options)


# ---------------------------------------------------------------------------
# convolution and pooling


def _same_padding(size: int, kernel: int, stride: int) -> tuple[int, int, int]:
    out = -(-size // stride)
    total = max((out - 1) * stride + kernel - size, 0)
    return out, total // 2, total - total // 2


def _window_plan(
    height: int, width: int, kernel: int, stride: int, padding: str
) -> tuple[int, int, tuple[int, int], tuple[int, int]]:
    if padding == "same":
        oh, top, bottom = _same_padding(height, kernel, stride)
        ow, left, right = _same_padding(width, kernel, stride)
        return oh, ow, (top, bottom), (left, right)
    oh = (height - kernel) // stride + 1
    ow = (width - kernel) // stride + 1
    if oh < 1 or ow < 1:
        raise ShapeMismatch(f"input {height}x{width} smaller than kernel {kernel}")
    return oh, ow, (0, 0), (0, 0)


class Conv2D(Layer):
    """2D convolution, kernel K x K x C_in x C_out, TF-style same/valid padding."""

    kind = "conv2d"

    def __init__(
        self,
        in_channels: int,
        filters: int,
        kernel: int,
        stride: int = 1,
        padding: str = "same",
        init: str = "he",
    ) -> None:
        super().__init__()
        if padding not in ("same", "valid"):
            raise SpecError(f"unknown padding {padding!r}")
        self.in_channels = in_channels
        self.filters = filters
        self.kernel = kernel
        self.stride = stride
        self.padding = padding
        self.init = init
        self.params = {
            "kernel": np.zeros((kernel, kernel, in_channels, filters)),
            "bias": np.zeros(filters),
        }

    def config(self) -> dict[str, Any]:
        return {
            "kind": self.kind,
            "in_channels": self.in_channels,
            "filters": self.filters,
            "kernel": self.kernel,
            "stride": self.stride,
            "padding": self.padding,
            "init": self.init,
        }

    def initialize(self, rng: np.random.Generator) -> None:
        k, c_in, c_out = self.kernel, self.in_channels, self.filters
        shape = (k, k, c_in, c_out)
        if self.init == "he":
            kernel = he_normal(rng, shape, k * k * c_in)
        else:
            kernel = glorot_uniform(rng, shape, k * k * c_in, k * k * c_out)
        dtype = self.params["kernel"].dtype
        self.params["kernel"] = kernel.astype(dtype)
        self.params["bias"] = np.zeros(c_out, dtype=dtype)

    def output_shape(self, input_shape: Shape) -> Shape:
        h, w, _ = input_shape
        oh, ow, _, _ = _window_plan(h, w, self.kernel, self.stride, self.padding)
        return oh, ow, self.filters

    def _slices(self, oh: int, ow: int) -> Iterator[tuple[int, int, slice, slice]]:
        s = self.stride
        for i in range(self.kernel):
            for j in range(self.kernel):
                yield i, j, slice(i, i + s * (oh - 1) + 1, s), slice(
                    j, j + s * (ow - 1) + 1, s
                )

    def forward(self, x: np.ndarray) -> np.ndarray:
        if x.ndim != 4 or x.shape[-1] != self.in_channels:
            raise ShapeMismatch(
                f"conv2d expects N x H x W x {self.in_channels}, got {x.shape}"
            )
        n, h, w, _ = x.shape
        oh, ow, pad_h, pad_w = _window_plan(
            h, w, self.kernel, self.stride, self.padding
        )
        padded = np.pad(x, ((0, 0), pad_h, pad_w, (0, 0)))
        kernel = self.params["kernel"]
        out = np.zeros((n, oh, ow, self.filters), dtype=x.dtype)
        for i, j, rows, cols in self._slices(oh, ow):
            out += padded[:, rows, cols, :] @ kernel[i, j]
        out += self.params["bias"]
        self._cache = (padded, x.shape, pad_h, pad_w, oh, ow)
        return out

    def backward(self, grad: np.ndarray) -> np.ndarray:
        padded, shape, pad_h, pad_w, oh, ow = self._cache
        kernel = self.params["kernel"]
        d_kernel = np.zeros_like(kernel)
        d_padded = np.zeros_like(padded)
        for i, j, rows, cols in self._slices(oh, ow):
            patch = padded[:, rows, cols, :]
            d_kernel[i, j] = np.tensordot(patch, grad, axes=([0, 1, 2], [0, 1, 2]))
            d_padded[:, rows, cols, :] += grad @ kernel[i, j].T
        self.grads["kernel"] = self.grads.get("kernel", 0) + d_kernel
        self.grads["bias"] = self.grads.get("bias", 0) + grad.sum(axis=(0, 1, 2))
        _, h, w, _ = shape
        return d_padded[:, pad_h[0] : pad_h[0] + h, pad_w[0] : pad_w[0] + w, :]


class MaxPool2D(Layer):
    """Max pooling over K x K windows; same padding pads with -inf."""

    kind = "maxpool2d"

    def __init__(self, pool: int = 3, stride: int = 2, padding: str = "same") -> None:
        super().__init__()
        self.pool = pool
        self.stride = stride
        self.padding = padding

    def config(self) -> dict[str, Any]:
        return {
            "kind": self.kind,
            "pool": self.pool,
            "stride": self.stride,
            "padding": self.padding,
        }

    def output_shape(self, input_shape: Shape) -> Shape:
        h, w, c = input_shape
        oh, ow, _, _ = _window_plan(h, w, self.pool, self.stride, self.padding)
        return oh, ow, c

    def forward(self, x: np.ndarray) -> np.ndarray:
        if x.ndim != 4:
            raise ShapeMismatch(f"maxpool2d expects N x H x W x C, got {x.shape}")
        _, h, w, _ = x.shape
        oh, ow, pad_h, pad_w = _window_plan(h, w, self.pool, self.stride, self.padding)
        padded = np.pad(
            x, ((0, 0), pad_h, pad_w, (0, 0)), constant_values=-np.inf
        )
        s = self.stride
        windows = np.stack(
            [
                padded[:, i : i + s * (oh - 1) + 1 : s, j : j + s * (ow - 1) + 1 : s, :]
                for i in range(self.pool)
                for j in range(self.pool)
            ]
        )
        winner = np.argmax(windows, axis=0)
        self._cache = (padded.shape, x.shape, pad_h, pad_w, oh, ow, winner)
        return np.take_along_axis(windows, winner[None], axis=0)[0]

    def backward(self, grad: np.ndarray) -> np.ndarray:
        padded_shape, shape, pad_h, pad_w, oh, ow, winner = self._cache
        d_padded = np.zeros(padded_shape, dtype=grad.dtype)
        s = self.stride
        offset = 0
        for i in range(self.pool):
            for j in range(self.pool):
                rows = slice(i, i + s * (oh - 1) + 1, s)
                cols = slice(j, j + s * (ow - 1) + 1, s)
                d_padded[:, rows, cols, :] += np.where(winner == offset, grad, 0.0)
                offset += 1
        _, h, w, _ = shape
        return d_padded[:, pad_h[0] : pad_h[0] + h, pad_w[0] : pad_w[0] + w, :]


class GlobalAvgPool(Layer):
    kind = "global_avg_pool"

    def output_shape(self, input_shape: Shape) -> Shape:
        return (input_shape[-1],)

    def forward(self, x: np.ndarray) -> np.ndarray:
        if x.ndim != 4:
            raise ShapeMismatch(f"global_avg_pool expects N x H x W x C, got {x.shape}")
        self._shape = x.shape
        return x.mean(axis=(1, 2))

    def backward(self, grad: np.ndarray) -> np.ndarray:
        _, h, w, _ = self._shape
        return np.broadcast_to(
            grad[:, None, None, :] / (h * w), self._shape
        ).copy()


# ---------------------------------------------------------------------------
# dense and activations


class Dense(Layer):
    kind = "dense"

    def __init__(self, in_features: int, units: int, init: str = "glorot") -> None:
        super().__init__()
        self.in_features = in_features
        self.units = units
        self.init = init
        self.params = {
            "kernel": np.zeros((in_features, units)),
            "bias": np.zeros(units),
        }

    def config(self) -> dict[str, Any]:
        return {
            "kind": self.kind,
            "in_features": self.in_features,
            "units": self.units,
            "init": self.init,
        }

    def initialize(self, rng: np.random.Generator) -> None:
        shape = (self.in_features, self.units)
        if self.init == "he":
            kernel = he_normal(rng, shape, self.in_features)
        else:
            kernel = glorot_uniform(rng, shape, self.in_features, self.units)
        dtype = self.params["kernel"].dtype
        self.params["kernel"] = kernel.astype(dtype)
        self.params["bias"] = np.zeros(self.units, dtype=dtype)

    def output_shape(self, input_shape: Shape) -> Shape:
        return (self.units,)

    def forward(self, x: np.ndarray) -> np.ndarray:
        if x.ndim != 2 or x.shape[1] != self.in_features:
            raise ShapeMismatch(
                f"dense expects N x {self.in_features}, got {x.shape}"
            )
        self._input = x
        return x @ self.params["kernel"] + self.params["bias"]

    def backward(self, grad: np.ndarray) -> np.ndarray:
        self.grads["kernel"] = self.grads.get("kernel", 0) + self._input.T @ grad
        self.grads["bias"] = self.grads.get("bias", 0) + grad.sum(axis=0)
        return grad @ self.params["kernel"].T


class ReLU(Layer):
    kind = "relu"

    def output_shape(self, input_shape: Shape) -> Shape:
        return input_shape

    def forward(self, x: np.ndarray) -> np.ndarray:
        self._mask = x > 0
        return np.where(self._mask, x, 0.0).astype(x.dtype)

    def backward(self, grad: np.ndarray) -> np.ndarray:
        return np.where(self._mask, grad, 0.0).astype(grad.dtype)


class Sigmoid(Layer):
    kind = "sigmoid"

    def output_shape(self, input_shape: Shape) -> Shape:
        return input_shape

    def forward(self, x: np.ndarray) -> np.ndarray:
        # split by sign so exp never overflows
        out = np.empty_like(x)
        positive = x >= 0
        out[positive] = 1.0 / (1.0 + np.exp(-x[positive]))
        exp_x = np.exp(x[~positive])
        out[~positive] = exp_x / (1.0 + exp_x)
        self._out = out
        return out

    def backward(self, grad: np.ndarray) -> np.ndarray:
        return grad * self._out * (1.0 - self._out)


class Linear(Layer):
    """Identity activation."""

    kind = "linear"

    def output_shape(self, input_shape: Shape) -> Shape:
        return input_shape

    def forward(self, x: np.ndarray) -> np.ndarray:
        return x

    def backward(self, grad: np.ndarray) -> np.ndarray:
        return grad


# ---------------------------------------------------------------------------
# composites


class Sequential(Layer):
    kind = "sequential"

    def __init__(self, layers: list[Layer]) -> None:
        super().__init__()
        self.layers = layers

    @classmethod
    def build(cls, options: dict[str, Any]) -> Layer:
        return cls([Layer.from_config(c) for c in options["layers"]])

    def config(self) -> dict[str, Any]:
        return {"kind": self.kind, "layers": [layer.config() for layer in self.layers]}

    def children(self) -> list[Layer]:
        return self.layers

    def output_shape(self, input_shape: Shape) -> Shape:
        for layer in self.layers:
            input_shape = layer.output_shape(input_shape)
        return input_shape

    def forward(self, x: np.ndarray) -> np.ndarray:
        for layer in self.layers:
            x = layer.forward(x)
        return x

    def backward(self, grad: np.ndarray) -> np.ndarray:
        for layer in reversed(self.layers):
            grad = layer.backward(grad)
        return grad


class Concat(Layer):
    """Parallel branches over the same input, concatenated on the channel axis."""

    kind = "concat"

    def __init__(self, branches: list[Layer]) -> None:
        super().__init__()
        self.branches = branches

    @classmethod
    def build(cls, options: dict[str, Any]) -> Layer:
        return cls([Layer.from_config(c) for c in options["branches"]])

    def config(self) -> dict[str, Any]:
        return {
            "kind": self.kind,
            "branches": [branch.config() for branch in self.branches],
        }

    def children(self) -> list[Layer]:
        return self.branches

    def output_shape(self, input_shape: Shape) -> Shape:
        shapes = [branch.output_shape(input_shape) for branch in self.branches]
        if len({shape[:-1] for shape in shapes}) != 1:
            raise SpecError(f"concat branches disagree on spatial shape: {shapes}")
        return (*shapes[0][:-1], sum(shape[-1] for shape in shapes))

    def forward(self, x: np.ndarray) -> np.ndarray:
        outputs = [branch.forward(x) for branch in self.branches]
        self._widths = [out.shape[-1] for out in outputs]
        return np.concatenate(outputs, axis=-1)

    def backward(self, grad: np.ndarray) -> np.ndarray:
        splits = np.cumsum(self._widths)[:-1]
        parts = np.split(grad, splits, axis=-1)
        total: np.ndarray | None = None
        for branch, part in zip(self.branches, parts, strict=True):
            d_input = branch.backward(part)
            total = d_input if total is None else total + d_input
        assert total is not None
        return total


class Residual(Layer):
    """``activation(x + body(x))``."""

    kind = "residual"

    def __init__(self, body: Layer, activation: Layer | None = None) -> None:
        super().__init__()
        self.body = body
        self.activation = activation if activation is not None else Linear()

    @classmethod
    def build(cls, options: dict[str, Any]) -> Layer:
        return cls(
            Layer.from_config(options["body"]),
            Layer.from_config(options["activation"]),
        )

    def config(self) -> dict[str, Any]:
        return {
            "kind": self.kind,
            "body": self.body.config(),
            "activation": self.activation.config(),
        }

    def children(self) -> list[Layer]:
        return [self.body, self.activation]

    def output_shape(self, input_shape: Shape) -> Shape:
        body_shape = self.body.output_shape(input_shape)
        if body_shape != input_shape:
            raise SpecError(
                f"residual body maps {input_shape} to {body_shape}; shapes must match"
            )
        return input_shape

    def forward(self, x: np.ndarray) -> np.ndarray:
        return self.activation.forward(x + self.body.forward(x))

    def backward(self, grad: np.ndarray) -> np.ndarray:
        summed = self.activation.backward(grad)
        return summed + self.body.backward(summed)


HEAD_ACTIVATIONS = {
    "multitask-linear": "linear",
    "linear": "linear",
    "sigmoid": "sigmoid",
}


class Head(Sequential):
    """Output block: optional global average pool, dense, output activation."""

    kind = "head"

    def __init__(
        self, in_features: int, n_outputs: int, head: str, pool: bool = False
    ) -> None:
        if head not in HEAD_ACTIVATIONS:
            raise SpecError(f"unknown head kind {head!r}")
        self.in_features = in_features
        self.n_outputs = n_outputs
        self.head = head
        self.pool = pool
        layers: list[Layer] = [GlobalAvgPool()] if pool else []
        layers.append(Dense(in_features, n_outputs, init="glorot"))
        layers.append(Sigmoid() if HEAD_ACTIVATIONS[head] == "sigmoid" else Linear())
        super().__init__(layers)

    @classmethod
    def build(cls, options: dict[str, Any]) -> Layer:
        return cls(**options)

    def config(self) -> dict[str, Any]:
        return {
            "kind": self.kind,
            "in_features": self.in_features,
            "n_outputs": self.n_outputs,
            "head": self.head,
            "pool": self.pool,
        }
