"""Central finite-difference checks of analytic layer gradients."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from tensornet.layers import Layer

STEP = 1e-6
# elements smaller than this are compared on an absolute scale
SCALE_FLOOR = 1e-3


@dataclass(frozen=True, slots=True)
class GradCheckReport:
    input_error: float
    param_errors: dict[str, float]

    @property
    def max_error(self) -> float:
        return max([self.input_error, *self.param_errors.values()])


def relative_error(analytic: np.ndarray, numeric: np.ndarray) -> float:
    """Elementwise ``max(|a - n| / max(|a|, |n|, SCALE_FLOOR))``."""
    analytic, numeric = np.asarray(analytic), np.asarray(numeric)
    if analytic.size == 0:
        return 0.0
    scale = np.maximum(np.maximum(np.abs(analytic), np.abs(numeric)), SCALE_FLOOR)
    return float(np.max(np.abs(analytic - numeric) / scale))


def _numeric(
    layer: Layer, x: np.ndarray, upstream: np.ndarray, target: np.ndarray
) -> np.ndarray:
    """Finite-difference gradient of ``sum(layer(x) * upstream)`` w.r.t. target."""
    grad = np.zeros_like(target)
    flat, flat_grad = target.reshape(-1), grad.reshape(-1)
    for k in range(flat.size):
        original = flat[k]
        flat[k] = original + STEP
        plus = float(np.sum(layer.forward(x) * upstream))
        flat[k] = original - STEP
        minus = float(np.sum(layer.forward(x) * upstream))
        flat[k] = original
        flat_grad[k] = (plus - minus) / (2 * STEP)
    return grad


def check_layer_gradients(
    layer: Layer, x: np.ndarray, rng: np.random.Generator
) -> GradCheckReport:
    """
    Compare ``layer.backward`` with central differences in float64.

    The scalar checked is ``sum(layer(x) * u)`` for a random upstream ``u``.
    """
    layer.astype(np.float64)
    x = np.array(x, dtype=np.float64)
    upstream = rng.normal(size=layer.forward(x).shape)

    layer.zero_grads()
    layer.forward(x)
    analytic_input = layer.backward(upstream)
    analytic_params = dict(layer.named_gradients())
    analytic_params = {name: value.copy() for name, value in analytic_params.items()}

    input_error = relative_error(analytic_input, _numeric(layer, x, upstream, x))
    param_errors = {
        name: relative_error(analytic_params[name], _numeric(layer, x, upstream, param))
        for name, param in layer.named_parameters()
    }
    return GradCheckReport(input_error=input_error, param_errors=param_errors)
