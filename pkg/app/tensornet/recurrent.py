"""Gated recurrent unit over the time axis of N x T x F inputs."""

from __future__ import annotations

from typing import Any

import numpy as np
from errors import ShapeMismatch
from tensornet.layers import Layer, Shape, glorot_uniform


def _sigmoid(x: np.ndarray) -> np.ndarray:
    return 0.5 * (1.0 + np.tanh(0.5 * x))


class GRU(Layer):
    """
    Classic GRU (reset gate applied to the previous state before the
    recurrent product):

        z = sigmoid(x Wz + h Uz + bz)
        r = sigmoid(x Wr + h Ur + br)
        c = tanh(x Wh + (r * h) Uh + bh)
        h' = z * h + (1 - z) * c

    Parameters are stored gate-major as ``kernel`` (F x 3U), ``recurrent``
    (U x 3U) and ``bias`` (3U) in z, r, h order. The initial state is zero.
    """

    kind = "gru"

    def __init__(
        self, input_dim: int, units: int, return_sequences: bool = False
    ) -> None:
        super().__init__()
        self.input_dim = input_dim
        self.units = units
        self.return_sequences = return_sequences
        self.params = {
            "kernel": np.zeros((input_dim, 3 * units)),
            "recurrent": np.zeros((units, 3 * units)),
            "bias": np.zeros(3 * units),
        }

    def config(self) -> dict[str, Any]:
        return {
            "kind": self.kind,
            "input_dim": self.input_dim,
            "units": self.units,
            "return_sequences": self.return_sequences,
        }

    def initialize(self, rng: np.random.Generator) -> None:
        u = self.units
        dtype = self.params["kernel"].dtype
        self.params["kernel"] = glorot_uniform(
            rng, (self.input_dim, 3 * u), self.input_dim, 3 * u
        ).astype(dtype)
        self.params["recurrent"] = glorot_uniform(rng, (u, 3 * u), u, 3 * u).astype(
            dtype
        )
        self.params["bias"] = np.zeros(3 * u, dtype=dtype)

    def output_shape(self, input_shape: Shape) -> Shape:
        steps, _ = input_shape
        return (steps, self.units) if self.return_sequences else (self.units,)

    def forward(self, x: np.ndarray) -> np.ndarray:
        if x.ndim != 3 or x.shape[2] != self.input_dim:
            raise ShapeMismatch(
                f"gru expects N x T x {self.input_dim}, got {x.shape}"
            )
        n, steps, _ = x.shape
        u = self.units
        kernel, recurrent, bias = (
            self.params["kernel"],
            self.params["recurrent"],
            self.params["bias"],
        )
        projected = x @ kernel + bias  # N x T x 3U
        h = np.zeros((n, u), dtype=x.dtype)
        states = [h]
        gates: list[tuple[np.ndarray, np.ndarray, np.ndarray]] = []
        for t in range(steps):
            step = projected[:, t]
            z = _sigmoid(step[:, :u] + h @ recurrent[:, :u])
            r = _sigmoid(step[:, u : 2 * u] + h @ recurrent[:, u : 2 * u])
            c = np.tanh(step[:, 2 * u :] + (r * h) @ recurrent[:, 2 * u :])
            h = z * h + (1.0 - z) * c
            states.append(h)
            gates.append((z, r, c))
        self._cache = (x, states, gates)
        if self.return_sequences:
            return np.stack(states[1:], axis=1)
        return h

    def backward(self, grad: np.ndarray) -> np.ndarray:
        x, states, gates = self._cache
        _, steps, _ = x.shape
        u = self.units
        recurrent = self.params["recurrent"]
        d_kernel = np.zeros_like(self.params["kernel"])
        d_recurrent = np.zeros_like(recurrent)
        d_bias = np.zeros_like(self.params["bias"])
        d_x = np.zeros_like(x)
        d_h = np.zeros_like(states[0])
        for t in reversed(range(steps)):
            if self.return_sequences:
                d_h = d_h + grad[:, t]
            elif t == steps - 1:
                d_h = d_h + grad
            z, r, c = gates[t]
            h_prev = states[t]

            d_z = d_h * (h_prev - c)
            d_c = d_h * (1.0 - z)
            d_prev = d_h * z

            a_c = d_c * (1.0 - c * c)
            d_reset_h = a_c @ recurrent[:, 2 * u :].T
            d_r = d_reset_h * h_prev
            d_prev += d_reset_h * r

            a_z = d_z * z * (1.0 - z)
            a_r = d_r * r * (1.0 - r)
            d_prev += a_z @ recurrent[:, :u].T + a_r @ recurrent[:, u : 2 * u].T

            a_all = np.concatenate([a_z, a_r, a_c], axis=1)
            d_kernel += x[:, t].T @ a_all
            d_bias += a_all.sum(axis=0)
            d_recurrent[:, :u] += h_prev.T @ a_z
            d_recurrent[:, u : 2 * u] += h_prev.T @ a_r
            d_recurrent[:, 2 * u :] += (r * h_prev).T @ a_c
            d_x[:, t] = a_all @ self.params["kernel"].T
            d_h = d_prev

        self.grads["kernel"] = self.grads.get("kernel", 0) + d_kernel
        self.grads["recurrent"] = self.grads.get("recurrent", 0) + d_recurrent
        self.grads["bias"] = self.grads.get("bias", 0) + d_bias
        return d_x
