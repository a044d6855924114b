"""RMSprop update on the trainable parameters of a model."""

from __future__ import annotations

import numpy as np
from config import TrainConfig
from tensornet.model import Model


def rmsprop_step(
    model: Model, grads: dict[str, np.ndarray], config: TrainConfig
) -> None:
    """
    One RMSprop update, in place:

        s <- rho * s + (1 - rho) * g**2
        w <- w - lr * g / (sqrt(s) + eps)

    Parameters of frozen segments and their optimizer state are not touched.
    """
    rho, lr, eps = config.rho, config.learning_rate, config.epsilon
    trainable = set(model.trainable_parameter_names())
    for name, param in model.named_parameters():
        if name not in trainable:
            continue
        grad = grads[name]
        state = model.optimizer_state.get(name)
        if state is None:
            state = np.zeros_like(param)
        state = rho * state + (1.0 - rho) * grad * grad
        model.optimizer_state[name] = state.astype(param.dtype)
        param -= (lr * grad / (np.sqrt(state) + eps)).astype(param.dtype)
