"""Adam optimizer with bias correction."""

import numpy as np

from chois.errors import ShapeError


class AdamState:
    """First/second moment accumulators plus hyperparameters."""

    def __init__(self, store, lr=3e-4, beta1=0.9, beta2=0.999, eps=1e-8):
        self.lr = float(lr)
        self.beta1 = float(beta1)
        self.beta2 = float(beta2)
        self.eps = float(eps)
        self.step_count = 0
        self.m = {name: np.zeros_like(t.data) for name, t in store.items()}
        self.v = {name: np.zeros_like(t.data) for name, t in store.items()}


def adam_step(store, grads, state):
    """Apply one in-place Adam update; increments the step counter.

    ``grads`` maps every parameter name to its gradient array (a
    ``Gradients`` result works via ``[name]`` lookup).
    """
    state.step_count += 1
    t = state.step_count
    bc1 = 1.0 - state.beta1 ** t
    bc2 = 1.0 - state.beta2 ** t
    for name, param in store.items():
        g = grads[name]
        g = np.asarray(g, dtype=np.float64)
        if g.shape != param.data.shape:
            raise ShapeError(
                f"gradient for {name!r} has shape {g.shape}, expected {param.data.shape}"
            )
        m = state.m[name]
        v = state.v[name]
        m *= state.beta1
        m += (1.0 - state.beta1) * g
        v *= state.beta2
        v += (1.0 - state.beta2) * g * g
        m_hat = m / bc1
        v_hat = v / bc2
        param.data = param.data - state.lr * m_hat / (np.sqrt(v_hat) + state.eps)
    return store
