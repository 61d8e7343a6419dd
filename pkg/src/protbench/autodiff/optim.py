"""Adam optimizer with bias correction."""

import numpy as np


class NonFiniteGradientError(RuntimeError):
    pass


class Adam:
    def __init__(self, named_params, lr, beta1=0.9, beta2=0.999, epsilon=1e-8):
        if lr <= 0:
            raise ValueError(f"learning rate must be positive, got {lr}")
        self.named_params = list(named_params)
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.epsilon = epsilon
        self.t = 0
        self.m = [np.zeros_like(p.data, dtype=np.float64) for _, p in self.named_params]
        self.v = [np.zeros_like(p.data, dtype=np.float64) for _, p in self.named_params]

    def step(self):
        """Apply one update from the accumulated gradients, then zero them."""
        self.t += 1
        bc1 = 1.0 - self.beta1**self.t
        bc2 = 1.0 - self.beta2**self.t
        for i, (name, p) in enumerate(self.named_params):
            g = p.grad
            if g is None:
                continue
            if not np.all(np.isfinite(g)):
                raise NonFiniteGradientError(
                    f"non-finite gradient in parameter {name!r}"
                )
            g = g.astype(np.float64)
            self.m[i] = self.beta1 * self.m[i] + (1.0 - self.beta1) * g
            self.v[i] = self.beta2 * self.v[i] + (1.0 - self.beta2) * g * g
            m_hat = self.m[i] / bc1
            v_hat = self.v[i] / bc2
            update = self.lr * m_hat / (np.sqrt(v_hat) + self.epsilon)
            p.data = (p.data.astype(np.float64) - update).astype(p.data.dtype)
            p.grad = None
