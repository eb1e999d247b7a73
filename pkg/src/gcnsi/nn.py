"""Minimal dense numerical kernel: Glorot initialization, activations,
masked cross-entropy, Adam, L2 penalty, and a finite-difference checker.

Everything is 64-bit numpy; matrices are plain 2-D float64 ndarrays.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def as_rng(seed) -> np.random.Generator:
    """Accept either an integer seed or an existing Generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


@dataclass
class AdamConfig:
    learning_rate: float
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8

    def __post_init__(self):
        if self.learning_rate < 0:
            raise ValueError("learning rate must be nonnegative")
        if not (0.0 < self.beta1 < 1.0 and 0.0 < self.beta2 < 1.0):
            raise ValueError("betas must lie in (0, 1)")
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")


@dataclass
class Parameter:
    """Trainable matrix with its gradient and Adam moment accumulators."""

    value: np.ndarray
    grad: np.ndarray
    adam_m: np.ndarray
    adam_v: np.ndarray
    step_count: int = 0

    @classmethod
    def of(cls, value: np.ndarray) -> "Parameter":
        value = np.asarray(value, dtype=np.float64)
        return cls(
            value=value,
            grad=np.zeros_like(value),
            adam_m=np.zeros_like(value),
            adam_v=np.zeros_like(value),
        )

    def zero_grad(self):
        self.grad[...] = 0.0


def glorot_init(rows: int, cols: int, seed) -> np.ndarray:
    """Uniform Glorot: entries i.i.d. on [-s, s] with s = sqrt(6/(rows+cols))."""
    if rows < 1 or cols < 1:
        raise ValueError("matrix dimensions must be positive")
    rng = as_rng(seed)
    s = np.sqrt(6.0 / (rows + cols))
    return rng.uniform(-s, s, size=(rows, cols))


def relu(x: np.ndarray) -> np.ndarray:
    return np.maximum(x, 0.0)


def softmax_rows(x: np.ndarray) -> np.ndarray:
    """Row-wise softmax with max-subtraction for overflow safety."""
    shifted = x - x.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=1, keepdims=True)


def masked_cross_entropy(
    probs: np.ndarray, targets: np.ndarray, s: np.ndarray
) -> tuple[float, np.ndarray]:
    """Mean negative log-likelihood over the index set s.

    Returns (loss, gradient w.r.t. the pre-softmax logits). Rows outside s
    get a zero gradient; rows in s get (probs - onehot(target)) / |s|, the
    usual softmax + cross-entropy composite.
    """
    s = np.asarray(s, dtype=np.int64)
    if s.size == 0:
        raise ValueError("index set must be nonempty")
    if np.unique(s).size != s.size:
        raise ValueError("index set contains duplicates")
    k = probs.shape[1]
    t = np.asarray(targets, dtype=np.int64)[s]
    if t.min() < 0 or t.max() >= k:
        raise ValueError(f"target index out of range for {k} classes")
    picked = probs[s, t]
    loss = float(-np.log(picked).mean())
    grad = np.zeros_like(probs)
    grad[s] = probs[s]
    grad[s, t] -= 1.0
    grad[s] /= s.size
    return loss, grad


def adam_step(p: Parameter, cfg: AdamConfig) -> Parameter:
    """Bias-corrected Adam update in place; the gradient is left untouched."""
    g = p.grad
    p.step_count += 1
    t = p.step_count
    p.adam_m *= cfg.beta1
    p.adam_m += (1.0 - cfg.beta1) * g
    p.adam_v *= cfg.beta2
    p.adam_v += (1.0 - cfg.beta2) * np.square(g)
    m_hat = p.adam_m / (1.0 - cfg.beta1**t)
    v_hat = p.adam_v / (1.0 - cfg.beta2**t)
    p.value -= cfg.learning_rate * m_hat / (np.sqrt(v_hat) + cfg.epsilon)
    return p


def l2_penalty(w: np.ndarray, factor: float) -> tuple[float, np.ndarray]:
    """Penalty factor * 0.5 * ||w||_F^2 and its gradient factor * w."""
    loss = 0.5 * factor * float(np.sum(w * w))
    return loss, factor * w


def finite_difference_check(
    f, x: np.ndarray, analytic_grad: np.ndarray, h: float = 1e-5
) -> float:
    """Max relative error between central differences of f and analytic_grad.

    Per-coordinate error is |fd - g| / max(1, |fd|, |g|). Intended as a test
    oracle on small inputs; cost is two evaluations of f per coordinate.
    """
    if h <= 0:
        raise ValueError("step size must be positive")
    x = np.array(x, dtype=np.float64)
    worst = 0.0
    it = np.nditer(x, flags=["multi_index"])
    for _ in it:
        idx = it.multi_index
        orig = x[idx]
        x[idx] = orig + h
        fp = float(f(x))
        x[idx] = orig - h
        fm = float(f(x))
        x[idx] = orig
        if not (np.isfinite(fp) and np.isfinite(fm)):
            raise ValueError("function value is not finite")
        fd = (fp - fm) / (2.0 * h)
        g = float(analytic_grad[idx])
        err = abs(fd - g) / max(1.0, abs(fd), abs(g))
        worst = max(worst, err)
    return worst
