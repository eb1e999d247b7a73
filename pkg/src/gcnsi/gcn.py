"""Two-layer graph convolutional network with hand-written gradients.

Forward map: z = softmax(A_hat relu(A_hat X W0) W1), where A_hat is the
self-loop-normalized adjacency. When the feature matrix is the identity
(pass x=None) the product A_hat X is simply A_hat and is never materialized
separately.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .nn import (
    AdamConfig,
    Parameter,
    adam_step,
    glorot_init,
    l2_penalty,
    masked_cross_entropy,
    relu,
    softmax_rows,
)


@dataclass
class ForwardCache:
    a_hat: sp.sparray
    ax: object  # A_hat @ X; sparse when X is the implicit identity
    pre: np.ndarray
    hidden: np.ndarray


@dataclass
class GcnOutput:
    z: np.ndarray       # n x k row-stochastic class probabilities
    y_hat: np.ndarray   # row-wise argmax (ties -> lowest class index)


@dataclass
class GcnModel:
    w0: Parameter
    w1: Parameter
    cache: ForwardCache | None = None

    @classmethod
    def init(cls, in_dim: int, hidden_dim: int, out_dim: int, seed) -> "GcnModel":
        rng = np.random.default_rng(seed) if not isinstance(seed, np.random.Generator) else seed
        return cls(
            w0=Parameter.of(glorot_init(in_dim, hidden_dim, rng)),
            w1=Parameter.of(glorot_init(hidden_dim, out_dim, rng)),
        )


def gcn_forward(model: GcnModel, a_hat: sp.sparray, x: np.ndarray | None) -> GcnOutput:
    """Full-batch forward pass; intermediates are cached for the backward pass."""
    n = a_hat.shape[0]
    if x is not None and x.shape[0] != n:
        raise ValueError(f"feature rows {x.shape[0]} != node count {n}")
    ax = a_hat if x is None else a_hat @ x
    if ax.shape[1] != model.w0.value.shape[0]:
        raise ValueError(
            f"input width {ax.shape[1]} != first-layer rows {model.w0.value.shape[0]}"
        )
    pre = ax @ model.w0.value
    hidden = relu(pre)
    logits = a_hat @ (hidden @ model.w1.value)
    z = softmax_rows(logits)
    model.cache = ForwardCache(a_hat=a_hat, ax=ax, pre=pre, hidden=hidden)
    return GcnOutput(z=z, y_hat=np.argmax(z, axis=1))


def gcn_backward(model: GcnModel, grad_wrt_logits: np.ndarray, l2_factor: float = 0.0):
    """Populate w0.grad and w1.grad from the cached forward intermediates.

    A_hat is symmetric, so its transpose never appears explicitly. The L2
    term applies to the first layer only.
    """
    c = model.cache
    if c is None:
        raise RuntimeError("stale cache: call gcn_forward before gcn_backward")
    ag = c.a_hat @ grad_wrt_logits
    model.w1.grad = c.hidden.T @ ag
    gh = (ag @ model.w1.value.T) * (c.pre > 0.0)
    model.w0.grad = c.ax.T @ gh + l2_factor * model.w0.value


def gcn_train_epoch(
    model: GcnModel,
    a_hat: sp.sparray,
    x: np.ndarray | None,
    targets: np.ndarray,
    s: np.ndarray,
    adam: AdamConfig,
    l2_factor: float = 0.0,
) -> float:
    """One full-batch epoch: forward, masked CE on s, backward, Adam on both
    weights. Returns the loss including the L2 term."""
    out = gcn_forward(model, a_hat, x)
    ce, grad = masked_cross_entropy(out.z, targets, s)
    reg, _ = l2_penalty(model.w0.value, l2_factor)
    gcn_backward(model, grad, l2_factor)
    adam_step(model.w0, adam)
    adam_step(model.w1, adam)
    model.w0.zero_grad()
    model.w1.zero_grad()
    model.cache = None
    return ce + reg
