"""Stochastic block model generation and the noisy-label side-info channel."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import SideInfo
from .graph import Graph


@dataclass(frozen=True)
class SbmParams:
    """Assortative SBM: uniform labels, intra-class edge probability p,
    inter-class probability q, with p >= q."""

    n: int
    k: int
    p: float
    q: float
    seed: int

    def __post_init__(self):
        if self.k < 2:
            raise ValueError("class count must be at least 2")
        if self.n < self.k:
            raise ValueError("need at least one node per class")
        if not (0.0 <= self.q <= self.p <= 1.0):
            raise ValueError("require 0 <= q <= p <= 1")


def sbm_auto_edge_probs(n: int) -> tuple[float, float]:
    """Default edge probabilities p = 5 ln(n)/n and q = ln(n)/n."""
    if n < 2:
        raise ValueError("need at least 2 nodes")
    ln = np.log(n)
    return 5.0 * ln / n, ln / n


def sbm_generate(params: SbmParams) -> tuple[Graph, np.ndarray]:
    """Draw (graph, labels): uniform labels, then each unordered pair (i, j)
    gets an edge independently with probability p if labels match, else q.

    One row of uniforms per node keeps memory linear and the draw order
    fixed, so output is deterministic per seed.
    """
    rng = np.random.default_rng(params.seed)
    labels = rng.integers(0, params.k, size=params.n, dtype=np.int64)
    srcs = []
    dsts = []
    for i in range(params.n - 1):
        u = rng.random(params.n - 1 - i)
        thresh = np.where(labels[i + 1:] == labels[i], params.p, params.q)
        hits = np.flatnonzero(u < thresh)
        if hits.size:
            srcs.append(np.full(hits.size, i, dtype=np.int64))
            dsts.append(hits + i + 1)
    if srcs:
        edges = np.stack(
            [np.concatenate(srcs), np.concatenate(dsts)], axis=1
        )
    else:
        edges = np.empty((0, 2), dtype=np.int64)
    return Graph(params.n, edges), labels


def noisy_side_info(labels: np.ndarray, k: int, alpha: float, seed) -> SideInfo:
    """Noisy-label channel: each node independently reports its true label
    with probability alpha, otherwise a uniform draw from the k-1 wrong ones."""
    if k < 2:
        raise ValueError("class count must be at least 2")
    if not 0.0 <= alpha <= 1.0:
        raise ValueError("alpha must lie in [0, 1]")
    labels = np.asarray(labels, dtype=np.int64)
    rng = np.random.default_rng(seed)
    n = labels.shape[0]
    keep = rng.random(n) < alpha
    offsets = rng.integers(1, k, size=n, dtype=np.int64)
    y_s = np.where(keep, labels, (labels + offsets) % k)
    return SideInfo(y_s=y_s, source="synthetic")
