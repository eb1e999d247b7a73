"""Dataset containers, node splitting, and side-information feature embedding.

Label vectors are plain int64 arrays with entries in {0, ..., k-1}.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import Graph


@dataclass
class SideInfo:
    """A length-n label vector correlated with the true labels.

    source tags the provenance: "extracted-from-A_r", "extracted-from-X",
    "synthetic", "external", or "none" for the placeholder used by
    baseline-only training.
    """

    y_s: np.ndarray
    source: str

    def __post_init__(self):
        self.y_s = np.asarray(self.y_s, dtype=np.int64)


@dataclass
class NodeSplit:
    """Disjoint train / validation / test index sets (sorted int arrays)."""

    train: np.ndarray
    validation: np.ndarray
    test: np.ndarray

    def __post_init__(self):
        self.train = np.unique(np.asarray(self.train, dtype=np.int64))
        self.validation = np.unique(np.asarray(self.validation, dtype=np.int64))
        self.test = np.unique(np.asarray(self.test, dtype=np.int64))
        if (
            np.intersect1d(self.train, self.validation).size
            or np.intersect1d(self.train, self.test).size
            or np.intersect1d(self.validation, self.test).size
        ):
            raise ValueError("split sets must be pairwise disjoint")


@dataclass
class LabeledDataset:
    """Graph + features + labels + optional split.

    x is None when node features are the identity matrix (purely structural
    datasets); downstream code treats that case implicitly.
    """

    graph: Graph
    x: np.ndarray | None
    y: np.ndarray
    split: NodeSplit | None
    k: int
    name: str = "dataset"

    def __post_init__(self):
        self.y = np.asarray(self.y, dtype=np.int64)
        n = self.graph.n
        if self.y.shape != (n,):
            raise ValueError(f"label vector length {self.y.shape} != node count {n}")
        if self.y.size and (self.y.min() < 0 or self.y.max() >= self.k):
            raise ValueError(f"label outside 0..{self.k - 1}")
        if self.x is not None and self.x.shape[0] != n:
            raise ValueError("feature matrix row count != node count")
        if self.split is not None:
            for part in (self.split.train, self.split.validation, self.split.test):
                if part.size and (part.min() < 0 or part.max() >= n):
                    raise ValueError("split index out of range")

    @property
    def n(self) -> int:
        return self.graph.n


def one_hot(labels: np.ndarray, k: int) -> np.ndarray:
    labels = np.asarray(labels, dtype=np.int64)
    if labels.size and (labels.min() < 0 or labels.max() >= k):
        raise ValueError(f"label outside 0..{k - 1}")
    out = np.zeros((labels.shape[0], k))
    out[np.arange(labels.shape[0]), labels] = 1.0
    return out


def split_sample(
    y: np.ndarray,
    k: int,
    seed,
    per_class: int = 20,
    val_size: int = 500,
    test_size: int = 1000,
) -> NodeSplit:
    """Uniformly random disjoint split: per_class train nodes from every
    class, then val_size validation and test_size test nodes from the rest.

    Deterministic for a given seed.
    """
    y = np.asarray(y, dtype=np.int64)
    n = y.shape[0]
    need = per_class * k + val_size + test_size
    if n < need:
        raise ValueError(f"insufficient nodes: need at least {need}, have {n}")
    rng = np.random.default_rng(seed)
    train_parts = []
    for c in range(k):
        members = np.flatnonzero(y == c)
        if members.size < per_class:
            raise ValueError(
                f"class {c} has {members.size} members, fewer than {per_class}"
            )
        train_parts.append(rng.choice(members, size=per_class, replace=False))
    train = np.sort(np.concatenate(train_parts))
    rest = np.setdiff1d(np.arange(n), train, assume_unique=False)
    picked = rng.choice(rest, size=val_size + test_size, replace=False)
    validation = np.sort(picked[:val_size])
    test = np.sort(picked[val_size:])
    return NodeSplit(train=train, validation=validation, test=test)


def embed_side_info(
    x: np.ndarray | None, y_s, k: int, identity_features: bool
) -> np.ndarray:
    """Build a feature matrix carrying the side-information labels.

    With identity features the one-hot side-info matrix replaces them
    outright (n x k); otherwise it is stacked onto x as extra columns.
    """
    labels = np.asarray(getattr(y_s, "y_s", y_s), dtype=np.int64)
    oh = one_hot(labels, k)
    if identity_features:
        return oh
    if x is None:
        raise ValueError("non-identity embedding requires a feature matrix")
    if x.shape[0] != oh.shape[0]:
        raise ValueError("feature rows != side-info length")
    return np.hstack([x, oh])
