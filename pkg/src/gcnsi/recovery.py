"""Side-information extraction: fit a classifier on the fixed training nodes
and predict a label for every node.

Inputs are either the node features, the radius-r neighborhood similarity
matrix, or both stacked; the classifier is a one-hidden-layer MLP or a
two-layer GCN over the observed graph.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import LabeledDataset, SideInfo
from .gcn import GcnModel, gcn_forward, gcn_train_epoch
from .graph import r_neighborhood_matrix, sym_normalize
from .nn import AdamConfig, Parameter, adam_step, glorot_init, masked_cross_entropy, relu, softmax_rows

CLASSIFIERS = ("mlp", "gcn")
INPUTS = ("feature", "neighborhood", "both")


@dataclass
class RecoveryConfig:
    classifier: str = "gcn"     # "mlp" or "gcn"
    inputs: str = "neighborhood"  # "feature", "neighborhood", or "both"
    r: int = 1
    epochs: int = 300
    lr: float = 0.01
    hidden: int = 16
    l2: float = 5e-5

    def __post_init__(self):
        if self.classifier not in CLASSIFIERS:
            raise ValueError(f"classifier must be one of {CLASSIFIERS}")
        if self.inputs not in INPUTS:
            raise ValueError(f"inputs must be one of {INPUTS}")
        if self.inputs in ("neighborhood", "both") and self.r < 1:
            raise ValueError("neighborhood radius must be at least 1")
        if self.epochs < 1 or self.hidden < 1:
            raise ValueError("epochs and hidden size must be positive")


def _classifier_features(dataset: LabeledDataset, cfg: RecoveryConfig):
    """Resolve the classifier input matrix and the matching source tag.

    Identity features (x=None) stay implicit for a GCN with inputs
    "feature"; the MLP and the "both" stack materialize them.
    """
    if cfg.inputs == "feature":
        return dataset.x, "extracted-from-X"
    ar = r_neighborhood_matrix(dataset.graph, cfg.r)
    if cfg.inputs == "neighborhood":
        return ar, "extracted-from-A_r"
    x = dataset.x if dataset.x is not None else np.eye(dataset.n)
    return np.hstack([x, ar]), "extracted-from-X-and-A_r"


def mlp_classify(
    features: np.ndarray,
    labels: np.ndarray,
    train_idx: np.ndarray,
    k: int,
    *,
    hidden: int = 16,
    epochs: int = 300,
    lr: float = 0.01,
    l2: float = 0.0,
    seed=0,
) -> np.ndarray:
    """One-hidden-layer network (ReLU, softmax, Adam, full-batch CE on the
    training rows) trained to max epochs; argmax predictions for all rows.

    Only labels[train_idx] are read.
    """
    train_idx = np.asarray(train_idx, dtype=np.int64)
    if train_idx.size == 0:
        raise ValueError("training index set must be nonempty")
    n, d = features.shape
    if d == 0:
        raise ValueError("feature matrix must have at least one column")
    rng = np.random.default_rng(seed)
    w0 = Parameter.of(glorot_init(d, hidden, rng))
    b0 = Parameter.of(np.zeros((1, hidden)))
    w1 = Parameter.of(glorot_init(hidden, k, rng))
    b1 = Parameter.of(np.zeros((1, k)))
    params = (w0, b0, w1, b1)
    adam = AdamConfig(lr)

    xt = features[train_idx]
    yt = np.asarray(labels, dtype=np.int64)[train_idx]
    batch = np.arange(train_idx.size)
    for epoch in range(epochs):
        pre = xt @ w0.value + b0.value
        h = relu(pre)
        probs = softmax_rows(h @ w1.value + b1.value)
        ce, g = masked_cross_entropy(probs, yt, batch)
        loss = ce + 0.5 * l2 * float(np.sum(w0.value**2))
        if not np.isfinite(loss):
            raise RuntimeError(f"mlp training diverged at epoch {epoch}")
        w1.grad = h.T @ g
        b1.grad = g.sum(axis=0, keepdims=True)
        gh = (g @ w1.value.T) * (pre > 0.0)
        w0.grad = xt.T @ gh + l2 * w0.value
        b0.grad = gh.sum(axis=0, keepdims=True)
        for p in params:
            adam_step(p, adam)
            p.zero_grad()

    h_all = relu(features @ w0.value + b0.value)
    logits = h_all @ w1.value + b1.value
    return np.argmax(logits, axis=1)


def extract_side_info(dataset: LabeledDataset, cfg: RecoveryConfig, seed=0) -> SideInfo:
    """Train the configured classifier on the fixed training nodes only and
    return predicted labels for every node.

    Raises RuntimeError if training produces a non-finite loss; there is no
    silent fallback.
    """
    if dataset.split is None or dataset.split.train.size == 0:
        raise ValueError("dataset needs a nonempty fixed training split")
    train = dataset.split.train
    n, k = dataset.n, dataset.k
    feats, source = _classifier_features(dataset, cfg)

    # Restricted label view: everything outside the training split is zeroed
    # and never consulted.
    targets = np.zeros(n, dtype=np.int64)
    targets[train] = dataset.y[train]

    if cfg.classifier == "gcn":
        a_hat = sym_normalize(dataset.graph)
        in_dim = feats.shape[1] if feats is not None else n
        model = GcnModel.init(in_dim, cfg.hidden, k, seed)
        adam = AdamConfig(cfg.lr)
        for epoch in range(cfg.epochs):
            loss = gcn_train_epoch(model, a_hat, feats, targets, train, adam, cfg.l2)
            if not np.isfinite(loss):
                raise RuntimeError(f"recovery gcn diverged at epoch {epoch}")
        y_s = gcn_forward(model, a_hat, feats).y_hat
    else:
        mlp_feats = feats if feats is not None else np.eye(n)
        y_s = mlp_classify(
            mlp_feats,
            targets,
            train,
            k,
            hidden=cfg.hidden,
            epochs=cfg.epochs,
            lr=cfg.lr,
            l2=cfg.l2,
            seed=seed,
        )
    return SideInfo(y_s=y_s, source=source)


def side_info_accuracy(si, y: np.ndarray, eval_idx) -> float:
    """Fraction of side-info entries matching y over eval_idx."""
    eval_idx = np.asarray(eval_idx, dtype=np.int64)
    if eval_idx.size == 0:
        raise ValueError("evaluation index set must be nonempty")
    ys = np.asarray(getattr(si, "y_s", si), dtype=np.int64)
    return float(np.mean(ys[eval_idx] == np.asarray(y)[eval_idx]))
