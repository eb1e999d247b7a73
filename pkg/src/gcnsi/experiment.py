"""Full training loop combining the GCN with side information, plus seeded
repeated-run aggregation.

Each epoch: forward pass, training-set selection from the current
predictions and the side info, masked cross-entropy on the selected set
with the embedded side-info labels as targets, backward pass, Adam step
(phase-1 learning rate before the switch epoch, phase-2 after). Adam
moments carry across the switch; only the rate changes.

Per-epoch metrics come from the same forward pass the selection saw.
Validation and test labels are read only to score predictions; nothing on
the training path touches them.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from typing import Callable, Union

import numpy as np

from .data import LabeledDataset, SideInfo, embed_side_info, split_sample
from .decision import DecisionConfig, DecisionState, decide
from .gcn import GcnModel, gcn_backward, gcn_forward
from .graph import sym_normalize
from .nn import AdamConfig, adam_step, l2_penalty, masked_cross_entropy
from .recovery import RecoveryConfig, extract_side_info
from .synth import SbmParams, sbm_auto_edge_probs, sbm_generate, noisy_side_info

logger = logging.getLogger(__name__)

SI_KINDS = ("none", "extract", "synthetic", "external")
SELECTION_RULES = ("best_val", "final")


def derive_seeds(entropy: tuple[int, ...], count: int) -> list[int]:
    """Stable child seeds for independent RNG streams within one run."""
    state = np.random.SeedSequence(entropy).generate_state(count, np.uint64)
    return [int(s) for s in state]


@dataclass
class ExperimentConfig:
    decision: DecisionConfig
    max_epochs: int
    lr_phase1: float
    lr_phase2: float
    l2_factor: float
    hidden_size: int
    si_kind: str = "extract"
    recovery: RecoveryConfig | None = None
    alpha: float | None = None
    embed_si_in_features: bool = False
    baseline: bool = False
    runs: int = 10
    base_seed: int = 0
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_epsilon: float = 1e-8
    model_selection: str = "best_val"

    def __post_init__(self):
        if self.si_kind not in SI_KINDS:
            raise ValueError(f"si_kind must be one of {SI_KINDS}")
        if self.model_selection not in SELECTION_RULES:
            raise ValueError(f"model_selection must be one of {SELECTION_RULES}")
        if self.max_epochs < 1:
            raise ValueError("max_epochs must be positive")
        if self.runs < 1:
            raise ValueError("runs must be positive")
        if self.si_kind == "synthetic" and self.alpha is None:
            raise ValueError("synthetic side info requires alpha")
        if self.si_kind == "extract" and self.recovery is None:
            raise ValueError("extraction requires a recovery config")
        if self.max_epochs <= self.decision.e_u and not self.baseline:
            logger.warning(
                "max_epochs (%d) <= e_u (%d): augmentation never starts",
                self.max_epochs,
                self.decision.e_u,
            )

    def adam(self, lr: float) -> AdamConfig:
        return AdamConfig(lr, self.adam_beta1, self.adam_beta2, self.adam_epsilon)


@dataclass
class RunMetrics:
    """Per-epoch curves and headline numbers for one training run."""

    loss: np.ndarray
    train_acc: np.ndarray
    val_acc: np.ndarray
    test_acc: np.ndarray
    s_size: np.ndarray
    phase: np.ndarray
    best_epoch: int
    test_acc_at_best_val: float
    final_test_acc: float
    selected_test_acc: float
    side_info_accuracy: float | None
    seed: int = 0


@dataclass
class RunSummary:
    metrics: list[RunMetrics]
    mean: float
    std: float
    min: float
    max: float
    side_info_accuracy_mean: float | None


def accuracy(pred: np.ndarray, y: np.ndarray, idx: np.ndarray) -> float:
    return float(np.mean(pred[idx] == y[idx]))


def train_gcn_si(
    dataset: LabeledDataset, side_info: SideInfo, cfg: ExperimentConfig, seed
) -> RunMetrics:
    """Train on dataset with the given side info; returns the run's metrics.

    seed controls weight initialization only. Aborts with RuntimeError on a
    non-finite loss.
    """
    if dataset.split is None:
        raise ValueError("dataset needs a split")
    n, k = dataset.n, dataset.k
    split = dataset.split
    fixed = split.train
    y_fixed = dataset.y[fixed]  # the only labels the training path sees

    a_hat = sym_normalize(dataset.graph)
    x = dataset.x
    in_dim = x.shape[1] if x is not None else n
    model = GcnModel.init(in_dim, cfg.hidden_size, k, seed)
    state = DecisionState()
    adam_p1 = cfg.adam(cfg.lr_phase1)
    adam_p2 = cfg.adam(cfg.lr_phase2)

    epochs = cfg.max_epochs
    loss = np.empty(epochs)
    train_acc = np.empty(epochs)
    val_acc = np.empty(epochs)
    test_acc = np.empty(epochs)
    s_size = np.empty(epochs, dtype=np.int64)
    phase = np.empty(epochs, dtype=np.int64)

    for e in range(epochs):
        out = gcn_forward(model, a_hat, x)
        dec = decide(out.z, side_info.y_s, fixed, y_fixed, e, cfg.decision, state)
        ce, grad = masked_cross_entropy(out.z, dec.y_s_hat, dec.s)
        reg, _ = l2_penalty(model.w0.value, cfg.l2_factor)
        total = ce + reg
        if not np.isfinite(total):
            raise RuntimeError(
                f"non-finite loss at epoch {e} (|S|={dec.s.size}, phase {state.current_phase})"
            )
        gcn_backward(model, grad, cfg.l2_factor)
        adam = adam_p1 if e < cfg.decision.e_u else adam_p2
        adam_step(model.w0, adam)
        adam_step(model.w1, adam)
        model.w0.zero_grad()
        model.w1.zero_grad()
        model.cache = None

        loss[e] = total
        train_acc[e] = accuracy(out.y_hat, dataset.y, fixed)
        val_acc[e] = accuracy(out.y_hat, dataset.y, split.validation)
        test_acc[e] = accuracy(out.y_hat, dataset.y, split.test)
        s_size[e] = dec.s.size
        phase[e] = state.current_phase

    best_epoch = int(np.argmax(val_acc))
    at_best = float(test_acc[best_epoch])
    final = float(test_acc[-1])
    selected = at_best if cfg.model_selection == "best_val" else final
    si_acc = (
        None
        if side_info.source == "none"
        else float(np.mean(side_info.y_s == dataset.y))
    )
    return RunMetrics(
        loss=loss,
        train_acc=train_acc,
        val_acc=val_acc,
        test_acc=test_acc,
        s_size=s_size,
        phase=phase,
        best_epoch=best_epoch,
        test_acc_at_best_val=at_best,
        final_test_acc=final,
        selected_test_acc=selected,
        side_info_accuracy=si_acc,
    )


def train_gcn_baseline(dataset: LabeledDataset, cfg: ExperimentConfig, seed) -> RunMetrics:
    """Plain GCN: the training set stays the fixed nodes with their true
    labels for every epoch. Implemented as the side-info loop with the
    switch epoch pushed past the horizon, so the trajectories coincide
    bit for bit."""
    dummy = SideInfo(np.zeros(dataset.n, dtype=np.int64), source="none")
    eff = replace(cfg, decision=replace(cfg.decision, e_u=cfg.max_epochs), baseline=True)
    return train_gcn_si(dataset, dummy, eff, seed)


def run_single(
    dataset: LabeledDataset,
    cfg: ExperimentConfig,
    seed: int,
    external_si: SideInfo | None = None,
) -> RunMetrics:
    """One seeded run: build side info (if any), optionally embed it into
    the features, then train."""
    si_seed, init_seed = derive_seeds((seed, 1), 2)
    kind = cfg.si_kind
    if cfg.baseline and not cfg.embed_si_in_features:
        kind = "none"  # side info would be unused; skip building it

    si: SideInfo | None = None
    if kind == "synthetic":
        si = noisy_side_info(dataset.y, dataset.k, cfg.alpha, si_seed)
    elif kind == "extract":
        si = extract_side_info(dataset, cfg.recovery, si_seed)
    elif kind == "external":
        if external_si is None:
            raise ValueError("si_kind 'external' requires a side-info vector")
        if external_si.y_s.shape[0] != dataset.n:
            raise ValueError("external side info length != node count")
        si = external_si

    ds = dataset
    if cfg.embed_si_in_features:
        if si is None:
            raise ValueError("embedding requires a side-information source")
        x = embed_side_info(ds.x, si, ds.k, identity_features=ds.x is None)
        ds = replace(ds, x=x)

    if cfg.baseline:
        eff = replace(cfg, decision=replace(cfg.decision, e_u=cfg.max_epochs))
        metrics = train_gcn_si(
            ds, si if si is not None else SideInfo(np.zeros(ds.n, dtype=np.int64), "none"), eff, init_seed
        )
        if si is None:
            metrics.side_info_accuracy = None
    else:
        if si is None:
            raise ValueError("side-info training requires a source; set baseline=True for plain GCN")
        metrics = train_gcn_si(ds, si, cfg, init_seed)
    metrics.seed = seed
    return metrics


DatasetSupplier = Union[LabeledDataset, Callable[[int], LabeledDataset]]


def aggregate_runs(
    dataset_for_seed: DatasetSupplier,
    cfg: ExperimentConfig,
    external_si: SideInfo | None = None,
) -> RunSummary:
    """Run cfg.runs seeded repetitions (seeds base_seed + i) and summarize
    the selected test accuracies."""
    metrics = []
    for i in range(cfg.runs):
        seed = cfg.base_seed + i
        ds = dataset_for_seed(seed) if callable(dataset_for_seed) else dataset_for_seed
        metrics.append(run_single(ds, cfg, seed, external_si))
    accs = np.array([m.selected_test_acc for m in metrics])
    si_accs = [m.side_info_accuracy for m in metrics if m.side_info_accuracy is not None]
    return RunSummary(
        metrics=metrics,
        mean=float(accs.mean()),
        std=float(accs.std()),
        min=float(accs.min()),
        max=float(accs.max()),
        side_info_accuracy_mean=float(np.mean(si_accs)) if si_accs else None,
    )


def sbm_dataset_supplier(
    n: int = 2000,
    k: int = 3,
    p: float | None = None,
    q: float | None = None,
    name: str | None = None,
    per_class: int = 20,
    val_size: int = 500,
    test_size: int = 1000,
) -> Callable[[int], LabeledDataset]:
    """Fresh SBM realization plus split for every run seed."""
    if p is None or q is None:
        auto_p, auto_q = sbm_auto_edge_probs(n)
        p = auto_p if p is None else p
        q = auto_q if q is None else q
    label = name or f"{k}-sbm"

    def make(seed: int) -> LabeledDataset:
        graph_seed, split_seed = derive_seeds((seed, 0), 2)
        graph, y = sbm_generate(SbmParams(n=n, k=k, p=p, q=q, seed=graph_seed))
        split = split_sample(
            y, k, split_seed, per_class=per_class, val_size=val_size, test_size=test_size
        )
        return LabeledDataset(graph=graph, x=None, y=y, split=split, k=k, name=label)

    return make


def resplit_dataset_supplier(dataset: LabeledDataset) -> Callable[[int], LabeledDataset]:
    """Fixed graph and labels; the split is kept if present, else freshly
    sampled per run seed."""

    def make(seed: int) -> LabeledDataset:
        if dataset.split is not None:
            return dataset
        _, split_seed = derive_seeds((seed, 0), 2)
        split = split_sample(dataset.y, dataset.k, split_seed)
        return replace(dataset, split=split)

    return make
