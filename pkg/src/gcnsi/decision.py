"""Per-epoch training-set selection: merge side information with the
network's current predictions.

Before the switch epoch e_u the training set is just the fixed labeled
nodes. From e_u on, whenever the prediction accuracy on the fixed nodes
reaches f_th, the set becomes (confident nodes ∩ agreeing nodes) plus the
fixed nodes, and is saved; when accuracy dips below f_th the last saved set
is reused.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

logger = logging.getLogger(__name__)


@dataclass
class DecisionConfig:
    p_th: float   # confidence threshold on the max class probability
    f_th: float   # accuracy threshold on the fixed training nodes
    e_u: int      # first epoch at which augmentation may start

    def __post_init__(self):
        if not 0.0 < self.p_th <= 1.0:
            raise ValueError("p_th must lie in (0, 1]")
        if not 0.0 < self.f_th <= 1.0:
            raise ValueError("f_th must lie in (0, 1]")
        if self.e_u < 0:
            raise ValueError("e_u must be nonnegative")


@dataclass
class DecisionState:
    """Mutable bookkeeping owned by a single training loop."""

    saved_s: np.ndarray | None = None
    current_phase: int = 1
    fallback_count: int = 0


@dataclass
class DecisionOutput:
    y_s_hat: np.ndarray  # side info with the fixed training labels embedded
    y_hat: np.ndarray    # argmax predictions
    s: np.ndarray        # sorted training index set for this epoch


def decide(
    z: np.ndarray,
    y_s,
    fixed_train: np.ndarray,
    true_train_labels: np.ndarray,
    epoch: int,
    cfg: DecisionConfig,
    state: DecisionState,
) -> DecisionOutput:
    """Select this epoch's training set from predictions and side info.

    z is the n x k row-stochastic prediction matrix; y_s the side-info
    labels (a SideInfo or a plain array). Only the labels of the fixed
    training nodes are consulted, never the rest of the ground truth.
    """
    ys = np.asarray(getattr(y_s, "y_s", y_s), dtype=np.int64)
    fixed_train = np.asarray(fixed_train, dtype=np.int64)
    if fixed_train.size == 0:
        raise ValueError("fixed training set must be nonempty")

    y_s_hat = ys.copy()
    y_s_hat[fixed_train] = true_train_labels
    y_hat = np.argmax(z, axis=1)
    f = float(np.mean(y_hat[fixed_train] == true_train_labels))

    if epoch < cfg.e_u:
        state.current_phase = 1
        s = fixed_train.copy()
    else:
        state.current_phase = 2
        if f >= cfg.f_th:
            confident = np.flatnonzero(z.max(axis=1) >= cfg.p_th)
            agreeing = np.flatnonzero(y_s_hat == y_hat)
            s = np.union1d(np.intersect1d(confident, agreeing), fixed_train)
            state.saved_s = s
        elif state.saved_s is not None:
            s = state.saved_s.copy()
        else:
            # Accuracy gate failed at the very first augmentation epoch and
            # nothing has been saved yet; stay on the fixed nodes.
            state.fallback_count += 1
            logger.debug(
                "no saved training set at epoch %d (accuracy %.3f < %.3f); "
                "falling back to the fixed nodes",
                epoch,
                f,
                cfg.f_th,
            )
            s = fixed_train.copy()

    return DecisionOutput(y_s_hat=y_s_hat, y_hat=y_hat, s=s)


def brute_force_s_oracle(
    z: np.ndarray, y_s_hat: np.ndarray, fixed_train, p_th: float
) -> np.ndarray:
    """Literal re-derivation of the augmented set by plain Python scanning.

    Test oracle only: independent of the vectorized path in decide.
    """
    n, k = z.shape
    confident = set()
    agreeing = set()
    for i in range(n):
        best_j = 0
        best_v = z[i][0]
        for j in range(1, k):
            if z[i][j] > best_v:
                best_v = z[i][j]
                best_j = j
        if best_v >= p_th:
            confident.add(i)
        if best_j == int(y_s_hat[i]):
            agreeing.add(i)
    s = (confident & agreeing) | {int(i) for i in fixed_train}
    return np.array(sorted(s), dtype=np.int64)
