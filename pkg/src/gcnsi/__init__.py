"""Semi-supervised node classification with a two-layer GCN whose training
set is augmented from side information (graph-extracted or external)."""

from .data import LabeledDataset, NodeSplit, SideInfo, embed_side_info, one_hot, split_sample
from .decision import DecisionConfig, DecisionOutput, DecisionState, brute_force_s_oracle, decide
from .experiment import (
    ExperimentConfig,
    RunMetrics,
    RunSummary,
    aggregate_runs,
    run_single,
    sbm_dataset_supplier,
    train_gcn_baseline,
    train_gcn_si,
)
from .gcn import GcnModel, GcnOutput, gcn_backward, gcn_forward, gcn_train_epoch
from .graph import Graph, neighborhood_set, r_neighborhood_matrix, spmm, sym_normalize
from .nn import (
    AdamConfig,
    Parameter,
    adam_step,
    finite_difference_check,
    glorot_init,
    l2_penalty,
    masked_cross_entropy,
    relu,
    softmax_rows,
)
from .recovery import RecoveryConfig, extract_side_info, mlp_classify, side_info_accuracy
from .synth import SbmParams, noisy_side_info, sbm_auto_edge_probs, sbm_generate

__all__ = [
    "AdamConfig",
    "DecisionConfig",
    "DecisionOutput",
    "DecisionState",
    "ExperimentConfig",
    "GcnModel",
    "GcnOutput",
    "Graph",
    "LabeledDataset",
    "NodeSplit",
    "Parameter",
    "RecoveryConfig",
    "RunMetrics",
    "RunSummary",
    "SbmParams",
    "SideInfo",
    "adam_step",
    "aggregate_runs",
    "brute_force_s_oracle",
    "decide",
    "embed_side_info",
    "extract_side_info",
    "finite_difference_check",
    "gcn_backward",
    "gcn_forward",
    "gcn_train_epoch",
    "glorot_init",
    "l2_penalty",
    "masked_cross_entropy",
    "mlp_classify",
    "neighborhood_set",
    "noisy_side_info",
    "one_hot",
    "r_neighborhood_matrix",
    "relu",
    "run_single",
    "sbm_auto_edge_probs",
    "sbm_dataset_supplier",
    "sbm_generate",
    "side_info_accuracy",
    "softmax_rows",
    "split_sample",
    "spmm",
    "sym_normalize",
    "train_gcn_baseline",
    "train_gcn_si",
]
