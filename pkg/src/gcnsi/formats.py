"""Line-oriented text formats for datasets, side info, and experiment
configs, plus config resolution against per-dataset defaults.

Dataset file layout (sections in this order):

    nodes <n> classes <k> features <m>
    edge <i> <j>          (any count)
    label <i> <c>         (exactly one per node)
    feature <i> <v0> ...  (m values; exactly one per node when m > 0)
    split train|val|test <i>   (optional, disjoint)

Side-info file:

    sideinfo <n> <k> source <tag>
    si <i> <c>            (exactly one per node)

Config file: `key = value` per line, `#` comments and blank lines ignored,
unknown or duplicate keys rejected.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .data import LabeledDataset, NodeSplit, SideInfo
from .decision import DecisionConfig
from .experiment import ExperimentConfig
from .graph import Graph
from .recovery import RecoveryConfig


class FormatError(ValueError):
    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


def _int(tok: str, line: int, what: str) -> int:
    try:
        return int(tok)
    except ValueError:
        raise FormatError(line, f"{what} is not an integer: {tok!r}") from None


def _float(tok: str, line: int, what: str) -> float:
    try:
        return float(tok)
    except ValueError:
        raise FormatError(line, f"{what} is not a number: {tok!r}") from None


# ---------------------------------------------------------------------------
# dataset files
# ---------------------------------------------------------------------------

_SECTION_RANK = {"edge": 1, "label": 2, "feature": 3, "split": 4}


def write_dataset(dataset: LabeledDataset, path) -> None:
    m = 0 if dataset.x is None else dataset.x.shape[1]
    lines = [f"nodes {dataset.n} classes {dataset.k} features {m}"]
    for i, j in dataset.graph.edges:
        lines.append(f"edge {i} {j}")
    for i, c in enumerate(dataset.y):
        lines.append(f"label {i} {c}")
    if dataset.x is not None:
        for i in range(dataset.n):
            vals = " ".join(repr(float(v)) for v in dataset.x[i])
            lines.append(f"feature {i} {vals}")
    if dataset.split is not None:
        for tag, idx in (
            ("train", dataset.split.train),
            ("val", dataset.split.validation),
            ("test", dataset.split.test),
        ):
            for i in idx:
                lines.append(f"split {tag} {i}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def parse_dataset(path) -> LabeledDataset:
    path = Path(path)
    lines = path.read_text(encoding="utf-8").splitlines()

    header_line = None
    n = k = m = 0
    for line_no, raw in enumerate(lines, start=1):
        if raw.strip():
            toks = raw.split()
            if len(toks) != 6 or toks[0] != "nodes" or toks[2] != "classes" or toks[4] != "features":
                raise FormatError(line_no, "expected header 'nodes <n> classes <k> features <m>'")
            n = _int(toks[1], line_no, "node count")
            k = _int(toks[3], line_no, "class count")
            m = _int(toks[5], line_no, "feature count")
            if n < 1 or k < 1 or m < 0:
                raise FormatError(line_no, "header counts out of range")
            header_line = line_no
            break
    if header_line is None:
        raise FormatError(1, "empty dataset file")

    edges: list[tuple[int, int]] = []
    edge_seen: set[tuple[int, int]] = set()
    labels = np.full(n, -1, dtype=np.int64)
    x = np.zeros((n, m)) if m > 0 else None
    feature_seen = np.zeros(n, dtype=bool)
    split_parts: dict[str, list[int]] = {"train": [], "val": [], "test": []}
    split_assigned: dict[int, int] = {}
    section = 0
    last_line = header_line

    for line_no, raw in enumerate(lines, start=1):
        if line_no <= header_line or not raw.strip():
            continue
        last_line = line_no
        toks = raw.split()
        kind = toks[0]
        rank = _SECTION_RANK.get(kind)
        if rank is None:
            raise FormatError(line_no, f"unknown directive {kind!r}")
        if rank < section:
            raise FormatError(line_no, f"{kind!r} line out of section order")
        section = rank

        if kind == "edge":
            if len(toks) != 3:
                raise FormatError(line_no, "expected 'edge <i> <j>'")
            i = _int(toks[1], line_no, "edge endpoint")
            j = _int(toks[2], line_no, "edge endpoint")
            if not (0 <= i < n and 0 <= j < n):
                raise FormatError(line_no, f"edge endpoint out of range 0..{n - 1}")
            if i == j:
                raise FormatError(line_no, f"self-loop on node {i}")
            key = (min(i, j), max(i, j))
            if key in edge_seen:
                raise FormatError(line_no, f"duplicate edge {key}")
            edge_seen.add(key)
            edges.append(key)
        elif kind == "label":
            if len(toks) != 3:
                raise FormatError(line_no, "expected 'label <i> <c>'")
            i = _int(toks[1], line_no, "node index")
            c = _int(toks[2], line_no, "class index")
            if not 0 <= i < n:
                raise FormatError(line_no, f"node index out of range 0..{n - 1}")
            if not 0 <= c < k:
                raise FormatError(line_no, f"class index out of range 0..{k - 1}")
            if labels[i] != -1:
                raise FormatError(line_no, f"duplicate label for node {i}")
            labels[i] = c
        elif kind == "feature":
            if m == 0:
                raise FormatError(line_no, "feature line but header declares 0 features")
            if len(toks) != 2 + m:
                raise FormatError(line_no, f"expected {m} feature values")
            i = _int(toks[1], line_no, "node index")
            if not 0 <= i < n:
                raise FormatError(line_no, f"node index out of range 0..{n - 1}")
            if feature_seen[i]:
                raise FormatError(line_no, f"duplicate feature row for node {i}")
            feature_seen[i] = True
            x[i] = [_float(t, line_no, "feature value") for t in toks[2:]]
        else:  # split
            if len(toks) != 3 or toks[1] not in split_parts:
                raise FormatError(line_no, "expected 'split train|val|test <i>'")
            i = _int(toks[2], line_no, "node index")
            if not 0 <= i < n:
                raise FormatError(line_no, f"node index out of range 0..{n - 1}")
            if i in split_assigned:
                raise FormatError(line_no, f"node {i} already assigned to a split")
            split_assigned[i] = line_no
            split_parts[toks[1]].append(i)

    missing = np.flatnonzero(labels == -1)
    if missing.size:
        raise FormatError(last_line, f"missing label for {missing.size} nodes (first: {missing[0]})")
    if m > 0 and not feature_seen.all():
        first = int(np.flatnonzero(~feature_seen)[0])
        raise FormatError(last_line, f"missing feature row for node {first}")

    split = None
    if split_assigned:
        split = NodeSplit(
            train=np.array(split_parts["train"], dtype=np.int64),
            validation=np.array(split_parts["val"], dtype=np.int64),
            test=np.array(split_parts["test"], dtype=np.int64),
        )
    return LabeledDataset(
        graph=Graph(n, edges), x=x, y=labels, split=split, k=k, name=path.stem
    )


# ---------------------------------------------------------------------------
# side-info files
# ---------------------------------------------------------------------------

def write_side_info(si: SideInfo, k: int, path) -> None:
    n = si.y_s.shape[0]
    lines = [f"sideinfo {n} {k} source {si.source}"]
    for i, c in enumerate(si.y_s):
        lines.append(f"si {i} {c}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def parse_side_info(path) -> tuple[SideInfo, int]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    header = None
    n = k = 0
    source = ""
    for line_no, raw in enumerate(lines, start=1):
        if raw.strip():
            toks = raw.split()
            if len(toks) != 5 or toks[0] != "sideinfo" or toks[3] != "source":
                raise FormatError(line_no, "expected header 'sideinfo <n> <k> source <tag>'")
            n = _int(toks[1], line_no, "node count")
            k = _int(toks[2], line_no, "class count")
            source = toks[4]
            if n < 1 or k < 1:
                raise FormatError(line_no, "header counts out of range")
            header = line_no
            break
    if header is None:
        raise FormatError(1, "empty side-info file")

    y_s = np.full(n, -1, dtype=np.int64)
    last = header
    for line_no, raw in enumerate(lines, start=1):
        if line_no <= header or not raw.strip():
            continue
        last = line_no
        toks = raw.split()
        if len(toks) != 3 or toks[0] != "si":
            raise FormatError(line_no, "expected 'si <i> <c>'")
        i = _int(toks[1], line_no, "node index")
        c = _int(toks[2], line_no, "class index")
        if not 0 <= i < n:
            raise FormatError(line_no, f"node index out of range 0..{n - 1}")
        if not 0 <= c < k:
            raise FormatError(line_no, f"class index out of range 0..{k - 1}")
        if y_s[i] != -1:
            raise FormatError(line_no, f"duplicate entry for node {i}")
        y_s[i] = c
    missing = np.flatnonzero(y_s == -1)
    if missing.size:
        raise FormatError(last, f"missing side info for {missing.size} nodes (first: {missing[0]})")
    return SideInfo(y_s=y_s, source=source), k


# ---------------------------------------------------------------------------
# config files
# ---------------------------------------------------------------------------

# Per-dataset default hyperparameter columns.
DATASET_DEFAULTS: dict[str, dict] = {
    "ksbm": dict(
        p_th=0.50, f_th=0.50, e_u=150, hidden_size=16, max_epochs=300,
        l2_factor=5e-5, lr_phase1=0.01, lr_phase2=0.01,
        recovery_classifier="gcn", recovery_input="neighborhood", recovery_r=1,
    ),
    "cora": dict(
        p_th=0.55, f_th=0.99, e_u=50, hidden_size=128, max_epochs=250,
        l2_factor=8e-5, lr_phase1=0.01, lr_phase2=0.005,
        recovery_classifier="mlp", recovery_input="neighborhood", recovery_r=4,
    ),
    "citeseer": dict(
        p_th=0.80, f_th=0.80, e_u=80, hidden_size=128, max_epochs=200,
        l2_factor=8e-5, lr_phase1=0.01, lr_phase2=0.05,
        recovery_classifier="mlp", recovery_input="feature", recovery_r=1,
    ),
    "pubmed": dict(
        p_th=0.70, f_th=1.00, e_u=80, hidden_size=64, max_epochs=200,
        l2_factor=4e-4, lr_phase1=0.01, lr_phase2=0.002,
        recovery_classifier="mlp", recovery_input="neighborhood", recovery_r=1,
    ),
}

_FLOAT_KEYS = {
    "p_th", "f_th", "lr_phase1", "lr_phase2", "l2_factor", "alpha",
    "recovery_lr", "recovery_l2", "adam_beta1", "adam_beta2", "adam_epsilon",
}
_INT_KEYS = {
    "e_u", "max_epochs", "hidden_size", "runs", "base_seed",
    "recovery_r", "recovery_epochs", "recovery_hidden",
}
_BOOL_KEYS = {"embed_si_in_features", "baseline"}
_ENUM_KEYS = {
    "dataset": tuple(DATASET_DEFAULTS),
    "si_kind": ("none", "extract", "synthetic", "external"),
    "recovery_classifier": ("mlp", "gcn"),
    "recovery_input": ("feature", "neighborhood", "both"),
    "model_selection": ("best_val", "final"),
}
CONFIG_KEYS = _FLOAT_KEYS | _INT_KEYS | _BOOL_KEYS | set(_ENUM_KEYS)


def parse_config(path) -> list[tuple[int, str, str]]:
    """Raw `key = value` entries with line numbers; validation happens in
    resolve_config."""
    entries = []
    for line_no, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise FormatError(line_no, "expected 'key = value'")
        key, _, value = stripped.partition("=")
        key = key.strip()
        value = value.strip()
        if not key or not value:
            raise FormatError(line_no, "expected 'key = value'")
        entries.append((line_no, key, value))
    return entries


def _parse_value(key: str, value: str, line_no: int):
    if key in _FLOAT_KEYS:
        return _float(value, line_no, key)
    if key in _INT_KEYS:
        return _int(value, line_no, key)
    if key in _BOOL_KEYS:
        low = value.lower()
        if low not in ("true", "false"):
            raise FormatError(line_no, f"{key} must be true or false")
        return low == "true"
    choices = _ENUM_KEYS[key]
    if value not in choices:
        raise FormatError(line_no, f"{key} must be one of {choices}")
    return value


def resolve_config(
    entries: list[tuple[int, str, str]] | None = None,
    overrides: dict | None = None,
) -> tuple[ExperimentConfig, dict]:
    """Build an ExperimentConfig from file entries plus programmatic
    overrides (which win). Returns the config and the fully-resolved flat
    key/value echo used for reproducibility records.

    Defaults come from the selected dataset column (dataset key, default
    "ksbm"); recovery training hyperparameters default to the main model's
    values for the same dataset.
    """
    values: dict = {}
    for line_no, key, value in entries or []:
        if key not in CONFIG_KEYS:
            raise FormatError(line_no, f"unknown config key {key!r}")
        if key in values:
            raise FormatError(line_no, f"duplicate config key {key!r}")
        values[key] = _parse_value(key, value, line_no)
    for key, value in (overrides or {}).items():
        if key not in CONFIG_KEYS:
            raise ValueError(f"unknown config key {key!r}")
        if value is not None:
            values[key] = value

    dataset = values.get("dataset", "ksbm")
    resolved = dict(DATASET_DEFAULTS[dataset])
    resolved.update(
        dataset=dataset,
        si_kind="extract",
        alpha=None,
        embed_si_in_features=False,
        baseline=False,
        runs=10,
        base_seed=0,
        adam_beta1=0.9,
        adam_beta2=0.999,
        adam_epsilon=1e-8,
        model_selection="best_val",
    )
    # Recovery trainer defaults mirror the main model for the same dataset.
    resolved.setdefault("recovery_epochs", resolved["max_epochs"])
    resolved.setdefault("recovery_lr", resolved["lr_phase1"])
    resolved.setdefault("recovery_hidden", resolved["hidden_size"])
    resolved.setdefault("recovery_l2", resolved["l2_factor"])
    resolved.update(values)
    if "alpha" in values and "si_kind" not in values:
        resolved["si_kind"] = "synthetic"  # alpha alone implies the channel
    # A dataset column chosen in the same file may still re-default the
    # recovery trainer unless explicitly set.
    for rk, mk in (
        ("recovery_epochs", "max_epochs"),
        ("recovery_lr", "lr_phase1"),
        ("recovery_hidden", "hidden_size"),
        ("recovery_l2", "l2_factor"),
    ):
        if rk not in values:
            resolved[rk] = resolved[mk]

    cfg = ExperimentConfig(
        decision=DecisionConfig(
            p_th=resolved["p_th"], f_th=resolved["f_th"], e_u=resolved["e_u"]
        ),
        max_epochs=resolved["max_epochs"],
        lr_phase1=resolved["lr_phase1"],
        lr_phase2=resolved["lr_phase2"],
        l2_factor=resolved["l2_factor"],
        hidden_size=resolved["hidden_size"],
        si_kind=resolved["si_kind"],
        recovery=RecoveryConfig(
            classifier=resolved["recovery_classifier"],
            inputs=resolved["recovery_input"],
            r=resolved["recovery_r"],
            epochs=resolved["recovery_epochs"],
            lr=resolved["recovery_lr"],
            hidden=resolved["recovery_hidden"],
            l2=resolved["recovery_l2"],
        ),
        alpha=resolved["alpha"],
        embed_si_in_features=resolved["embed_si_in_features"],
        baseline=resolved["baseline"],
        runs=resolved["runs"],
        base_seed=resolved["base_seed"],
        adam_beta1=resolved["adam_beta1"],
        adam_beta2=resolved["adam_beta2"],
        adam_epsilon=resolved["adam_epsilon"],
        model_selection=resolved["model_selection"],
    )
    return cfg, resolved
