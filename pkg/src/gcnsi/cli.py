"""Command-line interface: generate / extract / train / curves.

Normal output goes to stdout, diagnostics and errors to stderr; the process
exits nonzero on any failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
from pathlib import Path


from .data import LabeledDataset, split_sample
from .experiment import aggregate_runs, derive_seeds, resplit_dataset_supplier
from .formats import (
    parse_config,
    parse_dataset,
    parse_side_info,
    resolve_config,
    write_dataset,
    write_side_info,
)
from .recovery import RecoveryConfig, extract_side_info, side_info_accuracy
from .synth import SbmParams, sbm_auto_edge_probs, sbm_generate

logger = logging.getLogger("gcnsi")

METRIC_COLUMNS = ["epoch", "phase", "loss", "train_acc", "val_acc", "test_acc", "s_size"]
OUT_DIR_ENV = "GCNSI_OUT_DIR"


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gcnsi")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="write a synthetic block-model dataset file")
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--k", type=int, required=True)
    gen.add_argument("--auto", action="store_true", help="p = 5 ln(n)/n, q = ln(n)/n")
    gen.add_argument("--p", type=float)
    gen.add_argument("--q", type=float)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--with-split", action="store_true", help="also sample and write a node split")
    gen.add_argument("--out", required=True)

    ext = sub.add_parser("extract", help="extract side info from a dataset file")
    ext.add_argument("--dataset", required=True)
    ext.add_argument("--classifier", choices=["gcn", "mlp"], default="gcn")
    ext.add_argument("--input", choices=["feature", "neighborhood", "both"], default="neighborhood")
    ext.add_argument("--r", type=int, default=1)
    ext.add_argument("--epochs", type=int, default=300)
    ext.add_argument("--lr", type=float, default=0.01)
    ext.add_argument("--hidden", type=int, default=16)
    ext.add_argument("--l2", type=float, default=5e-5)
    ext.add_argument("--seed", type=int, default=0)
    ext.add_argument("--force", action="store_true", help="allow identity features as classifier input")
    ext.add_argument("--out", required=True)

    tr = sub.add_parser("train", help="run seeded training repetitions and write metrics")
    tr.add_argument("--dataset", required=True)
    tr.add_argument("--config", help="key = value config file")
    src = tr.add_mutually_exclusive_group()
    src.add_argument("--sideinfo", help="side-info file to use as external source")
    src.add_argument("--alpha", type=float, help="synthetic noisy-label side info with this accuracy")
    src.add_argument("--extract", action="store_true", help="extract side info per run")
    tr.add_argument("--baseline", action="store_true", help="plain GCN, no training-set augmentation")
    tr.add_argument("--embed-si", action="store_true", help="embed side info into the feature matrix")
    tr.add_argument("--runs", type=int)
    tr.add_argument("--base-seed", type=int)
    tr.add_argument("--out-dir", help=f"output directory (default ${OUT_DIR_ENV})")

    cur = sub.add_parser("curves", help="merge per-run metric CSVs into one long-format CSV")
    cur.add_argument("metrics", nargs="+", help="metrics_run<i>.csv files")
    cur.add_argument("--out", required=True)

    return parser


def cmd_generate(args) -> int:
    if args.k < 2:
        raise ValueError("--k must be at least 2")
    if args.auto and (args.p is not None or args.q is not None):
        raise ValueError("--auto conflicts with explicit --p/--q")
    if args.auto:
        p, q = sbm_auto_edge_probs(args.n)
    else:
        if args.p is None or args.q is None:
            raise ValueError("give --auto or both --p and --q")
        p, q = args.p, args.q
    graph, y = sbm_generate(SbmParams(n=args.n, k=args.k, p=p, q=q, seed=args.seed))
    split = None
    if args.with_split:
        split = split_sample(y, args.k, derive_seeds((args.seed, 2), 1)[0])
    ds = LabeledDataset(graph=graph, x=None, y=y, split=split, k=args.k, name="generated")
    write_dataset(ds, args.out)
    logger.info(
        "wrote %s: n=%d k=%d edges=%d p=%.6g q=%.6g", args.out, args.n, args.k,
        graph.num_edges, p, q,
    )
    return 0


def cmd_extract(args) -> int:
    ds = parse_dataset(args.dataset)
    if ds.split is None or ds.split.train.size == 0:
        raise ValueError(
            "dataset has no training split; regenerate with --with-split or add split lines"
        )
    if args.input in ("feature", "both") and ds.x is None and not args.force:
        raise ValueError("identity features carry no signal; pass --force to use them anyway")
    cfg = RecoveryConfig(
        classifier=args.classifier,
        inputs=args.input,
        r=args.r,
        epochs=args.epochs,
        lr=args.lr,
        hidden=args.hidden,
        l2=args.l2,
    )
    si = extract_side_info(ds, cfg, seed=args.seed)
    write_side_info(si, ds.k, args.out)
    if ds.split.validation.size:
        acc = side_info_accuracy(si, ds.y, ds.split.validation)
        logger.info("side-info accuracy on validation split: %.4f", acc)
    return 0


def _write_metrics_csv(path: Path, metrics) -> None:
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(METRIC_COLUMNS)
        for e in range(metrics.loss.shape[0]):
            writer.writerow(
                [
                    e,
                    int(metrics.phase[e]),
                    repr(float(metrics.loss[e])),
                    repr(float(metrics.train_acc[e])),
                    repr(float(metrics.val_acc[e])),
                    repr(float(metrics.test_acc[e])),
                    int(metrics.s_size[e]),
                ]
            )


def cmd_train(args) -> int:
    out_dir = args.out_dir or os.environ.get(OUT_DIR_ENV)
    if not out_dir:
        raise ValueError(f"give --out-dir or set ${OUT_DIR_ENV}")
    entries = parse_config(args.config) if args.config else []
    file_keys = {key for _, key, _ in entries}

    overrides: dict = {}
    if args.sideinfo:
        overrides["si_kind"] = "external"
    elif args.alpha is not None:
        overrides["si_kind"] = "synthetic"
        overrides["alpha"] = args.alpha
    elif args.extract:
        overrides["si_kind"] = "extract"
    if args.baseline:
        overrides["baseline"] = True
    if args.embed_si:
        overrides["embed_si_in_features"] = True
    if args.runs is not None:
        overrides["runs"] = args.runs
    if args.base_seed is not None:
        overrides["base_seed"] = args.base_seed

    has_cli_source = bool(args.sideinfo or args.alpha is not None or args.extract)
    has_file_source = bool(file_keys & {"si_kind", "alpha"})
    if not args.baseline and not has_cli_source and not has_file_source and not (
        "baseline" in file_keys
    ):
        raise ValueError(
            "choose a side-information source (--sideinfo, --alpha, or --extract) "
            "or pass --baseline"
        )

    cfg, echo = resolve_config(entries, overrides)

    ds = parse_dataset(args.dataset)
    external_si = None
    if args.sideinfo:
        external_si, si_k = parse_side_info(args.sideinfo)
        if si_k != ds.k:
            raise ValueError(f"side-info classes ({si_k}) != dataset classes ({ds.k})")
        if external_si.y_s.shape[0] != ds.n:
            raise ValueError("side-info length != dataset node count")
    if ds.split is None:
        logger.info("dataset has no split; sampling one per run seed")

    summary = aggregate_runs(resplit_dataset_supplier(ds), cfg, external_si)

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for i, m in enumerate(summary.metrics):
        _write_metrics_csv(out / f"metrics_run{i}.csv", m)
    payload = {
        "mean": summary.mean,
        "std": summary.std,
        "min": summary.min,
        "max": summary.max,
        "side_info_accuracy": summary.side_info_accuracy_mean,
        "dataset": ds.name,
        "config": echo,
        "runs": [
            {
                "seed": m.seed,
                "best_epoch": m.best_epoch,
                "test_acc_at_best_val": m.test_acc_at_best_val,
                "final_test_acc": m.final_test_acc,
                "selected_test_acc": m.selected_test_acc,
                "side_info_accuracy": m.side_info_accuracy,
            }
            for m in summary.metrics
        ],
    }
    (out / "summary.json").write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    print(f"test accuracy: mean {summary.mean:.4f} std {summary.std:.4f} over {cfg.runs} runs")
    return 0


def cmd_curves(args) -> int:
    rows = []
    for run_id, path in enumerate(args.metrics):
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames != METRIC_COLUMNS:
                raise ValueError(f"{path}: unexpected columns {reader.fieldnames}")
            for record in reader:
                if any(record.get(c) in (None, "") for c in METRIC_COLUMNS):
                    raise ValueError(f"{path}: malformed row {record}")
                rows.append([run_id] + [record[c] for c in METRIC_COLUMNS])
    with open(args.out, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["run"] + METRIC_COLUMNS)
        writer.writerows(rows)
    return 0


_COMMANDS = {
    "generate": cmd_generate,
    "extract": cmd_extract,
    "train": cmd_train,
    "curves": cmd_curves,
}


def main(argv=None) -> int:
    logging.basicConfig(
        level=logging.INFO, format="%(levelname)s %(message)s", stream=sys.stderr
    )
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ValueError, OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
