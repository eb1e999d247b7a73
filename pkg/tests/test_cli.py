import csv
import json

import numpy as np
import pytest

from gcnsi.cli import main
from gcnsi.data import LabeledDataset, NodeSplit
from gcnsi.formats import parse_dataset, parse_side_info, write_dataset
from gcnsi.synth import SbmParams, sbm_generate


@pytest.fixture
def toy_dataset_file(tmp_path):
    """Small block-model dataset with an explicit split, for fast train runs."""
    g, y = sbm_generate(SbmParams(n=200, k=2, p=0.2, q=0.02, seed=0))
    rng = np.random.default_rng(1)
    order = rng.permutation(200)
    split = NodeSplit(train=order[:20], validation=order[20:60], test=order[60:160])
    ds = LabeledDataset(graph=g, x=None, y=y, split=split, k=2, name="toy")
    path = tmp_path / "toy.txt"
    write_dataset(ds, path)
    return path


@pytest.fixture
def fast_config_file(tmp_path):
    path = tmp_path / "fast.cfg"
    path.write_text(
        "max_epochs = 30\ne_u = 15\nhidden_size = 8\nruns = 2\n"
        "recovery_epochs = 40\nrecovery_hidden = 8\n"
    )
    return path


class TestGenerate:
    def test_writes_parseable_file(self, tmp_path, capsys):
        out = tmp_path / "g.txt"
        rc = main(["generate", "--n", "300", "--k", "3", "--auto", "--seed", "1",
                   "--out", str(out)])
        assert rc == 0
        ds = parse_dataset(out)
        assert ds.n == 300 and ds.k == 3 and ds.x is None and ds.split is None
        assert out.read_text().splitlines()[0] == "nodes 300 classes 3 features 0"

    def test_with_split(self, tmp_path):
        out = tmp_path / "g.txt"
        rc = main(["generate", "--n", "2000", "--k", "3", "--auto", "--seed", "1",
                   "--with-split", "--out", str(out)])
        assert rc == 0
        ds = parse_dataset(out)
        assert ds.split.train.size == 60
        assert ds.split.validation.size == 500

    def test_k_one_is_error(self, tmp_path, capsys):
        rc = main(["generate", "--n", "10", "--k", "1", "--auto",
                   "--out", str(tmp_path / "g.txt")])
        assert rc != 0
        assert "error" in capsys.readouterr().err

    def test_needs_probabilities(self, tmp_path, capsys):
        rc = main(["generate", "--n", "10", "--k", "2", "--out", str(tmp_path / "g.txt")])
        assert rc != 0

    def test_auto_conflicts_with_explicit(self, tmp_path, capsys):
        rc = main(["generate", "--n", "10", "--k", "2", "--auto", "--p", "0.5",
                   "--q", "0.1", "--out", str(tmp_path / "g.txt")])
        assert rc != 0

    def test_deterministic(self, tmp_path):
        a, b = tmp_path / "a.txt", tmp_path / "b.txt"
        args = ["generate", "--n", "100", "--k", "2", "--auto", "--seed", "5"]
        assert main(args + ["--out", str(a)]) == 0
        assert main(args + ["--out", str(b)]) == 0
        assert a.read_text() == b.read_text()


class TestExtract:
    def test_writes_side_info(self, tmp_path, toy_dataset_file, capsys):
        out = tmp_path / "si.txt"
        rc = main(["extract", "--dataset", str(toy_dataset_file), "--classifier", "gcn",
                   "--input", "neighborhood", "--r", "1", "--epochs", "40",
                   "--hidden", "8", "--out", str(out)])
        assert rc == 0
        si, k = parse_side_info(out)
        assert k == 2 and si.y_s.shape == (200,)
        assert si.source == "extracted-from-A_r"

    def test_identity_features_guard(self, tmp_path, toy_dataset_file, capsys):
        rc = main(["extract", "--dataset", str(toy_dataset_file), "--input", "feature",
                   "--out", str(tmp_path / "si.txt")])
        assert rc != 0
        assert "identity features carry no signal" in capsys.readouterr().err

    def test_force_allows_identity_features(self, tmp_path, toy_dataset_file):
        out = tmp_path / "si.txt"
        rc = main(["extract", "--dataset", str(toy_dataset_file), "--classifier", "mlp",
                   "--input", "feature", "--force", "--epochs", "10", "--hidden", "4",
                   "--out", str(out)])
        assert rc == 0
        si, _ = parse_side_info(out)
        assert si.source == "extracted-from-X"

    def test_missing_dataset_file(self, tmp_path, capsys):
        rc = main(["extract", "--dataset", str(tmp_path / "nope.txt"),
                   "--out", str(tmp_path / "si.txt")])
        assert rc != 0
        assert "nope.txt" in capsys.readouterr().err

    def test_requires_split(self, tmp_path, capsys):
        g, y = sbm_generate(SbmParams(n=50, k=2, p=0.3, q=0.05, seed=0))
        path = tmp_path / "nosplit.txt"
        write_dataset(LabeledDataset(graph=g, x=None, y=y, split=None, k=2), path)
        rc = main(["extract", "--dataset", str(path), "--out", str(tmp_path / "si.txt")])
        assert rc != 0
        assert "split" in capsys.readouterr().err


class TestTrain:
    def test_baseline_writes_metrics_and_summary(self, tmp_path, toy_dataset_file,
                                                 fast_config_file, capsys):
        out_dir = tmp_path / "out"
        rc = main(["train", "--dataset", str(toy_dataset_file),
                   "--config", str(fast_config_file), "--baseline",
                   "--out-dir", str(out_dir)])
        assert rc == 0
        assert (out_dir / "metrics_run0.csv").exists()
        assert (out_dir / "metrics_run1.csv").exists()
        with (out_dir / "metrics_run0.csv").open() as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == 30
        assert list(rows[0]) == ["epoch", "phase", "loss", "train_acc", "val_acc",
                                 "test_acc", "s_size"]
        summary = json.loads((out_dir / "summary.json").read_text())
        assert summary["config"]["max_epochs"] == 30
        assert summary["config"]["baseline"] is True
        assert len(summary["runs"]) == 2
        assert 0.0 <= summary["mean"] <= 1.0
        assert "mean" in capsys.readouterr().out

    def test_synthetic_side_info(self, tmp_path, toy_dataset_file, fast_config_file):
        out_dir = tmp_path / "out"
        rc = main(["train", "--dataset", str(toy_dataset_file),
                   "--config", str(fast_config_file), "--alpha", "0.9",
                   "--runs", "1", "--out-dir", str(out_dir)])
        assert rc == 0
        summary = json.loads((out_dir / "summary.json").read_text())
        assert summary["side_info_accuracy"] is not None
        assert summary["config"]["alpha"] == 0.9
        assert summary["config"]["si_kind"] == "synthetic"

    def test_external_side_info(self, tmp_path, toy_dataset_file, fast_config_file):
        si_path = tmp_path / "si.txt"
        rc = main(["extract", "--dataset", str(toy_dataset_file), "--epochs", "30",
                   "--hidden", "8", "--out", str(si_path)])
        assert rc == 0
        out_dir = tmp_path / "out"
        rc = main(["train", "--dataset", str(toy_dataset_file),
                   "--config", str(fast_config_file), "--sideinfo", str(si_path),
                   "--runs", "1", "--out-dir", str(out_dir)])
        assert rc == 0

    def test_per_run_extraction(self, tmp_path, toy_dataset_file, fast_config_file):
        out_dir = tmp_path / "out"
        rc = main(["train", "--dataset", str(toy_dataset_file),
                   "--config", str(fast_config_file), "--extract",
                   "--runs", "1", "--out-dir", str(out_dir)])
        assert rc == 0
        summary = json.loads((out_dir / "summary.json").read_text())
        assert summary["config"]["si_kind"] == "extract"
        assert summary["side_info_accuracy"] is not None

    def test_alpha_and_sideinfo_conflict(self, tmp_path, toy_dataset_file, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["train", "--dataset", str(toy_dataset_file), "--alpha", "0.7",
                  "--sideinfo", str(tmp_path / "si.txt"), "--out-dir", str(tmp_path)])
        assert exc.value.code != 0
        assert "not allowed" in capsys.readouterr().err

    def test_requires_si_source(self, tmp_path, toy_dataset_file, capsys):
        rc = main(["train", "--dataset", str(toy_dataset_file),
                   "--out-dir", str(tmp_path / "out")])
        assert rc != 0
        assert "side-information source" in capsys.readouterr().err

    def test_out_dir_from_environment(self, tmp_path, toy_dataset_file,
                                      fast_config_file, monkeypatch):
        out_dir = tmp_path / "envout"
        monkeypatch.setenv("GCNSI_OUT_DIR", str(out_dir))
        rc = main(["train", "--dataset", str(toy_dataset_file),
                   "--config", str(fast_config_file), "--baseline", "--runs", "1"])
        assert rc == 0
        assert (out_dir / "summary.json").exists()

    def test_no_out_dir_anywhere(self, tmp_path, toy_dataset_file, capsys, monkeypatch):
        monkeypatch.delenv("GCNSI_OUT_DIR", raising=False)
        rc = main(["train", "--dataset", str(toy_dataset_file), "--baseline"])
        assert rc != 0

    def test_embed_si_flag(self, tmp_path, toy_dataset_file, fast_config_file):
        out_dir = tmp_path / "out"
        rc = main(["train", "--dataset", str(toy_dataset_file),
                   "--config", str(fast_config_file), "--alpha", "0.3",
                   "--embed-si", "--baseline", "--runs", "1",
                   "--out-dir", str(out_dir)])
        assert rc == 0
        summary = json.loads((out_dir / "summary.json").read_text())
        assert summary["config"]["embed_si_in_features"] is True


class TestCurves:
    def make_metrics(self, tmp_path, toy_dataset_file, fast_config_file):
        out_dir = tmp_path / "runs"
        main(["train", "--dataset", str(toy_dataset_file),
              "--config", str(fast_config_file), "--baseline", "--out-dir", str(out_dir)])
        return [out_dir / "metrics_run0.csv", out_dir / "metrics_run1.csv"]

    def test_merges_runs(self, tmp_path, toy_dataset_file, fast_config_file):
        paths = self.make_metrics(tmp_path, toy_dataset_file, fast_config_file)
        out = tmp_path / "curves.csv"
        rc = main(["curves", str(paths[0]), str(paths[1]), "--out", str(out)])
        assert rc == 0
        with out.open() as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == 60
        assert {r["run"] for r in rows} == {"0", "1"}

    def test_single_run_passthrough(self, tmp_path, toy_dataset_file, fast_config_file):
        paths = self.make_metrics(tmp_path, toy_dataset_file, fast_config_file)
        out = tmp_path / "curves.csv"
        assert main(["curves", str(paths[0]), "--out", str(out)]) == 0
        with paths[0].open() as fh:
            original = list(csv.DictReader(fh))
        with out.open() as fh:
            merged = list(csv.DictReader(fh))
        assert len(merged) == len(original)
        assert merged[0]["loss"] == original[0]["loss"]

    def test_missing_input(self, tmp_path, capsys):
        rc = main(["curves", str(tmp_path / "nope.csv"), "--out", str(tmp_path / "o.csv")])
        assert rc != 0

    def test_malformed_columns(self, tmp_path, capsys):
        bad = tmp_path / "bad.csv"
        bad.write_text("epoch,loss\n0,1.0\n")
        rc = main(["curves", str(bad), "--out", str(tmp_path / "o.csv")])
        assert rc != 0
        assert "unexpected columns" in capsys.readouterr().err
