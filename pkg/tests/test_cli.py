import json
import subprocess
import sys
import time

import pytest

from factoidlink.cli import main


def run_synth(out_dir, n=30, seed=5, extra=()):
    return main([
        "synth", "--n", str(n), "--mean-degree", "4", "--overlap-frac", "0.9",
        "--name-noise", "0.2", "--feature-dim", "6", "--seed", str(seed),
        "--out-dir", str(out_dir), *extra,
    ])


def pipeline_args(data_dir, out_dir, epochs=150, seed=9, extra=()):
    return [
        "pipeline",
        "--source-users", str(data_dir / "source_users.jsonl"),
        "--source-edges", str(data_dir / "source_edges.csv"),
        "--target-users", str(data_dir / "target_users.jsonl"),
        "--target-edges", str(data_dir / "target_edges.csv"),
        "--truth", str(data_dir / "truth.csv"),
        "--preds", "username,image",
        "--dim-obj", "16", "--dim-user", "32", "--neg", "3",
        "--epochs", str(epochs), "--obj-epochs", "60", "--batch", "64",
        "--seed", str(seed), "--out-dir", str(out_dir), *extra,
    ]


class TestSynthCommand:
    def test_writes_all_files(self, tmp_path):
        assert run_synth(tmp_path) == 0
        for name in ("source_users.jsonl", "source_edges.csv",
                     "target_users.jsonl", "target_edges.csv", "truth.csv"):
            assert (tmp_path / name).exists()


class TestPipelineCommand:
    def test_end_to_end_produces_metrics(self, tmp_path, capsys):
        data = tmp_path / "data"
        out = tmp_path / "out"
        run_synth(data, n=50)
        capsys.readouterr()  # drain synth output
        started = time.monotonic()
        assert main(pipeline_args(data, out)) == 0
        assert time.monotonic() - started < 60.0
        metrics = json.loads((out / "metrics.json").read_text())
        assert set(metrics) == {"hr", "mrr", "n_pairs", "n_missing"}
        assert metrics["n_pairs"] == 50
        for name in ("unified.jsonl", "users.emb", "rankings.csv", "train_report.json",
                     "sim_has_username.csv", "objects_has_username.emb"):
            assert (out / name).exists()
        printed = json.loads(capsys.readouterr().out)
        assert printed == metrics

    def test_identical_runs_are_byte_identical(self, tmp_path):
        data = tmp_path / "data"
        run_synth(data)
        out_a, out_b = tmp_path / "a", tmp_path / "b"
        assert main(pipeline_args(data, out_a, epochs=80)) == 0
        assert main(pipeline_args(data, out_b, epochs=80)) == 0
        for name in ("users.emb", "metrics.json", "rankings.csv",
                     "objects_has_username.emb", "objects_has_image.emb"):
            assert (out_a / name).read_bytes() == (out_b / name).read_bytes(), name

    def test_zero_epochs_scores_near_chance(self, tmp_path):
        data = tmp_path / "data"
        out = tmp_path / "out"
        run_synth(data, n=60)
        assert main(pipeline_args(data, out, epochs=0)) == 0
        metrics = json.loads((out / "metrics.json").read_text())
        # random init: expected HR@1 is 1/60
        assert metrics["hr"]["1"] <= 0.15

    def test_malformed_users_file_exits_2(self, tmp_path, capsys):
        data = tmp_path / "data"
        out = tmp_path / "out"
        run_synth(data)
        (data / "source_users.jsonl").write_text('{"id": "u0"}\nnot json at all{\n')
        code = main(pipeline_args(data, out))
        assert code == 2
        assert ":2" in capsys.readouterr().err

    def test_conflicting_anchors_exit_2(self, tmp_path):
        data = tmp_path / "data"
        out = tmp_path / "out"
        run_synth(data)
        anchors = data / "anchors.csv"
        anchors.write_text("u0,u0\nu0,u1\n")
        code = main(pipeline_args(data, out, extra=["--anchors", str(anchors)]))
        assert code == 2


class TestStageCommands:
    def test_ingest_then_separate_stages(self, tmp_path):
        data = tmp_path / "data"
        out = tmp_path / "out"
        run_synth(data, n=20)
        base = [
            "--source-users", str(data / "source_users.jsonl"),
            "--source-edges", str(data / "source_edges.csv"),
            "--target-users", str(data / "target_users.jsonl"),
            "--target-edges", str(data / "target_edges.csv"),
            "--preds", "username,image",
            "--out-dir", str(out), "--seed", "3",
        ]
        assert main(["ingest", *base]) == 0
        assert main(["sim", "--out-dir", str(out), "--seed", "3"]) == 0
        assert main(["embed-objects", "--out-dir", str(out), "--seed", "3",
                     "--dim-obj", "8", "--obj-epochs", "40"]) == 0
        assert main(["train", "--out-dir", str(out), "--seed", "3",
                     "--dim-user", "16", "--epochs", "40", "--batch", "32"]) == 0
        assert main(["link", "--out-dir", str(out), "--top-k", "25"]) == 0
        assert main(["eval", "--out-dir", str(out),
                     "--truth", str(data / "truth.csv")]) == 0
        assert (out / "metrics.json").exists()

    def test_baseline_command(self, tmp_path, capsys):
        data = tmp_path / "data"
        out = tmp_path / "out"
        run_synth(data, n=20)
        capsys.readouterr()
        assert main([
            "baseline",
            "--source-users", str(data / "source_users.jsonl"),
            "--source-edges", str(data / "source_edges.csv"),
            "--target-users", str(data / "target_users.jsonl"),
            "--target-edges", str(data / "target_edges.csv"),
            "--truth", str(data / "truth.csv"),
            "--out-dir", str(out),
        ]) == 0
        metrics = json.loads(capsys.readouterr().out)
        assert 0.0 <= metrics["hr"]["1"] <= 1.0


class TestErrorCodes:
    def test_divergence_maps_to_exit_3(self, tmp_path, monkeypatch):
        from factoidlink import cli
        from factoidlink.exceptions import DivergenceError

        def explode(cfg):
            raise DivergenceError("boom")

        monkeypatch.setattr(cli, "run_pipeline", explode)
        data = tmp_path / "data"
        run_synth(data, n=5)
        assert main(pipeline_args(data, tmp_path / "out")) == 3

    def test_thread_cap_env_var(self, monkeypatch):
        monkeypatch.setenv("FACTOIDLINK_THREADS", "2")
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS",
                    "MKL_NUM_THREADS", "NUMBA_NUM_THREADS"):
            monkeypatch.delenv(var, raising=False)
        import os

        from factoidlink.cli import _apply_thread_cap

        _apply_thread_cap()
        assert os.environ["OMP_NUM_THREADS"] == "2"

    def test_invalid_thread_cap_exits_2(self, monkeypatch):
        monkeypatch.setenv("FACTOIDLINK_THREADS", "many")
        assert main(["synth", "--n", "2", "--out-dir", "/tmp/ignored"]) == 2


class TestArgumentHandling:
    def test_unknown_flag_fails_fast(self):
        with pytest.raises(SystemExit) as excinfo:
            main(["synth", "--does-not-exist", "1"])
        assert excinfo.value.code == 2

    def test_help_lists_subcommands(self, capsys):
        with pytest.raises(SystemExit) as excinfo:
            main(["--help"])
        assert excinfo.value.code == 0
        out = capsys.readouterr().out
        for command in ("ingest", "sim", "embed-objects", "train", "link",
                        "eval", "synth", "pipeline"):
            assert command in out

    def test_console_script_installed(self):
        result = subprocess.run(
            [sys.executable, "-m", "factoidlink.cli", "--help"],
            capture_output=True, text=True,
        )
        assert result.returncode == 0
        assert "factoidlink" in result.stdout
