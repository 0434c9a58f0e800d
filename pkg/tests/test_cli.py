from __future__ import annotations

import json
import pathlib

import numpy as np
import pytest

from qrff.cli import (
    RunConfig,
    emit_outputs,
    generate_dataset,
    load_config,
    main,
    run_experiment,
)
from qrff.errors import ConfigError
from qrff.rff import build_feature_model, rff_posterior, sample_frequencies

SMALL = dict(n_points=4, n_frequencies=2, tau=8, grid_count=6, seed_freq=1)


class TestConfig:
    def test_defaults_are_valid(self):
        cfg = RunConfig()
        assert cfg.n_points == 16 and cfg.tau == 13 and cfg.shots == 1_000_000

    def test_rejects_unknown_keys(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({"n_points": 8, "bogus": 1}))
        with pytest.raises(ConfigError, match="bogus"):
            load_config(str(path), {})

    def test_flags_override_file(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({"tau": 9, "shots": 5}))
        cfg = load_config(str(path), {"tau": 11, "mode": None})
        assert cfg.tau == 11 and cfg.shots == 5

    def test_invalid_values(self):
        with pytest.raises(ConfigError):
            RunConfig(n_points=0)
        with pytest.raises(ConfigError):
            RunConfig(grid_count=0)
        with pytest.raises(ConfigError):
            RunConfig(mode="banana")
        with pytest.raises(ConfigError):
            RunConfig(dim=2)
        with pytest.raises(ConfigError):
            RunConfig(noise_std=-1.0)

    def test_unreadable_file(self):
        with pytest.raises(ConfigError):
            load_config("/definitely/not/here.json", {})

    def test_malformed_json(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text("{not json")
        with pytest.raises(ConfigError):
            load_config(str(path), {})


class TestGenerateDataset:
    def test_zero_noise_exact_sine(self):
        ds = generate_dataset(RunConfig(**{**SMALL, "noise_std": 0.0}))
        assert np.array_equal(ds.targets, np.sin(ds.inputs[:, 0]))

    def test_deterministic(self):
        a = generate_dataset(RunConfig(**SMALL))
        b = generate_dataset(RunConfig(**SMALL))
        assert np.array_equal(a.inputs, b.inputs)
        assert np.array_equal(a.targets, b.targets)

    def test_noise_moment(self):
        cfg = RunConfig(n_points=10_000, seed_data=5)
        ds = generate_dataset(cfg)
        resid = ds.targets - np.sin(ds.inputs[:, 0])
        assert 0.097 <= resid.std() <= 0.103

    def test_random_layout(self):
        cfg = RunConfig(**{**SMALL, "input_layout": "random"})
        ds = generate_dataset(cfg)
        assert ds.inputs.min() >= cfg.grid_lo and ds.inputs.max() <= cfg.grid_hi
        assert not np.allclose(np.diff(ds.inputs[:, 0]), np.diff(ds.inputs[:, 0])[0])


class TestRunExperiment:
    def test_small_run_consistency(self, tmp_path):
        cfg = RunConfig(**SMALL, out_dir=str(tmp_path / "o"))
        report = run_experiment(cfg)
        assert len(report.records) == cfg.grid_count
        assert report.summary["rmse_mean_qrff_vs_rff"] >= 0
        # orchestration self-consistency: the rff column reproduces the oracle
        ds = generate_dataset(cfg)
        freq = sample_frequencies(cfg.n_frequencies, cfg.hyper, 1, cfg.seed_freq)
        fm = build_feature_model(ds, freq, cfg.hyper)
        for rec in report.records:
            post = rff_posterior(fm, ds.targets, [rec.x], cfg.hyper)
            assert rec.mean_rff == pytest.approx(post.mean, abs=1e-8)
            assert rec.var_rff == pytest.approx(post.variance, abs=1e-8)

    def test_degenerate_single_point(self):
        cfg = RunConfig(n_points=1, n_frequencies=1, tau=6, grid_count=3, seed_freq=2)
        report = run_experiment(cfg)
        assert len(report.records) == 3
        assert all(np.isfinite(r.mean_qrff) for r in report.records)

    def test_worker_pool_matches_serial(self):
        cfg1 = RunConfig(**SMALL, workers=1)
        cfg4 = RunConfig(**SMALL, workers=4)
        a = run_experiment(cfg1)
        b = run_experiment(cfg4)
        for ra, rb in zip(a.records, b.records):
            assert ra.mean_qrff == rb.mean_qrff
            assert ra.var_qrff == rb.var_qrff


class TestEmitOutputs:
    def test_file_shapes_and_reemission(self, tmp_path):
        cfg = RunConfig(**SMALL, out_dir=str(tmp_path / "out"))
        report = run_experiment(cfg)
        paths = emit_outputs(report, cfg)
        csv_path = pathlib.Path(paths[0])
        lines = csv_path.read_bytes().split(b"\n")
        assert lines[0] == b"x,mean_exact,var_exact,mean_rff,var_rff,mean_qrff,var_qrff,p1,p2"
        assert len([ln for ln in lines if ln]) == 1 + cfg.grid_count
        before = [pathlib.Path(p).read_bytes() for p in paths]
        emit_outputs(report, cfg)
        after = [pathlib.Path(p).read_bytes() for p in paths]
        assert before == after

    def test_nine_significant_digits(self, tmp_path):
        cfg = RunConfig(**SMALL, out_dir=str(tmp_path / "out"))
        report = run_experiment(cfg)
        emit_outputs(report, cfg)
        line = (pathlib.Path(cfg.out_dir) / "results.csv").read_text().splitlines()[1]
        first = line.split(",")[1]
        assert first == format(report.records[0].mean_exact, ".9g")

    def test_summary_key_value_lines(self, tmp_path):
        cfg = RunConfig(**SMALL, out_dir=str(tmp_path / "out"))
        report = run_experiment(cfg)
        emit_outputs(report, cfg)
        text = (pathlib.Path(cfg.out_dir) / "summary.txt").read_text()
        assert text.endswith("\n")
        for line in text.splitlines():
            key, sep, value = line.partition(" = ")
            assert sep and key and float(value) is not None

    def test_io_error_exit_code(self, tmp_path, capsys):
        blocker = tmp_path / "file"
        blocker.write_text("x")
        rc = main(
            ["compare", "--tau", "8", "--out", str(blocker / "sub")]
        )  # out dir under a regular file
        assert rc == 5
        assert "error:" in capsys.readouterr().err


class TestMainExitCodes:
    def test_success_and_outputs(self, tmp_path, capsys):
        rc = main(
            [
                "compare",
                "--tau",
                "8",
                "--seed-freq",
                "1",
                "--out",
                str(tmp_path / "res"),
            ]
        )
        assert rc == 0
        out = capsys.readouterr().out
        assert "results.csv" in out and "rmse_mean_qrff_vs_rff" in out

    def test_config_error_is_2(self, capsys):
        assert main(["compare", "--config", "/missing.json"]) == 2

    def test_capacity_error_is_3(self, tmp_path, capsys):
        rc = main(["compare", "--tau", "25", "--out", str(tmp_path / "r")])
        assert rc == 3
        assert "error:" in capsys.readouterr().err

    def test_post_selection_error_is_4(self, tmp_path, capsys):
        # one shot with acceptance probability well below 1: some seed rejects it
        rc_by_seed = set()
        for seed in range(12):
            rc = rc_by_seed.add(
                main(
                    [
                        "run-quantum",
                        "--tau",
                        "8",
                        "--mode",
                        "sampled",
                        "--shots",
                        "1",
                        "--seed-shots",
                        str(seed),
                        "--out",
                        str(tmp_path / f"r{seed}"),
                    ]
                )
            )
        assert 4 in rc_by_seed

    def test_selftest_passes(self, capsys):
        assert main(["selftest"]) == 0
        assert "FAIL" not in capsys.readouterr().out


class TestDeterminism:
    def test_byte_identical_csvs_both_modes(self, tmp_path):
        for mode in ("exact", "sampled"):
            outs = []
            for run in range(2):
                cfg = RunConfig(
                    **SMALL,
                    mode=mode,
                    shots=2000,
                    out_dir=str(tmp_path / f"{mode}{run}"),
                )
                emit_outputs(run_experiment(cfg), cfg)
                outs.append(
                    (pathlib.Path(cfg.out_dir) / "results.csv").read_bytes()
                )
            assert outs[0] == outs[1]
