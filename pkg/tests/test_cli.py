"""Config parsing, sweep artifacts, determinism, and exit codes."""

import json
from pathlib import Path

import numpy as np
import pytest
import yaml

from hetnet_ee import baselines, cli

TINY = """
topology:
  num_small_cells: 2
  num_users: 12
  rng_seed: 3
experiment:
  schemes: [UAPCEE, MaxGain]
  xi_sweep: [8.0, 12.0]
  num_seeds: 2
"""


def write(tmp_path, text, name="cfg.yaml"):
    path = tmp_path / name
    path.write_text(text)
    return path


class TestValidateConfig:
    def test_empty_file_gives_defaults(self, tmp_path):
        cfg = cli.validate_config(write(tmp_path, ""))
        assert cfg == cli.ExperimentConfig()
        assert cfg.topology.num_users == 240
        assert cfg.num_seeds == 50
        assert cfg.xi_sweep == [8.0, 10.0, 12.0, 14.0, 16.0, 18.0, 20.0]
        assert list(cfg.schemes) == list(baselines.ALL_SCHEMES)

    def test_unknown_key_rejected(self, tmp_path):
        path = write(tmp_path, "topology:\n  num_cells: 4\n")
        with pytest.raises(cli.ConfigError, match="num_cells"):
            cli.validate_config(path)

    def test_unknown_section_rejected(self, tmp_path):
        path = write(tmp_path, "topo:\n  num_users: 4\n")
        with pytest.raises(cli.ConfigError, match="topo"):
            cli.validate_config(path)

    def test_negative_bandwidth_named(self, tmp_path):
        path = write(tmp_path, "power:\n  bandwidth_hz: -5.0\n")
        with pytest.raises(cli.ConfigError, match="bandwidth_hz"):
            cli.validate_config(path)

    def test_semantic_n_lt_k_rejected(self, tmp_path):
        path = write(tmp_path, "topology:\n  num_users: 4\n  num_small_cells: 8\n")
        with pytest.raises(cli.ConfigError, match="num_users"):
            cli.validate_config(path)

    def test_unknown_scheme_rejected(self, tmp_path):
        path = write(tmp_path, "experiment:\n  schemes: [UAPCEE, Oracle]\n")
        with pytest.raises(cli.ConfigError, match="Oracle"):
            cli.validate_config(path)

    def test_round_trip_identity(self, tmp_path):
        cfg = cli.validate_config(write(tmp_path, TINY))
        dumped = cli.dump_config(cfg)
        reparsed = cli._config_from_mapping(yaml.safe_load(dumped))
        assert reparsed == cfg

    def test_nested_solver_overrides(self, tmp_path):
        text = "solver:\n  epsilon: 0.01\n  ua:\n    eta: 0.5\n  pc:\n    max_rounds: 7\n"
        cfg = cli.validate_config(write(tmp_path, text))
        assert cfg.solver.epsilon == 0.01
        assert cfg.solver.ua.eta == 0.5
        assert cfg.solver.pc.max_rounds == 7
        assert cfg.solver.pc.tol_outer == 1e-6  # untouched default


@pytest.fixture(scope="module")
def sweep_out(tmp_path_factory):
    tmp = tmp_path_factory.mktemp("sweep")
    cfg = cli.validate_config(write(tmp, TINY))
    records = cli.run_sweep(cfg, jobs=1, out_dir=tmp / "out")
    return tmp / "out", records, cfg


class TestSweep:
    def test_record_count(self, sweep_out):
        _, records, cfg = sweep_out
        assert len(records) == len(cfg.schemes) * len(cfg.xi_sweep) * cfg.num_seeds

    def test_jsonl_ordering_and_schema(self, sweep_out):
        out, records, cfg = sweep_out
        lines = (out / "results.jsonl").read_text().splitlines()
        assert len(lines) == len(records)
        keys = [
            (r["scheme"], r["xi_w_per_mbps"], r["seed"])
            for r in map(json.loads, lines)
        ]
        order = {s: i for i, s in enumerate(cfg.schemes)}
        assert keys == sorted(keys, key=lambda t: (order[t[0]], t[1], t[2]))
        rec = json.loads(lines[0])
        assert set(rec["counters"]) == {"T1", "T2", "T3", "L", "m"}
        assert "energy_efficiency" in rec["metrics"]

    def test_summary_shape(self, sweep_out):
        out, _, cfg = sweep_out
        rows = (out / "summary.csv").read_text().splitlines()
        assert rows[0] == "xi_w_per_mbps," + ",".join(cfg.schemes)
        assert len(rows) == 1 + len(cfg.xi_sweep)
        for row in rows[1:]:
            cells = row.split(",")
            assert len(cells) == 1 + len(cfg.schemes)
            for cell in cells[1:]:
                float(cell)

    def test_single_scheme_single_seed_count(self, tmp_path):
        text = """
topology: {num_small_cells: 1, num_users: 6, rng_seed: 5}
experiment: {schemes: [MaxGain], xi_sweep: [8.0, 10.0, 12.0], num_seeds: 1}
"""
        cfg = cli.validate_config(write(tmp_path, text))
        records = cli.run_sweep(cfg, jobs=1, out_dir=tmp_path / "out")
        assert len(records) == 3

    def test_jobs_parallel_byte_identical(self, sweep_out, tmp_path):
        out1, _, cfg = sweep_out
        out2 = tmp_path / "par"
        cli.run_sweep(cfg, jobs=4, out_dir=out2)
        assert (out2 / "summary.csv").read_bytes() == (out1 / "summary.csv").read_bytes()
        assert (out2 / "results.jsonl").read_bytes() == (out1 / "results.jsonl").read_bytes()


class TestConverge:
    def test_trace_properties(self, tmp_path):
        text = "topology: {num_small_cells: 2, num_users: 12, rng_seed: 9}\n"
        cfg = cli.validate_config(write(tmp_path, text))
        sol = cli.run_convergence(cfg, out_dir=tmp_path / "out")
        rows = (tmp_path / "out" / "trace.csv").read_text().splitlines()
        assert rows[0] == "iteration,q"
        qs = [float(r.split(",")[1]) for r in rows[1:]]
        assert len(qs) == sol.outer_iterations
        assert all(b > a for a, b in zip(qs, qs[1:]))

    def test_huge_epsilon_single_iteration(self, tmp_path):
        text = (
            "topology: {num_small_cells: 2, num_users: 12}\n"
            "solver: {epsilon: 1.0e+6}\n"
        )
        cfg = cli.validate_config(write(tmp_path, text))
        sol = cli.run_convergence(cfg, out_dir=tmp_path / "out")
        assert sol.outer_iterations == 1
        assert sol.converged

    def test_same_seed_identical_traces(self, tmp_path):
        text = "topology: {num_small_cells: 2, num_users: 10, rng_seed: 2}\n"
        cfg = cli.validate_config(write(tmp_path, text))
        cli.run_convergence(cfg, out_dir=tmp_path / "a")
        cli.run_convergence(cfg, out_dir=tmp_path / "b")
        assert (tmp_path / "a" / "trace.csv").read_bytes() == (
            tmp_path / "b" / "trace.csv"
        ).read_bytes()


class TestMain:
    def test_validate_ok_exit_zero(self, tmp_path, capsys):
        path = write(tmp_path, TINY)
        assert cli.main(["validate", "--config", str(path)]) == 0
        dumped = capsys.readouterr().out
        assert yaml.safe_load(dumped)["experiment"]["num_seeds"] == 2

    def test_validate_bad_config_exit_one(self, tmp_path, capsys):
        path = write(tmp_path, "power: {bandwidth_hz: -1}\n")
        assert cli.main(["validate", "--config", str(path)]) == 1
        assert "bandwidth_hz" in capsys.readouterr().err

    def test_missing_file_exit_one(self, tmp_path, capsys):
        assert cli.main(["validate", "--config", str(tmp_path / "nope.yaml")]) == 1

    def test_sweep_exit_zero(self, tmp_path):
        text = """
topology: {num_small_cells: 1, num_users: 6, rng_seed: 5}
experiment: {schemes: [MaxGain], xi_sweep: [8.0], num_seeds: 1}
"""
        path = write(tmp_path, text)
        rc = cli.main(
            ["sweep", "--config", str(path), "--out", str(tmp_path / "out")]
        )
        assert rc == 0
        assert (tmp_path / "out" / "summary.csv").exists()
