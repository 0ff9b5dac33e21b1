import json
import subprocess
import sys
from pathlib import Path

import pytest

from rrgkit.cli import main
from rrgkit.experiments import ExperimentConfig, run_experiment


def run_cli(*args):
    proc = subprocess.run(
        [sys.executable, "-m", "rrgkit.cli", *args], capture_output=True, text=True
    )
    return proc.returncode, proc.stdout, proc.stderr


class TestCli:
    def test_usage_error_exits_1(self):
        rc, _, _ = run_cli("sample", "--model", "uniform")  # missing required args
        assert rc == 1

    def test_runtime_error_exits_1(self, tmp_path):
        rc, _, err = run_cli("spectrum", "--graph", str(tmp_path / "missing.txt"))
        assert rc == 1 and "error" in err

    def test_sample_and_spectrum(self, tmp_path):
        out = tmp_path / "g.txt"
        assert main(["sample", "--model", "uniform", "--n", "8", "--d", "3",
                     "--seed", "5", "--out", str(out)]) == 0
        assert main(["spectrum", "--graph", str(out), "--json",
                     "--out", str(tmp_path / "s.json")]) == 0
        payload = json.loads((tmp_path / "s.json").read_text())
        assert payload["d"] == 3 and len(payload["eigenvalues"]) == 8

    def test_sample_count_suffixes(self, tmp_path):
        out = tmp_path / "g.txt"
        assert main(["sample", "--model", "perm-uniform", "--n", "6", "--d", "2",
                     "--seed", "5", "--count", "3", "--out", str(out)]) == 0
        assert sorted(p.name for p in tmp_path.iterdir()) == ["g_0.txt", "g_1.txt", "g_2.txt"]

    def test_switchings_count_and_coupling(self, tmp_path):
        out = tmp_path / "c5.txt"
        main(["sample", "--model", "uniform", "--n", "5", "--d", "2",
              "--seed", "1", "--out", str(out)])
        rc, stdout, _ = run_cli("switchings", "count", "--graph", str(out), "--u", "1", "--v", "2")
        assert rc == 0
        payload = json.loads(stdout)
        assert payload["s_uv"] >= 0 and payload["t_uv"] >= 0
        rc, stdout, _ = run_cli("switchings", "coupling", "--n", "5", "--d", "2",
                                "--u", "1", "--v", "2")
        assert rc == 0
        assert json.loads(stdout)["marginal_tv"] == "0"

    def test_switchings_verify(self):
        rc, stdout, _ = run_cli("switchings", "verify", "--n", "5", "--d", "2")
        assert rc == 0 and json.loads(stdout)["violations"] == []

    def test_ks_dp_check(self, tmp_path):
        out = tmp_path / "c5.txt"
        main(["sample", "--model", "uniform", "--n", "5", "--d", "4",
              "--seed", "1", "--out", str(out)])
        rc, stdout, _ = run_cli("ks", "dp-check", "--graph", str(out),
                                "--delta", "0.8", "--kappa1", "2.0")
        assert rc == 0 and json.loads(stdout)["holds"]

    def test_ks_dp_check_violation_exits_2(self, tmp_path):
        out = tmp_path / "c5.txt"
        main(["sample", "--model", "uniform", "--n", "5", "--d", "2",
              "--seed", "1", "--out", str(out)])
        rc, stdout, _ = run_cli("ks", "dp-check", "--graph", str(out),
                                "--delta", "0.4", "--kappa1", "1.01")
        assert rc == 2 and not json.loads(stdout)["holds"]

    def test_tails_scenario(self, tmp_path):
        rep = tmp_path / "rep.json"
        assert main(["tails", "scenario", "--name", "poisson_mixture", "--reps", "2000",
                     "--seed", "3", "--out", str(rep)]) == 0
        payload = json.loads(rep.read_text())
        assert payload["violations"] == []
        svg = tmp_path / "rep.svg"
        assert main(["render", "--input", str(rep), "--out", str(svg)]) == 0
        assert svg.read_text().startswith("<svg")

    def test_utp_validate(self, tmp_path):
        rep = tmp_path / "utp.json"
        assert main(["utp", "validate", "--model", "perm-uniform", "--n", "12", "--d", "4",
                     "--q", "setpair", "--reps", "500", "--seed", "2",
                     "--out", str(rep)]) == 0

    def test_ks_constants_certified(self, tmp_path):
        out = tmp_path / "ledger.json"
        assert main(["ks", "constants", "--remark-chain", "--out", str(out)]) == 0
        payload = json.loads(out.read_text())
        assert len(payload["remark_chain"]) == 12

    def test_ks_heavy_audit(self):
        rc, stdout, _ = run_cli("ks", "heavy-audit", "--n", "12", "--d", "3",
                                "--reps", "5", "--x-per-graph", "10", "--seed", "9")
        assert rc == 0
        payload = json.loads(stdout)
        assert payload["heavy_failures"] == 0 and payload["heavy_checked"] > 0


def small_config(tmp_path, out_name, cells=None, timings=False):
    cfg = {
        "cells": cells if cells is not None else [
            {"kind": "uniform", "n": 8, "d": 3},
            {"kind": "perm-uniform", "n": 8, "d": 2},
        ],
        "replicas": 4,
        "seed": 99,
        "out_dir": str(tmp_path / out_name),
        "timings": timings,
    }
    path = tmp_path / f"{out_name}.json"
    path.write_text(json.dumps(cfg))
    return path


class TestExperiments:
    def test_empty_grid_header_only(self, tmp_path):
        cfg = ExperimentConfig(cells=[], replicas=1, seed=0, out_dir=str(tmp_path / "e"))
        run_experiment(cfg)
        lines = (tmp_path / "e" / "results.csv").read_text().splitlines()
        assert len(lines) == 2 and lines[0].startswith("#")

    def test_determinism_byte_identical(self, tmp_path):
        p1 = small_config(tmp_path, "runA")
        p2 = small_config(tmp_path, "runB")
        assert main(["experiment", "--config", str(p1)]) == 0
        assert main(["experiment", "--config", str(p2)]) == 0
        a = (tmp_path / "runA" / "results.csv").read_bytes()
        b = (tmp_path / "runB" / "results.csv").read_bytes()
        assert a == b
        sa = json.loads((tmp_path / "runA" / "summary.json").read_text())
        sb = json.loads((tmp_path / "runB" / "summary.json").read_text())
        assert sa == sb

    def test_resume_skips_completed(self, tmp_path):
        path = small_config(tmp_path, "resume")
        assert main(["experiment", "--config", str(path)]) == 0
        out = tmp_path / "resume"
        frag = out / "cells" / "cell_0000.csv"
        sentinel = "uniform,8,3,0,0.0,0.0,0.0,-1.0\n" + "\n".join(
            frag.read_text().splitlines()[1:]
        ) + "\n"
        frag.write_text(sentinel)  # visible only if the cell is NOT resampled
        assert main(["experiment", "--config", str(path)]) == 0
        assert (out / "cells" / "cell_0000.csv").read_text() == sentinel
        assert "uniform,8,3,0,0.0" in (out / "results.csv").read_text()

    def test_infeasible_cell_skipped_with_reason(self, tmp_path):
        path = small_config(
            tmp_path, "skip",
            cells=[{"kind": "uniform", "n": 4, "d": 2}, {"kind": "uniform", "n": 8, "d": 3}],
        )
        assert main(["experiment", "--config", str(path)]) == 0
        summary = json.loads((tmp_path / "skip" / "summary.json").read_text())
        assert len(summary["skipped"]) == 1 and "n >= 5" in summary["skipped"][0]["reason"]
        assert len(summary["cells"]) == 1

    def test_runtime_column_deterministic_by_default(self, tmp_path):
        path = small_config(tmp_path, "timed", timings=False)
        main(["experiment", "--config", str(path)])
        rows = [
            r for r in (tmp_path / "timed" / "results.csv").read_text().splitlines()
            if r and not r.startswith("#") and not r.startswith("model")
        ]
        assert all(r.endswith(",-1.0") for r in rows)

    def test_render_scatter(self, tmp_path):
        path = small_config(tmp_path, "plot")
        main(["experiment", "--config", str(path)])
        svg = tmp_path / "plot.svg"
        assert main(["render", "--input", str(tmp_path / "plot" / "results.csv"),
                     "--out", str(svg)]) == 0
        assert svg.read_text().startswith("<svg")
