import csv
import subprocess
import sys

import numpy as np
import pytest

from mvipc.bench import (SUMMARY_COLUMNS, TRACE_COLUMNS, ConfigError,
                         ExperimentSpec, main, parse_config, random_starts,
                         run_experiment)

CONFIG = """
[small]
problem = ex3
dim = 6
seeds = 1-2, 5
methods = ripcm, pcm_he, pcm_dong, ppa_kim, ppa_mainge
eps = 1e-6
monitor = true

[two]
problem = ex2
dim = 99          ; ignored, ex2 is planar
seeds = 3
methods = ripcm
"""


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


@pytest.fixture
def config(tmp_path):
    path = tmp_path / "exp.ini"
    path.write_text(CONFIG)
    return path


class TestConfig:
    def test_parse(self):
        specs = parse_config(CONFIG)
        assert [s.name for s in specs] == ["small", "two"]
        assert specs[0].seeds == [1, 2, 5]
        assert specs[0].monitor is True
        assert specs[1].dim == 2

    def test_unknown_key(self):
        with pytest.raises(ConfigError, match="unknown keys"):
            parse_config("[a]\nproblem = ex2\nalpah = 0.5\n")

    @pytest.mark.parametrize("method", ["jol", "alg_jol"])
    def test_jol_unavailable(self, method):
        with pytest.raises(ConfigError, match="unavailable"):
            parse_config(f"[a]\nproblem = ex2\nmethods = {method}\n")

    def test_unknown_method(self):
        with pytest.raises(ConfigError, match="unknown method"):
            parse_config("[a]\nproblem = ex2\nmethods = newton\n")

    def test_bad_problem_and_values(self):
        with pytest.raises(ConfigError):
            parse_config("[a]\nproblem = ex4\n")
        with pytest.raises(ConfigError):
            parse_config("[a]\nproblem = ex3\ndim = many\n")
        with pytest.raises(ConfigError):
            parse_config("[a]\nproblem = ex3\neps = -1\n")

    def test_overrides(self):
        spec = parse_config("[a]\nproblem = ex2\nalpha = 0.3\ndelta = 0.95\nlam = 0.5\n")[0]
        assert spec.overrides == {"alpha": 0.3, "delta": 0.95, "lam": 0.5}


class TestRun:
    def test_rows_match_traces(self, tmp_path):
        spec = parse_config(CONFIG)[0]
        table = run_experiment(spec, tmp_path)
        assert len(table.rows) == 15
        summary = read_csv(tmp_path / "small" / "summary.csv")
        assert tuple(summary[0]) == SUMMARY_COLUMNS
        for row in summary[1:]:
            rec = dict(zip(SUMMARY_COLUMNS, row))
            trace = read_csv(tmp_path / "small" / "traces"
                             / f"{rec['problem']}_{rec['method']}_seed{rec['seed']}.csv")
            assert tuple(trace[0]) == TRACE_COLUMNS
            assert int(rec["iters"]) == len(trace) - 1

    def test_optional_cells_empty(self, tmp_path):
        spec = ExperimentSpec("opt", "ex1", 3, [1], ["pcm_he"])
        run_experiment(spec, tmp_path)
        trace = read_csv(tmp_path / "opt" / "traces" / "ex1_pcm_he_seed1.csv")
        psi_col, dist_col = TRACE_COLUMNS.index("psi"), TRACE_COLUMNS.index("dist_sol")
        assert all(r[psi_col] == "" and r[dist_col] == "" for r in trace[1:])

    def test_floats_round_trip(self, tmp_path):
        spec = ExperimentSpec("rt", "ex2", 2, [4], ["ripcm"], monitor=True)
        run_experiment(spec, tmp_path)
        trace = read_csv(tmp_path / "rt" / "traces" / "ex2_ripcm_seed4.csv")
        for row in trace[1:]:
            for cell in row[1:6]:
                assert repr(float(cell)) == cell

    def test_empty_method_list(self, tmp_path):
        spec = ExperimentSpec("none", "ex2", 2, [1, 2], [])
        table = run_experiment(spec, tmp_path)
        assert table.rows == [] and table.aggregates == {}
        assert read_csv(tmp_path / "none" / "summary.csv") == [list(SUMMARY_COLUMNS)]

    def test_deterministic_traces(self, tmp_path):
        spec = parse_config(CONFIG)[0]
        run_experiment(spec, tmp_path / "a")
        run_experiment(spec, tmp_path / "b")
        skip = TRACE_COLUMNS.index("elapsed_ns")
        for f in sorted((tmp_path / "a" / "small" / "traces").iterdir()):
            a = read_csv(f)
            b = read_csv(tmp_path / "b" / "small" / "traces" / f.name)
            assert [r[:skip] for r in a] == [r[:skip] for r in b]
        sa = read_csv(tmp_path / "a" / "small" / "summary.csv")
        sb = read_csv(tmp_path / "b" / "small" / "summary.csv")
        assert [r[:-1] for r in sa] == [r[:-1] for r in sb]

    def test_starts_in_box(self):
        x0, x1, w1 = random_starts(9, 50)
        for v in (x0, x1, w1):
            assert v.shape == (50,) and np.all(np.abs(v) <= 5)
        assert not np.array_equal(x0, x1)


class TestCli:
    def test_run_with_flag(self, config, tmp_path, capsys):
        out = tmp_path / "out"
        assert main(["run", str(config), "--output-dir", str(out)]) == 0
        assert (out / "small" / "summary.csv").exists()
        assert (out / "two" / "traces" / "ex2_ripcm_seed3.csv").exists()
        assert "median iters" in capsys.readouterr().out

    def test_run_with_env(self, config, tmp_path, monkeypatch):
        monkeypatch.setenv("MVIPC_OUTPUT_DIR", str(tmp_path / "env"))
        assert main(["run", str(config)]) == 0
        assert (tmp_path / "env" / "two" / "summary.csv").exists()

    def test_flag_beats_env(self, config, tmp_path, monkeypatch):
        monkeypatch.setenv("MVIPC_OUTPUT_DIR", str(tmp_path / "env"))
        assert main(["run", str(config), "--output-dir", str(tmp_path / "flag")]) == 0
        assert (tmp_path / "flag" / "two").exists()
        assert not (tmp_path / "env").exists()

    def test_invalid_config_exit_1(self, tmp_path, capsys):
        bad = tmp_path / "bad.ini"
        bad.write_text("[a]\nproblem = ex2\nmethods = jol\n")
        assert main(["run", str(bad), "--output-dir", str(tmp_path)]) == 1
        assert "unavailable" in capsys.readouterr().err
        assert main(["run", str(tmp_path / "missing.ini")]) == 1

    def test_invalid_override_exit_1(self, tmp_path):
        bad = tmp_path / "bad.ini"
        bad.write_text("[a]\nproblem = ex2\nmethods = ripcm\ndelta = 0.5\n")
        assert main(["run", str(bad), "--output-dir", str(tmp_path / "o")]) == 1

    def test_unwritable_output_exit_2(self, config, tmp_path):
        blocker = tmp_path / "file"
        blocker.write_text("")
        assert main(["run", str(config), "--output-dir", str(blocker)]) == 2

    def test_validate_defaults(self, capsys):
        rc = main(["validate", "--alpha", "0.5", "--delta", "0.9", "--theta", "0.4",
                   "--gamma", "1.5", "--sigma", "1.5"])
        out = capsys.readouterr().out
        assert rc == 0
        assert "xi = 2.33333333333" in out
        assert "0.714286" in out and "0.558512" in out
        assert "FAIL" not in out

    def test_validate_failure(self, capsys):
        rc = main(["validate", "--delta", "0.5"])
        out = capsys.readouterr().out
        assert rc == 1
        assert "FAIL  delta_bound_inertia" in out

    def test_probe(self, capsys):
        assert main(["probe"]) == 0
        out = capsys.readouterr().out
        assert "0 violations" in out
        assert "= 2," in out and "= -2" in out

    def test_bad_arguments(self):
        assert main(["frobnicate"]) == 1
        assert main(["validate", "--alpha", "x"]) == 1

    def test_module_entry_point(self):
        proc = subprocess.run([sys.executable, "-m", "mvipc", "probe"],
                              capture_output=True, text=True, check=False)
        assert proc.returncode == 0
        assert "counterexample" in proc.stdout
