import json
import subprocess
import sys

import numpy as np
import pytest

from gmpb.cli import grid_samples, main
from gmpb.harness import read_results
from gmpb.landscape import problem_optimum_value

from .conftest import cone, problem, subfunction


def run(argv, capsys):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


class TestGen:
    def test_f5(self, tmp_path, capsys):
        code, out, _ = run(["gen", "--scenario", "f5", "--seed", 3, "-o", tmp_path / "c.json"], capsys)
        assert code == 0
        doc = json.loads((tmp_path / "c.json").read_text())
        assert doc["groups"] == [50] and doc["separable_count"] == 0 and doc["seed"] == 3
        assert "d = 50" in out

    def test_region_count_printed(self, tmp_path, capsys):
        from gmpb.landscape import promising_region_count
        from gmpb.scenario import build_scenario

        _, out, _ = run(["gen", "--scenario", "f2", "--seed", 8, "-o", tmp_path / "c.json"], capsys)
        prob, _ = build_scenario(2, "default", 8)
        assert f"M = {promising_region_count(prob)}" in out

    def test_f1_note(self, tmp_path, capsys):
        _, out, _ = run(["gen", "--scenario", "f1", "-o", tmp_path / "c.json"], capsys)
        assert "note: separable count corrected" in out

    @pytest.mark.parametrize("argv", [["gen", "--scenario", "f99"], ["gen"], ["gen", "--scenario", "f2", "--seed", "-1"]])
    def test_usage_errors(self, argv, capsys):
        assert run(argv, capsys)[0] == 2

    def test_unknown_flag(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["gen", "--scenario", "f2", "--bogus"])
        assert exc.value.code == 2

    def test_bad_config(self, tmp_path, capsys):
        (tmp_path / "c.json").write_text("{ nope")
        code, _, err = run(["gen", "--config", tmp_path / "c.json"], capsys)
        assert code == 2 and "c.json:1:" in err


class TestRun:
    def test_random_f4(self, tmp_path, capsys):
        out_csv = tmp_path / "r.csv"
        code, out, _ = run(
            ["run", "--scenario", "f4", "--optimizer", "random", "--seed", 1, "--environments", 3, "-o", out_csv], capsys
        )
        assert code == 0
        value = float(out.strip().split("=")[1])
        meta, records = read_results(out_csv)
        assert len(records) == 3 and value > 0
        assert float(meta["e_bbc"]) == value

    def test_byte_identical(self, tmp_path, capsys):
        argv = ["run", "--scenario", "f2", "--optimizer", "mpso", "--seed", 1, "--environments", 2]
        run(argv + ["-o", tmp_path / "a.csv"], capsys)
        run(argv + ["-o", tmp_path / "b.csv"], capsys)
        assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()

    def test_challenging_period_in_metadata(self, tmp_path, capsys):
        out_csv = tmp_path / "r.csv"
        run(["run", "--scenario", "f4", "--mode", "challenging", "--optimizer", "random", "--environments", 1, "-o", out_csv], capsys)
        meta, _ = read_results(out_csv)
        assert meta["change_period"] == str(200 * 50) and meta["mode"] == "challenging"

    def test_ccmpso_and_params(self, tmp_path, capsys):
        params = tmp_path / "p.json"
        params.write_text(json.dumps({"population": 4, "swarm_count": 2}))
        out_csv = tmp_path / "r.csv"
        code, _, _ = run(
            ["run", "--scenario", "f2", "--optimizer", "ccmpso", "--params", params, "--environments", 1, "-o", out_csv],
            capsys,
        )
        meta, _ = read_results(out_csv)
        assert code == 0 and meta["optimizer"] == "ccmpso-oracle"

    @pytest.mark.parametrize("extra", [["--iterations", 0], ["--population", 1]])
    def test_bad_params(self, extra, capsys):
        assert run(["run", "--scenario", "f2", "--environments", 1] + extra, capsys)[0] == 2

    def test_unknown_param_key(self, tmp_path, capsys):
        params = tmp_path / "p.json"
        params.write_text(json.dumps({"warp": 9}))
        assert run(["run", "--scenario", "f2", "--params", params], capsys)[0] == 2

    def test_config_file(self, tmp_path, capsys):
        run(["gen", "--scenario", "f4", "--seed", 5, "-o", tmp_path / "c.json"], capsys)
        code, _, _ = run(
            ["run", "--config", tmp_path / "c.json", "--optimizer", "random", "--environments", 1, "-o", tmp_path / "r.csv"],
            capsys,
        )
        meta, _ = read_results(tmp_path / "r.csv")
        assert code == 0 and meta["seed"] == "5"


class TestGrid:
    def test_resolution_two(self, tmp_path, capsys):
        out_csv = tmp_path / "g.csv"
        code, _, _ = run(["grid", "--scenario", "f2", "--resolution", 2, "-o", out_csv], capsys)
        rows = [r for r in out_csv.read_text().splitlines() if not r.startswith("#")]
        assert code == 0 and rows[0] == "x_0,x_1,F" and len(rows) == 5

    def test_cone_apex(self):
        prob = problem([subfunction([0, 1], [cone([10.0, -20.0], 60.0, width=3.0)])])
        rows = grid_samples(prob, 0, 1, 101)
        a, b, f = max(rows, key=lambda r: r[2])
        assert (a, b, f) == (10.0, -20.0, 60.0)

    def test_upper_bound(self, tmp_path, capsys):
        out_csv = tmp_path / "g.csv"
        run(["grid", "--scenario", "f3", "--dims", "4,7", "--resolution", 60, "--env", 2, "-o", out_csv], capsys)
        lines = out_csv.read_text().splitlines()
        meta = dict(line[2:].split("=", 1) for line in lines if line.startswith("#"))
        values = np.array([float(r.split(",")[2]) for r in [r for r in lines if not r.startswith("#")][1:]])
        assert values.max() <= float(meta["optimum"]) + 1e-9
        assert meta["environment"] == "2" and "fixed" in meta

    @pytest.mark.parametrize("dims", ["0,0", "0,50", "a,b", "-1,2", "1"])
    def test_bad_dims(self, dims, capsys):
        assert run(["grid", "--scenario", "f2", f"--dims={dims}"], capsys)[0] == 2


class TestReport:
    def write(self, path, errors, seed):
        lines = [f"# seed={seed}", "# scenario=f2", "# mode=default", "# optimizer=mpso",
                 "environment,best_fitness,optimum_fitness,error,evaluations"]
        for i, e in enumerate(errors, 1):
            lines.append(f"{i},{60 - e},60,{e},{i * 10}")
        path.write_text("\n".join(lines) + "\n")

    def test_single_and_mean(self, tmp_path, capsys):
        self.write(tmp_path / "a.csv", [2, 4], 1)
        code, out, _ = run(["report", tmp_path / "a.csv"], capsys)
        assert code == 0 and "mean E_BBC = 3 +/- 0 (n=1)" in out

    def test_batch_stats(self, tmp_path, capsys):
        import statistics

        values = [1.0, 2.0, 4.0, 8.0, 16.0]
        files = []
        for seed, v in enumerate(values, 1):
            self.write(tmp_path / f"{seed}.csv", [v, v], seed)
            files.append(tmp_path / f"{seed}.csv")
        _, out, _ = run(["report", *files, "--csv", tmp_path / "s.csv"], capsys)
        assert f"mean E_BBC = {statistics.fmean(values):.17g} +/- {statistics.stdev(values):.17g}" in out
        assert "# n=5" in (tmp_path / "s.csv").read_text()

    def test_unreadable_skipped(self, tmp_path, capsys):
        self.write(tmp_path / "a.csv", [1], 1)
        (tmp_path / "b.csv").write_text("junk\n")
        code, _, err = run(["report", tmp_path / "a.csv", tmp_path / "b.csv"], capsys)
        assert code == 0 and "skipped" in err

    def test_all_unreadable(self, tmp_path, capsys):
        (tmp_path / "b.csv").write_text("junk\n")
        assert run(["report", tmp_path / "b.csv", tmp_path / "missing.csv"], capsys)[0] == 1


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "gmpb", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.startswith("gmpb ")
