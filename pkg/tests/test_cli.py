"""End-to-end tests for the thetachar command line."""

import json
import os
import subprocess
import sys
from fractions import Fraction as F

import pytest

from thetachar import cli
from thetachar.modular import IllConditionedError
from thetachar.suites import CaseResult, SuiteReport

EXPAND_M1_TEXT = (
    b"# expand M=1 j=1/2 sector=NS sign=+\n"
    b"# trusted below q^8\n"
    b"# x window [-4, 2]\n"
    b"q^0  1\n"
)

EXPAND_M2_TEXT = (
    b"# expand M=2 j=-1/2 sector=NS sign=+\n"
    b"# trusted below q^7/8\n"
    b"# x window [-11/2, 1/2]\n"
    b"q^-1/8  x^-3/2 + x^-7/2 + x^-11/2\n"
    b"q^3/8   2*x^-1/2 + 2*x^-5/2 + 2*x^-9/2\n"
)

EXPAND_M1_JSON = (
    b'{"q_den":8,"x_den":2,"q_order":"2",'
    b'"terms":[{"q":0,"x":0,"re":"1","im":"0"}],'
    b'"x_window":["-4","2"]}\n'
)

TABLE_CSV = (
    b"M,j,heart,k1,k2,c,h,s\n"
    b"1,1/2,I,0,0,0,0,0\n"
    b"2,1/2,I,0,1,-3,-1/4,-1/2\n"
    b"2,-1/2,III,0,1,-3,-1/4,-3/2\n"
)

TABLE_TWISTED_JSON = (
    b'{"rows":[{"M":2,"j":"0","heart":"I","k1":0,"k2":1,"c":"-3",'
    b'"h":"-1/8","s":"0"},{"M":2,"j":"1","heart":"III","k1":0,"k2":1,'
    b'"c":"-3","h":"3/8","s":"1"}]}\n'
)


def run_cli(args, cache_dir):
    env = dict(os.environ)
    env["THETACHAR_CACHE_DIR"] = str(cache_dir)
    return subprocess.run([sys.executable, "-m", "thetachar", *args],
                          capture_output=True, env=env)


class TestExpand:
    def test_level_one_text_golden(self, tmp_path):
        cp = run_cli(["expand", "--M", "1", "--j", "1/2", "--sector", "NS",
                      "--sign", "+", "--format", "text"], tmp_path)
        assert cp.returncode == 0
        assert cp.stdout == EXPAND_M1_TEXT

    def test_level_two_text_golden(self, tmp_path):
        cp = run_cli(["expand", "--M", "2", "--j=-1/2", "--sector", "ns",
                      "--sign", "plus", "--q-order", "7/8",
                      "--format", "text"], tmp_path)
        assert cp.returncode == 0
        assert cp.stdout == EXPAND_M2_TEXT

    def test_json_golden_and_deterministic(self, tmp_path):
        args = ["expand", "--M", "1", "--j", "1/2", "--sector", "NS",
                "--sign", "+", "--q-order", "2"]
        first = run_cli(args, tmp_path)
        second = run_cli(args, tmp_path)
        assert first.returncode == second.returncode == 0
        assert first.stdout == EXPAND_M1_JSON
        assert second.stdout == first.stdout

    def test_fractional_q_order_reaches_negative_exponents(self, tmp_path):
        cp = run_cli(["expand", "--M", "2", "--j", "1/2", "--sector", "NS",
                      "--sign", "-", "--q-order", "5/8"], tmp_path)
        assert cp.returncode == 0
        d = json.loads(cp.stdout)
        lowest = min(F(t["q"], d["q_den"]) for t in d["terms"])
        assert lowest == F(-1, 8)
        assert F(d["q_order"]) == F(5, 8)

    def test_default_q_order_is_eight(self, tmp_path):
        cp = run_cli(["expand", "--M", "1", "--j", "1/2", "--sector", "NS",
                      "--sign", "+"], tmp_path)
        assert json.loads(cp.stdout)["q_order"] == "8"

    def test_custom_window_is_respected(self, tmp_path):
        cp = run_cli(["expand", "--M", "2", "--j", "1/2", "--sector", "NS",
                      "--sign", "+", "--q-order", "1",
                      "--x-window=-5/2:-1/2"], tmp_path)
        assert cp.returncode == 0
        d = json.loads(cp.stdout)
        assert d["x_window"] == ["-5/2", "-1/2"]
        xs = {F(t["x"], d["x_den"]) for t in d["terms"]}
        assert xs and all(F(-5, 2) <= x <= F(-1, 2) for x in xs)

    def test_malformed_window_syntax(self, tmp_path):
        cp = run_cli(["expand", "--M", "1", "--j", "1/2", "--sector", "NS",
                      "--sign", "+", "--x-window", "1"], tmp_path)
        assert cp.returncode == 2
        assert b"LO:HI" in cp.stderr

    def test_inadmissible_j_lists_the_index_set(self, tmp_path):
        cp = run_cli(["expand", "--M", "2", "--j", "1/4", "--sector", "NS",
                      "--sign", "+"], tmp_path)
        assert cp.returncode == 2
        err = cp.stderr.decode()
        assert err.startswith("error:")
        assert "admissible j for M=2 sector NS: -1/2, 1/2" in err

    def test_bad_window_order(self, tmp_path):
        cp = run_cli(["expand", "--M", "1", "--j", "1/2", "--sector", "NS",
                      "--sign", "+", "--x-window", "1:0"], tmp_path)
        assert cp.returncode == 2
        assert b"LO <= HI" in cp.stderr

    @pytest.mark.parametrize("bad", [
        ["--sector", "XY", "--sign", "+"],
        ["--sector", "NS", "--sign", "*"],
    ])
    def test_bad_enum_values(self, tmp_path, bad):
        cp = run_cli(["expand", "--M", "1", "--j", "1/2", *bad], tmp_path)
        assert cp.returncode == 2
        assert cp.stderr.startswith(b"error:")


class TestExpandCache:
    ARGS = ["expand", "--M", "2", "--j", "1", "--sector", "R", "--sign", "-",
            "--q-order", "3/2"]

    def test_cold_and_warm_runs_are_byte_identical(self, tmp_path):
        cold = run_cli(self.ARGS, tmp_path)
        files = list(tmp_path.rglob("*.json"))
        assert len(files) == 1
        warm = run_cli(self.ARGS, tmp_path)
        assert cold.stdout == warm.stdout
        assert cold.returncode == warm.returncode == 0

    def test_corrupt_cache_entry_is_rebuilt(self, tmp_path):
        good = run_cli(self.ARGS, tmp_path)
        entry = list(tmp_path.rglob("*.json"))[0]
        entry.write_bytes(b'{"q_den": "mangled"')
        again = run_cli(self.ARGS, tmp_path)
        assert again.returncode == 0
        assert again.stdout == good.stdout
        # and the entry was healed on the way through
        rebuilt = run_cli(self.ARGS, tmp_path)
        assert rebuilt.stdout == good.stdout

    def test_well_formed_entry_for_wrong_request_is_rebuilt(self, tmp_path):
        # a cache file that decodes fine but describes a different
        # series (other trusted order) must not be served
        good = run_cli(self.ARGS, tmp_path)
        entry = list(tmp_path.rglob("*.json"))[0]
        blob = json.loads(entry.read_text())
        blob["terms"] = blob["terms"][:1]
        blob["q_order"] = "1000"
        entry.write_text(json.dumps(blob, separators=(",", ":")))
        again = run_cli(self.ARGS, tmp_path)
        assert again.returncode == 0
        assert again.stdout == good.stdout

    def test_no_cache_leaves_directory_empty(self, tmp_path):
        cp = run_cli([*self.ARGS, "--no-cache"], tmp_path)
        assert cp.returncode == 0
        assert list(tmp_path.rglob("*")) == []


class TestTable:
    def test_csv_golden(self, tmp_path):
        cp = run_cli(["table", "--M-range", "1:2"], tmp_path)
        assert cp.returncode == 0
        assert cp.stdout == TABLE_CSV

    def test_twisted_json_golden(self, tmp_path):
        cp = run_cli(["table", "--M-range", "2", "--twisted",
                      "--format", "json"], tmp_path)
        assert cp.returncode == 0
        assert cp.stdout == TABLE_TWISTED_JSON

    def test_single_level_range(self, tmp_path):
        cp = run_cli(["table", "--M-range", "3"], tmp_path)
        rows = cp.stdout.decode().strip().split("\n")[1:]
        assert len(rows) == 3
        assert all(r.startswith("3,") for r in rows)

    @pytest.mark.parametrize("rng", ["4:2", "0:1", "x", "1:2:3"])
    def test_bad_ranges(self, tmp_path, rng):
        cp = run_cli(["table", "--M-range", rng], tmp_path)
        assert cp.returncode == 2
        assert cp.stderr.startswith(b"error:")


class TestVerify:
    def test_single_suite_text(self, tmp_path):
        cp = run_cli(["verify", "--suite", "theta", "--q-order", "3"],
                     tmp_path)
        assert cp.returncode == 0
        out = cp.stdout.decode()
        assert "[pass] theta/sum-vs-product/00" in out
        assert "suite theta:" in out
        assert "0 fail" in out
        assert out.endswith("\n")

    def test_json_format(self, tmp_path):
        cp = run_cli(["verify", "--suite", "theta", "--q-order", "3",
                      "--format", "json"], tmp_path)
        d = json.loads(cp.stdout)
        (report,) = d["reports"]
        assert report["suite"] == "theta"
        assert all(c["status"] == "pass" for c in report["cases"])

    def test_unknown_suite(self, tmp_path):
        cp = run_cli(["verify", "--suite", "bogus"], tmp_path)
        assert cp.returncode == 2
        assert b"--suite must be one of" in cp.stderr

    def test_bad_jobs(self, tmp_path):
        cp = run_cli(["verify", "--suite", "theta", "--jobs", "0"], tmp_path)
        assert cp.returncode == 2

    def test_failing_case_exits_one(self, monkeypatch, capsys):
        failing = SuiteReport(
            suite="theta",
            cases=(CaseResult("theta/boom", "fail", "synthetic"),),
            wall_time=0.01,
            config={"q_order": "3", "tol": 1e-9, "precision_dps": 40})
        monkeypatch.setattr(cli, "run_suite",
                            lambda name, cfg, max_workers=None: failing)
        code = cli.main(["verify", "--suite", "theta"])
        out = capsys.readouterr().out
        assert code == 1
        assert "[FAIL] theta/boom" in out


class TestTransform:
    def test_closure_certificate(self, tmp_path):
        args = ["transform", "--M", "1", "--which", "S", "--statement", "2",
                "--precision", "30"]
        cp = run_cli(args, tmp_path)
        assert cp.returncode == 0
        cert = json.loads(cp.stdout)
        assert cert["transform"] == "S"
        assert cert["M"] == 1
        assert cert["residual"] < 1e-9
        assert len(cert["points"]) == 3 * len(cert["family"])
        again = run_cli(args, tmp_path)
        assert again.stdout == cp.stdout

    def test_output_file(self, tmp_path):
        out = tmp_path / "cert.json"
        cp = run_cli(["transform", "--M", "1", "--which", "T",
                      "--statement", "2", "--precision", "30",
                      "--output", str(out)], tmp_path)
        assert cp.returncode == 0
        assert json.loads(out.read_text())["transform"] == "T"

    def test_residual_above_tolerance_exits_one(self, tmp_path):
        cp = run_cli(["transform", "--M", "1", "--which", "S",
                      "--statement", "2", "--precision", "30",
                      "--tol", "1e-40"], tmp_path)
        assert cp.returncode == 1
        assert b"exceeds tolerance" in cp.stderr
        # the certificate is still printed for inspection
        assert json.loads(cp.stdout)["residual"] > 0

    def test_too_few_points(self, tmp_path):
        cp = run_cli(["transform", "--M", "1", "--which", "S",
                      "--statement", "2", "--points", "1"], tmp_path)
        assert cp.returncode == 2
        assert b"below the minimum" in cp.stderr

    @pytest.mark.parametrize("bad", [
        ["--which", "U"],
        ["--which", "S", "--statement", "3"],
        ["--which", "S", "--tol", "-1"],
        ["--which", "S", "--precision", "2"],
    ])
    def test_bad_arguments(self, tmp_path, bad):
        cp = run_cli(["transform", "--M", "1", *bad], tmp_path)
        assert cp.returncode == 2
        assert cp.stderr.startswith(b"error:")

    def test_ill_conditioned_fit_advises(self, monkeypatch, capsys):
        def boom(M, statement, which, pts):
            raise IllConditionedError("synthetic degeneracy")
        monkeypatch.setattr(cli, "span_closure", boom)
        code = cli.main(["transform", "--M", "1", "--which", "S",
                         "--statement", "2"])
        err = capsys.readouterr().err
        assert code == 2
        assert "synthetic degeneracy" in err
        assert "raise --points, change --seed, or raise --precision" in err


class TestTopLevel:
    def test_version(self, tmp_path):
        cp = run_cli(["--version"], tmp_path)
        assert cp.returncode == 0
        assert cp.stdout.strip() == b"thetachar 0.1.0"

    def test_no_subcommand_is_usage_error(self, tmp_path):
        cp = run_cli([], tmp_path)
        assert cp.returncode == 2

    def test_in_process_version_exit_code(self, capsys):
        assert cli.main(["--version"]) == 0
        assert capsys.readouterr().out.strip() == "thetachar 0.1.0"
