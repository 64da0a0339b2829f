import csv
import io
import json
import math

import pytest

from treebellman import Params, bellman_value, build_extremizer
from treebellman.cli import CSV_COLUMNS, main

REF_ARGS = ["--p", "2", "--f", "1", "--F", "2", "--k", "0.5"]


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestValue:
    def test_human_output(self, capsys):
        code, out, _ = run(capsys, "value", *REF_ARGS)
        assert code == 0
        assert "consistency  = PASS" in out
        first = out.splitlines()[0]
        assert first.startswith("value        = ")
        assert float(first.split("=")[1]) == pytest.approx(
            3 * math.sqrt(3), rel=1e-11
        )

    def test_json(self, capsys):
        code, out, _ = run(capsys, "value", *REF_ARGS, "--json")
        assert code == 0
        payload = json.loads(out)
        assert payload["value"] == pytest.approx(3 * math.sqrt(3), rel=1e-11)
        assert payload["consistent"] is True
        assert payload["grid_rel_gap"] <= 1e-6
        assert {"p", "f", "F", "k", "B0", "Z0", "a", "p0", "p1"} <= set(payload)

    def test_csv_round_trip(self, capsys):
        code, out, _ = run(capsys, "value", *REF_ARGS, "--csv")
        assert code == 0
        rows = list(csv.reader(io.StringIO(out)))
        assert rows[0] == list(CSV_COLUMNS)
        assert len(rows) == 2 and len(rows[1]) == 12
        got = dict(zip(rows[0], (float(x) for x in rows[1])))
        r = bellman_value(Params(2, 1, 2, 0.5), grid_n=0)
        g = build_extremizer(r.params)
        assert got["value"] == r.value  # 17 digits round-trip exactly
        assert got["B0"] == r.B0
        assert got["A1"] == g.A1
        assert (got["p0"], got["p1"]) == (0.0, 1.0)

    def test_k1_has_no_grid(self, capsys):
        code, out, _ = run(capsys, "value", "--p", "2", "--f", "1", "--F", "2",
                           "--k", "1")
        assert code == 0
        assert "grid_max     = none at none" in out
        assert "consistency  = PASS" in out

    def test_infeasible_exit_1(self, capsys):
        code, _, err = run(capsys, "value", "--p", "2", "--f", "2", "--F", "1",
                           "--k", "0.5")
        assert code == 1
        assert "f^p <= F violated" in err

    def test_unreachable_tol_exit_2(self, capsys):
        code, out, _ = run(capsys, "value", *REF_ARGS, "--tol", "1e-18")
        assert code == 2
        assert "consistency  = FAIL" in out


class TestExtremal:
    def test_record(self, capsys):
        code, out, _ = run(capsys, "extremal", *REF_ARGS)
        assert code == 0
        g = build_extremizer(Params(2, 1, 2, 0.5))
        assert f"A1  = {g.A1:.17g}" in out
        assert f"B0  = {g.B0:.17g}" in out
        assert "t" not in out.split("B0")[1]  # no table without --samples

    def test_samples_table(self, capsys):
        code, out, _ = run(capsys, "extremal", *REF_ARGS, "--samples", "5")
        assert code == 0
        lines = out.strip().splitlines()
        assert "avg(t)" in out
        # 8 record lines + header + 5 rows
        assert len(lines) == 14

    def test_json(self, capsys):
        code, out, _ = run(capsys, "extremal", *REF_ARGS, "--json",
                           "--samples", "3")
        payload = json.loads(out)
        assert code == 0
        assert len(payload["table"]) == 3
        assert payload["table"][-1]["t"] == 1.0
        assert payload["a"] == pytest.approx(math.sqrt(3), abs=5e-12)

    def test_csv(self, capsys):
        code, out, _ = run(capsys, "extremal", *REF_ARGS, "--csv")
        rows = list(csv.reader(io.StringIO(out)))
        assert code == 0
        assert rows[0] == ["p", "f", "F", "k", "a", "A1", "c", "B0"]
        assert float(dict(zip(rows[0], rows[1]))["c"]) == pytest.approx(
            math.sqrt(3) - 1, rel=1e-11
        )


class TestVerify:
    def test_all_pass(self, capsys):
        code, out, _ = run(capsys, "verify", *REF_ARGS, "--trials", "5",
                           "--n", "32", "--seed", "1")
        assert code == 0
        assert out.count("PASS") == 5
        assert "FAIL" not in out
        for name in ("closed-form consistency", "attainment and moments",
                     "quadrature oracle", "supremum probe", "dyadic model"):
            assert name in out

    def test_skip_probe(self, capsys):
        code, out, _ = run(capsys, "verify", *REF_ARGS, "--trials", "0")
        assert code == 0
        assert "skipped (--trials 0)" in out

    def test_deterministic(self, capsys):
        _, out1, _ = run(capsys, "verify", *REF_ARGS, "--trials", "5",
                         "--n", "32", "--seed", "9")
        _, out2, _ = run(capsys, "verify", *REF_ARGS, "--trials", "5",
                         "--n", "32", "--seed", "9")
        assert out1 == out2

    def test_json(self, capsys):
        code, out, _ = run(capsys, "verify", *REF_ARGS, "--trials", "5",
                           "--n", "32", "--seed", "1", "--json")
        payload = json.loads(out)
        assert code == 0
        assert [c["status"] for c in payload["checks"]] == ["PASS"] * 5
        assert payload["probe"]["trials"] == 5
        assert payload["value"] == pytest.approx(3 * math.sqrt(3), rel=1e-11)

    def test_out_csv(self, capsys, tmp_path):
        path = tmp_path / "trials.csv"
        code, _, _ = run(capsys, "verify", *REF_ARGS, "--trials", "7",
                         "--n", "32", "--seed", "1", "--out", str(path))
        assert code == 0
        rows = list(csv.reader(path.open()))
        assert rows[0] == ["trial", "value"]
        assert len(rows) == 8
        assert all(float(r[1]) <= 3 * math.sqrt(3) for r in rows[1:])


class TestSweep:
    def test_k_sweep(self, capsys):
        code, out, _ = run(capsys, "sweep", "--param", "k", "--start", "0.1",
                           "--stop", "1.0", "--steps", "10",
                           "--p", "2", "--f", "1", "--F", "2")
        assert code == 0
        rows = list(csv.reader(io.StringIO(out)))
        assert rows[0] == list(CSV_COLUMNS)
        vals = [float(r[4]) for r in rows[1:]]
        assert len(vals) == 10
        assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))
        assert vals[-1] == pytest.approx(3 + 2 * math.sqrt(2), rel=1e-11)

    def test_f_moment_sweep(self, capsys):
        code, out, _ = run(capsys, "sweep", "--param", "F", "--start", "1",
                           "--stop", "2", "--steps", "5",
                           "--p", "2", "--f", "1", "--k", "0.5")
        assert code == 0
        vals = [float(r[4]) for r in list(csv.reader(io.StringIO(out)))[1:]]
        assert vals[0] == pytest.approx(0.5, abs=1e-13)  # constant case F = f^p
        assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))

    def test_single_point_matches_value(self, capsys):
        _, out_sweep, _ = run(capsys, "sweep", "--param", "k", "--start", "0.5",
                              "--stop", "0.5", "--steps", "1",
                              "--p", "2", "--f", "1", "--F", "2")
        _, out_value, _ = run(capsys, "value", *REF_ARGS, "--csv")
        assert out_sweep == out_value

    def test_infeasible_points_skipped(self, capsys):
        code, out, err = run(capsys, "sweep", "--param", "F", "--start", "0.5",
                             "--stop", "2.0", "--steps", "4",
                             "--p", "2", "--f", "1", "--k", "0.5")
        assert code == 0
        assert "skipped infeasible" in err
        assert len(list(csv.reader(io.StringIO(out)))) == 4  # header + 3 rows

    def test_out_file(self, capsys, tmp_path):
        path = tmp_path / "sweep.csv"
        code, out, _ = run(capsys, "sweep", "--param", "k", "--start", "0.2",
                           "--stop", "0.8", "--steps", "3",
                           "--p", "2", "--f", "1", "--F", "2",
                           "--out", str(path))
        assert code == 0
        assert out == ""
        assert len(list(csv.reader(path.open()))) == 4

    def test_missing_fixed_flag(self, capsys):
        code, _, err = run(capsys, "sweep", "--param", "k", "--start", "0.1",
                           "--stop", "0.9", "--p", "2", "--f", "1")
        assert code == 1
        assert "usage error" in err

    def test_bad_steps(self, capsys):
        code, _, err = run(capsys, "sweep", "--param", "k", "--start", "0.1",
                           "--stop", "0.9", "--steps", "0",
                           "--p", "2", "--f", "1", "--F", "2")
        assert code == 1


class TestUsage:
    def test_unknown_command(self, capsys):
        code, _, err = run(capsys, "frobnicate")
        assert code == 1
        assert "usage error" in err

    def test_missing_flag(self, capsys):
        code, _, _ = run(capsys, "value", "--p", "2", "--f", "1", "--F", "2")
        assert code == 1

    def test_bad_p(self, capsys):
        code, _, err = run(capsys, "value", "--p", "0.5", "--f", "1",
                           "--F", "2", "--k", "0.5")
        assert code == 1
        assert "usage error" in err
