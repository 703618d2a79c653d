import csv
import io
import json
import math
from fractions import Fraction as F

import pytest

from lienorm.cli import run


def run_capture(capsys, *argv):
    code = run(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


class TestMorseTrace:
    def test_f4_coefficient_in_json(self, capsys):
        code, out, _ = run_capture(
            capsys, "morse-trace", "--steps", "4", "--order", "18",
            "--format", "json",
        )
        assert code == 0
        doc = json.loads(out)
        f4 = doc["rounds"][4]["f"]
        assert f4["coeffs"][18] == "-295245/16"
        assert f4["coeffs"][2] == "1/2"

    def test_normalizer_included(self, capsys):
        code, out, _ = run_capture(capsys, "morse-trace", "--steps", "3",
                                   "--order", "8")
        doc = json.loads(out)
        psi = doc["normalizer"]["coeffs"]
        assert psi[1] == "1/1" and psi[2] == "-1/1" and psi[3] == "5/2"

    def test_deterministic_output(self, capsys):
        _, out1, _ = run_capture(capsys, "morse-trace", "--steps", "2")
        _, out2, _ = run_capture(capsys, "morse-trace", "--steps", "2")
        assert out1 == out2

    def test_stamp_outside_data(self, capsys):
        _, plain, _ = run_capture(capsys, "morse-trace", "--steps", "1")
        _, stamped, _ = run_capture(capsys, "morse-trace", "--steps", "1",
                                    "--stamp")
        doc = json.loads(stamped)
        assert doc["data"] == json.loads(plain)
        assert "stamp" in doc


class TestNormalize:
    def test_round_trip_series(self, capsys):
        code, out, _ = run_capture(
            capsys, "normalize", "--n", "4", "--beta", "1/2", "--steps", "2",
            "--order", "12",
        )
        assert code == 0
        doc = json.loads(out)
        b0 = doc["rounds"][0]["b"]
        assert b0["coeffs"][4] == "1/2"
        from lienorm.power_series import TruncSeries
        series = TruncSeries.from_dict(b0)
        assert series.to_dict() == b0


class TestCertify:
    def test_passing_certificate(self, capsys):
        code, out, _ = run_capture(capsys, "certify", "--t0", "0.004")
        assert code == 0
        doc = json.loads(out)
        assert doc["passes"] is True
        assert doc["conditions"]["ii"]["holds"] is True

    def test_failing_certificate_exits_one_with_document(self, capsys):
        code, out, _ = run_capture(capsys, "certify", "--t0", "0.0044")
        assert code == 1
        doc = json.loads(out)
        assert doc["passes"] is False
        assert doc["conditions"]["ii"]["holds"] is False

    def test_trajectory_attached(self, capsys):
        code, out, _ = run_capture(capsys, "certify", "--t0", "0.004",
                                   "--steps", "5")
        doc = json.loads(out)
        assert len(doc["trajectory"]) == 6
        bounds = [row["bound"] for row in doc["trajectory"]]
        assert bounds == sorted(bounds, reverse=True)


class TestThreshold:
    def test_reference_values(self, capsys):
        code, out, _ = run_capture(capsys, "threshold")
        assert code == 0
        doc = json.loads(out)
        assert doc["T0"] == pytest.approx(0.00431108720123, abs=1e-11)
        assert doc["t_inf"] == pytest.approx(0.001437029067, abs=1e-11)


class TestOptimize:
    def test_equalized_document(self, capsys):
        code, out, _ = run_capture(capsys, "optimize", "--mode", "equalized")
        assert code == 0
        doc = json.loads(out)
        assert doc["lambda"] == pytest.approx(0.4145717, abs=1e-6)
        assert doc["mu"] == pytest.approx(0.6054472, abs=1e-6)
        assert doc["e_t_inf"] == pytest.approx(0.0188344, abs=1e-6)

    def test_basic_document(self, capsys):
        _, out, _ = run_capture(capsys, "optimize", "--mode", "basic")
        doc = json.loads(out)
        assert doc["lambda"] == pytest.approx(0.448612476, abs=1e-6)


class TestQTable:
    def test_csv_rows(self, capsys):
        code, out, _ = run_capture(capsys, "qtable", "--n", "3,10,50",
                                   "--format", "csv")
        assert code == 0
        rows = list(csv.reader(io.StringIO(out)))
        assert rows[0] == ["n", "lambda", "mu", "Q", "true_radius", "t_inf"]
        q = {int(r[0]): float(r[3]) for r in rows[1:]}
        assert q[3] == pytest.approx(27.775, abs=0.005)
        assert q[10] == pytest.approx(1.584, abs=0.005)
        assert q[50] == pytest.approx(1.099, abs=0.005)

    def test_json_round_trip(self, capsys):
        _, out, _ = run_capture(capsys, "qtable", "--n", "3")
        doc = json.loads(out)
        assert doc[0]["n"] == 3


class TestPrisma:
    def test_exact_fraction_trajectory(self, capsys):
        code, out, _ = run_capture(
            capsys, "prisma", "--t", "1", "--s", "3/4", "--x", "1/16",
            "--R", "1", "--k", "0", "--l", "1", "--lambda", "1/2",
            "--steps", "4",
        )
        assert code == 0
        doc = json.loads(out)
        traj = doc["trajectory"]
        assert traj[1] == {"t": "3/4", "s": "5/8", "x": "1/64"}
        assert traj[2]["x"] == "1/512"
        assert doc["diagnostics"]["rapidly_convergent"] is True

    def test_parametric_flag(self, capsys):
        _, out, _ = run_capture(
            capsys, "prisma", "--t", "1", "--s", "3/4", "--x", "1/16",
            "--alpha", "0", "--steps", "3",
        )
        doc = json.loads(out)
        assert doc["trajectory"][1]["alpha"] == "1/16"


class TestDefset:
    CONE = json.dumps({"op": "linear", "a": "1/2", "c": 0})

    def test_contains(self, capsys):
        code, out, _ = run_capture(
            capsys, "defset", "contains", "--set", self.CONE,
            "--t", "1", "--s", "2/5",
        )
        assert code == 0
        assert json.loads(out)["contains"] is True

    def test_convolve_symbolic(self, capsys):
        other = json.dumps({"op": "linear", "a": "1/3", "c": 0})
        _, out, _ = run_capture(
            capsys, "defset", "convolve", "--set", self.CONE, "--other", other,
        )
        doc = json.loads(out)
        assert doc["boundary"] == {"op": "linear", "a": "1/6", "c": "0/1"}

    def test_idempotent_diagonal(self, capsys):
        code, out, _ = run_capture(capsys, "defset", "idempotent",
                                   "--set", "diagonal", "--grid", "12")
        assert json.loads(out)["idempotent_on_grid"] is True

    def test_invalid_json_is_exit_two(self, capsys):
        code, _, err = run_capture(capsys, "defset", "contains",
                                   "--set", "{broken", "--t", "1", "--s", "1/2")
        assert code == 2


class TestNorms:
    def test_nagumo(self, capsys):
        code, out, _ = run_capture(
            capsys, "norms", "nagumo", "--coeffs", "0,0,1", "--k", "1",
            "--t", "1", "--s", "1/2",
        )
        assert code == 0
        assert json.loads(out)["nagumo_holds"] is True

    def test_borel_divergence_is_exit_one(self, capsys):
        code, out, _ = run_capture(capsys, "norms", "borel", "--x", "1")
        assert code == 1

    def test_borel_value(self, capsys):
        code, out, _ = run_capture(capsys, "norms", "borel", "--x", "1/2")
        assert json.loads(out)["bound"] == pytest.approx(2.0)

    def test_lambda_p(self, capsys):
        code, out, _ = run_capture(capsys, "norms", "lambda-p", "--grid", "8")
        assert json.loads(out)["lambda_p_holds"] is True


class TestPlotGrid:
    def test_masks_outside_triangle(self, capsys):
        code, out, _ = run_capture(capsys, "plot-grid", "--resolution", "3",
                                   "--format", "csv")
        rows = list(csv.reader(io.StringIO(out)))
        assert rows[0] == ["lambda", "mu", "value"]
        body = rows[1:]
        assert len(body) == 9
        masked = [r for r in body if r[2] == ""]
        assert len(masked) == 6  # lam >= mu on a 3x3 uniform grid

    def test_value_matches_objective(self, capsys):
        _, out, _ = run_capture(capsys, "plot-grid", "--resolution", "3",
                                "--format", "csv")
        rows = list(csv.reader(io.StringIO(out)))
        vals = {(float(r[0]), float(r[1])): r[2] for r in rows[1:]}
        got = float(vals[(0.25, 0.5)])
        assert got == pytest.approx(1 / 256)

    def test_grid_maximum_near_optimizer(self, capsys):
        _, out, _ = run_capture(capsys, "plot-grid", "--resolution", "200",
                                "--format", "csv")
        rows = list(csv.reader(io.StringIO(out)))
        best = max(float(r[2]) for r in rows[1:] if r[2])
        from lienorm.paramopt import maximize_basic
        assert best == pytest.approx(maximize_basic().objective, abs=1e-3)


class TestExitCodes:
    def test_unknown_flag(self, capsys):
        assert run(["morse-trace", "--bogus"]) == 2

    def test_unknown_command(self, capsys):
        assert run(["frobnicate"]) == 2

    def test_output_file(self, tmp_path, capsys):
        target = tmp_path / "out.json"
        code = run(["threshold", "--out", str(target)])
        assert code == 0
        assert json.loads(target.read_text())["T0"] > 0
