"""Command-line surface: formats, exit codes, determinism, figures."""

import json
import math

import numpy as np
import pytest

from confsize.cli import EXIT_DATA, EXIT_NUMERIC, EXIT_OK, EXIT_USAGE, main
from confsize.estimators import point_estimate_unknown
from confsize.scorers import ScoreMatrix


@pytest.fixture
def scores_csv(tmp_path):
    path = tmp_path / "scores.csv"
    path.write_text("score\n1.0\n2.0\n3.0\n")
    return str(path)


def run_json(capsys, argv):
    code = main(argv)
    out = capsys.readouterr().out
    return code, json.loads(out)


class TestEstimate:
    def test_hand_case(self, capsys, scores_csv):
        code, payload = run_json(
            capsys, ["estimate", scores_csv, "--n", "3", "--alpha", "0.5", "--factor", "l1"]
        )
        assert code == EXIT_OK
        assert payload["schema_version"] == 1
        assert payload["point"] == pytest.approx(4.0, abs=1e-12)
        assert payload["n_alpha"] == 1
        assert payload["factor"] == "l1"
        assert "lower" not in payload

    def test_gamma_populates_interval(self, capsys, scores_csv):
        code, payload = run_json(
            capsys,
            [
                "estimate", scores_csv,
                "--n", "3", "--alpha", "0.5", "--factor", "l1", "--gamma", "0.1",
            ],
        )
        assert code == EXIT_OK
        assert payload["lower"] <= payload["point"] <= payload["upper"]
        assert payload["gamma"] == 0.1
        assert payload["truncation"] == 3.0

    def test_bad_factor_is_usage_error(self, capsys, scores_csv):
        code = main(
            ["estimate", scores_csv, "--n", "3", "--alpha", "0.5", "--factor", "l7"]
        )
        assert code == EXIT_USAGE

    def test_unknown_factor_is_usage_error(self, capsys, scores_csv):
        code = main(
            ["estimate", scores_csv, "--n", "3", "--alpha", "0.5", "--factor", "unknown"]
        )
        assert code == EXIT_USAGE

    def test_missing_file_is_data_error(self, capsys, tmp_path):
        code = main(
            ["estimate", str(tmp_path / "nope.csv"), "--n", "3", "--alpha", "0.5", "--factor", "l1"]
        )
        assert code == EXIT_DATA

    def test_malformed_file_is_data_error(self, capsys, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("score\noops\n")
        code = main(["estimate", str(path), "--n", "3", "--alpha", "0.5", "--factor", "l1"])
        assert code == EXIT_DATA

    def test_infinite_regime_exit_code(self, capsys, tmp_path):
        path = tmp_path / "two.csv"
        path.write_text("1.0\n2.0\n")
        code, payload = run_json(
            capsys, ["estimate", str(path), "--n", "2", "--alpha", "0.1", "--factor", "l1"]
        )
        assert code == EXIT_NUMERIC
        assert payload["point"] == "inf"
        assert payload["infinite_threshold_regime"] is True


class TestEstimateMatrix:
    @pytest.fixture
    def matrix_files(self, tmp_path):
        matrix = tmp_path / "matrix.csv"
        matrix.write_text("0,1\n0.1,0.4\n0.2,0.9\n")
        marginal = tmp_path / "marginal.csv"
        marginal.write_text("0.5\n0.8\n")
        return str(matrix), str(marginal)

    def test_counting_measure_matches_library(self, capsys, matrix_files):
        matrix_path, marginal_path = matrix_files
        code, payload = run_json(
            capsys,
            ["estimate-matrix", matrix_path, marginal_path, "--n", "6", "--alpha", "0.25"],
        )
        assert code == EXIT_OK
        lib = point_estimate_unknown(
            ScoreMatrix(
                scores=np.array([[0.1, 0.4], [0.2, 0.9]]),
                grid=np.array([0.0, 1.0]),
                weights=np.ones(2),
                marginal=np.array([0.5, 0.8]),
            ),
            6,
            0.25,
        )
        assert payload["point"] == pytest.approx(lib.point, abs=1e-12)

    def test_trapezoid_measure(self, capsys, tmp_path):
        matrix = tmp_path / "m.csv"
        matrix.write_text("0,0.5,1\n0.3,0.2,0.7\n")
        marginal = tmp_path / "g.csv"
        marginal.write_text("0.4\n")
        code, payload = run_json(
            capsys,
            [
                "estimate-matrix", str(matrix), str(marginal),
                "--n", "5", "--alpha", "0.2", "--label-measure", "trapezoid",
            ],
        )
        assert code == EXIT_OK
        assert payload["label_measure"] == "trapezoid"

    def test_row_count_mismatch(self, capsys, tmp_path):
        matrix = tmp_path / "m.csv"
        matrix.write_text("0,1\n0.1,0.2\n")
        marginal = tmp_path / "g.csv"
        marginal.write_text("0.4\n0.5\n0.6\n")
        code = main(
            ["estimate-matrix", str(matrix), str(marginal), "--n", "5", "--alpha", "0.2"]
        )
        assert code == EXIT_DATA

    def test_missing_marginal_argument_is_usage(self, tmp_path):
        with pytest.raises(SystemExit) as exc:
            main(["estimate-matrix", str(tmp_path / "m.csv"), "--n", "5", "--alpha", "0.2"])
        assert exc.value.code == EXIT_USAGE


class TestConditional:
    def test_three_label_case(self, capsys, tmp_path, scores_csv):
        row = tmp_path / "row.csv"
        row.write_text("1.0\n2.0\n3.0\n")
        code, payload = run_json(
            capsys, ["conditional", scores_csv, str(row), "--n", "3", "--alpha", "0.5"]
        )
        assert code == EXIT_OK
        assert payload["point"] == pytest.approx(2.0, abs=1e-12)
        assert payload["labels"] == 3

    def test_row_below_everything(self, capsys, tmp_path, scores_csv):
        row = tmp_path / "row.csv"
        row.write_text("0.1\n0.2\n")
        code, payload = run_json(
            capsys, ["conditional", scores_csv, str(row), "--n", "9", "--alpha", "0.5"]
        )
        assert payload["point"] == pytest.approx(2.0)

    def test_row_above_everything(self, capsys, tmp_path, scores_csv):
        row = tmp_path / "row.csv"
        row.write_text("9.0\n")
        code, payload = run_json(
            capsys, ["conditional", scores_csv, str(row), "--n", "9", "--alpha", "0.5"]
        )
        assert payload["point"] == 0.0


class TestSynthetic:
    BASE = [
        "synthetic",
        "--a", "1", "--b", "1", "--m", "5", "--n", "10,20",
        "--gamma", "0.1", "--runs", "20", "--repeats", "2", "--seed", "5",
    ]

    def test_byte_identical_output(self, capsys):
        assert main(self.BASE) == EXIT_OK
        first = capsys.readouterr().out
        assert main(self.BASE) == EXIT_OK
        second = capsys.readouterr().out
        assert first == second
        header = first.split("\n", 1)[0]
        assert header == "a,b,m,n,alpha,gamma,repeat,theoretical,mc_avg,point,lower,upper,contains_truth"

    def test_out_file_and_figures(self, capsys, tmp_path):
        out = tmp_path / "grid.csv"
        figs = tmp_path / "figs"
        code = main(self.BASE + ["--out", str(out), "--plot-dir", str(figs)])
        assert code == EXIT_OK
        assert out.exists() and out.stat().st_size > 0
        pngs = sorted(p.name for p in figs.glob("*.png"))
        assert pngs == ["interval_containment.png", "sizes_vs_exact.png"]
        for p in figs.glob("*.png"):
            assert p.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"

    def test_containment_mostly_true(self, capsys):
        assert main(self.BASE) == EXIT_OK
        lines = capsys.readouterr().out.strip().split("\n")[1:]
        flags = [int(line.split(",")[-1]) for line in lines]
        assert sum(flags) / len(flags) >= 0.9

    def test_single_cell_under_budget(self, capsys):
        import time

        start = time.time()
        code = main(
            ["synthetic", "--a", "1", "--b", "1", "--m", "100", "--n", "1000",
             "--gamma", "0.1", "--runs", "200", "--repeats", "1", "--seed", "0"]
        )
        elapsed = time.time() - start
        capsys.readouterr()
        assert code == EXIT_OK
        assert elapsed < 5.0


class TestMc:
    def test_degenerate_single_atom(self, capsys):
        code, payload = run_json(
            capsys,
            ["mc", "--a", "1", "--b", "1", "--m", "1", "--n", "20",
             "--alpha", "0.1", "--runs", "30", "--seed", "2"],
        )
        assert code == EXIT_OK
        assert payload["mean_size"] == pytest.approx(2.0)
        assert payload["theoretical"] == pytest.approx(2.0)

    def test_oracle_agreement_and_intervals(self, capsys):
        code, payload = run_json(
            capsys,
            ["mc", "--a", "0.25", "--b", "4", "--m", "10", "--n", "50",
             "--alpha", "0.1", "--runs", "400", "--seed", "3"],
        )
        assert code == EXIT_OK
        assert abs(payload["mean_size"] - payload["theoretical"]) <= 4 * payload["mc_se"] + 1e-9
        hoeffding = payload["intervals"]["hoeffding"]
        assert hoeffding["lower"] <= payload["theoretical"] <= hoeffding["upper"]

    def test_seed_echoed(self, capsys):
        code, payload = run_json(
            capsys,
            ["mc", "--a", "1", "--b", "1", "--m", "3", "--n", "10", "--runs", "5"],
        )
        assert code == EXIT_OK
        assert isinstance(payload["seed"], int)


class TestCoverage:
    def test_band(self, capsys):
        code, payload = run_json(
            capsys,
            ["coverage", "--n", "99", "--alpha", "0.1", "--trials", "4000", "--seed", "11"],
        )
        assert code == EXIT_OK
        assert payload["exact_miscoverage_continuous"] == pytest.approx(0.1)
        slack = 3 * math.sqrt(0.1 * 0.9 / 4000)
        assert 0.09 - slack <= payload["miscoverage"] <= 0.1 + slack

    def test_deterministic(self, capsys):
        argv = ["coverage", "--n", "50", "--alpha", "0.2", "--trials", "500", "--seed", "4"]
        _, one = run_json(capsys, argv)
        _, two = run_json(capsys, argv)
        assert one == two
