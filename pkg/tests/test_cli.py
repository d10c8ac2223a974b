"""End-to-end CLI checks: exit codes, file outputs, determinism."""

import csv
import json
import math

import pytest

from pdem.cli import figure1_rows, main


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


class TestXq:
    def test_prints_root(self, capsys):
        code, out, _ = run(["xq", "1.0"], capsys)
        assert code == 0
        assert float(out.split()[-1]) == pytest.approx(0.860334, abs=1e-5)

    def test_rejects_negative(self, capsys):
        code, _, err = run(["xq", "-2"], capsys)
        assert code == 1


class TestSolve:
    def test_json_output(self, tmp_path, capsys):
        out = tmp_path / "levels.json"
        code, text, _ = run([
            "solve",
            "--mass", '{"kind": "constant"}',
            "--potential", '{"kind": "scarf1", "A": 3, "B": 1}',
            "--n", "300", "--k", "3", "--out", str(out),
        ], capsys)
        assert code == 0
        payload = json.loads(out.read_text())
        assert payload["eigenvalues"] == pytest.approx([0.0, 7.0, 16.0], abs=1e-3)
        assert payload["config"]["potential"]["kind"] == "scarf1"
        assert "0" in text and "converged" in text

    def test_csv_vector_output(self, tmp_path, capsys):
        out = tmp_path / "modes.csv"
        code, _, _ = run([
            "solve",
            "--mass", '{"kind": "sech2", "q": 1}',
            "--ordering", '{"preset": "BDD"}',
            "--xmin", "-8", "--xmax", "8", "--n", "200", "--k", "2",
            "--out", str(out),
        ], capsys)
        assert code == 0
        with out.open() as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["x", "psi0", "psi1"]
        assert len(rows) == 1 + 4 * 200 + 3  # finest grid has 4n+3 nodes

    def test_config_file_with_inline_override(self, tmp_path, capsys):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({
            "mass": {"kind": "constant"},
            "potential": {"kind": "scarf1", "A": 3, "B": 1},
            "grid": {"n": 200}, "k": 2,
        }))
        code, text, _ = run(["solve", "--config", str(cfg), "--k", "1"], capsys)
        assert code == 0
        assert text.count("\n") == 3  # header lines plus a single level

    def test_malformed_json_exits_one_without_file(self, tmp_path, capsys):
        out = tmp_path / "x.json"
        code, _, err = run([
            "solve", "--mass", '{"kind": oops}', "--n", "100", "--out", str(out),
        ], capsys)
        assert code == 1
        assert not out.exists()
        assert "JSON" in err

    def test_missing_n_is_usage_error(self, capsys):
        code, _, err = run(["solve", "--mass", '{"kind": "constant"}',
                            "--potential", '{"kind": "qes", "A": 2}'], capsys)
        assert code == 1
        assert "n" in err

    def test_mass_floor_is_numeric_error(self, capsys):
        code, _, err = run([
            "solve", "--mass", '{"kind": "sech2", "q": 1}',
            "--xmin", "-50", "--xmax", "50", "--n", "100",
            "--bc-left", "dirichlet", "--bc-right", "dirichlet",
        ], capsys)
        assert code == 2

    def test_robin_flag_parses(self, capsys):
        code, _, _ = run([
            "solve", "--mass", '{"kind": "sech2", "q": 1}',
            "--ordering", '{"preset": "ZK"}',
            "--xmin", "-8", "--xmax", "8", "--n", "200", "--k", "2",
            "--bc-left", "robin:1", "--bc-right", "robin:-1", "--no-vectors",
        ], capsys)
        assert code == 0


class TestFigure1:
    def test_default_families(self):
        rows = figure1_rows(3.0, 1.0, [0.0, 0.1, 0.5, 1.0], 401, 1e-3)
        qs = sorted({q for q, _, _ in rows})
        assert qs == [0.0, 0.1, 0.5, 1.0]
        assert len(rows) == 4 * 401
        # all four curves cross at V2(0) = B^2 - A
        center = [v for q, x, v in rows if x == 0.0]
        assert len(center) == 4
        assert center == pytest.approx([-2.0] * 4, abs=1e-12)

    def test_supports_shrink_with_q(self):
        rows = figure1_rows(3.0, 1.0, [0.1, 1.0], 51, 1e-3)
        width = {q: max(x for qq, x, _ in rows if qq == q) for q in (0.1, 1.0)}
        assert width[1.0] < width[0.1] < math.pi / 2

    def test_csv_deterministic(self, tmp_path, capsys):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        for path in (a, b):
            code, _, _ = run(["figure1", "--out", str(path)], capsys)
            assert code == 0
        assert a.read_bytes() == b.read_bytes()
        with a.open() as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["q", "x", "V2"]
        assert len(rows) == 1 + 4 * 401

    def test_plot_file_rendered(self, tmp_path, capsys):
        png = tmp_path / "curves.png"
        code, _, _ = run(["figure1", "--samples", "51", "--out",
                          str(tmp_path / "c.csv"), "--plot", str(png)], capsys)
        assert code == 0
        assert png.stat().st_size > 1000

    def test_negative_q_rejected(self, capsys):
        code, _, _ = run(["figure1", "--q", "-0.5"], capsys)
        assert code == 1


class TestVerify:
    @pytest.mark.parametrize("suite", ["identity4", "duality", "v1vanish",
                                       "intertwine", "spectra"])
    def test_suites_pass(self, suite, capsys):
        code, out, _ = run(["verify", suite], capsys)
        assert code == 0
        assert "PASS" in out
        assert "FAIL" not in out

    def test_unknown_suite(self, capsys):
        code, _, err = run(["verify", "everything"], capsys)
        assert code == 1
