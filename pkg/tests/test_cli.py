import subprocess
import sys

import numpy as np
import pytest

from a2glos.cli import UsageError, main, parse_grid
from a2glos.curves import ProbabilityCurve, max_abs_gap, read_csv
from a2glos.parametric import ParametricCoeffs, curve, table2_preset
from a2glos.scenario import preset
from a2glos.theoretical import los_probability_curve


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


class TestPresets:
    def test_rows(self, capsys):
        code, out, _ = run(capsys, "presets")
        assert code == 0
        assert "suburban 0.1 750 8 11.55 24.97" in out.splitlines()
        assert "high-rise-urban 0.1885 0.9723 17.31 15.7 0.4106" in out.splitlines()


class TestEval:
    def test_zero_distance(self, capsys):
        code, out, _ = run(capsys, "eval", "--scenario", "urban", "--h-tx", "30", "--d", "0")
        assert code == 0
        assert out.rstrip().endswith("d_rx_m,p_los\n0.000000,1.000000")
        assert "# source: theoretical" in out

    def test_curve_file(self, tmp_path, capsys):
        path = tmp_path / "t.csv"
        assert run(capsys, "eval", "--scenario", "suburban", "--h-tx", "70", "--h-rx", "1.5", "--out", str(path))[0] == 0
        c = ProbabilityCurve.from_csv(path)
        ref = los_probability_curve(70.0, 1.5, np.arange(0, 1001, 10.0), preset("suburban"))
        assert max_abs_gap(c, ref) <= 5e-7
        assert c.metadata["h_tx"] == "70.0"

    def test_eval_param_hand_value(self, capsys):
        code, out, _ = run(capsys, "eval-param", "--scenario", "suburban", "--h-tx", "102", "--h-rx", "2", "--d", "500")
        assert code == 0
        assert out.splitlines()[-1] == "500.000000,0.670947"

    def test_eval_param_elevation(self, capsys):
        code, out, _ = run(capsys, "eval-param", "--axis", "elevation", "--h-tx", "1000", "--h-rx", "0")
        assert code == 0
        lines = [l for l in out.splitlines() if not l.startswith("#")]
        assert lines[0] == "theta_rad,p_los"
        assert len(lines) == 1 + 15

    def test_custom_coeffs(self, tmp_path, capsys):
        path = tmp_path / "c.txt"
        ParametricCoeffs(1.0, 1.0, 0.0, 10.0, 0.5).save(path)
        code, out, _ = run(capsys, "eval-param", "--coeffs", str(path), "--h-tx", "52", "--d", "100")
        assert code == 0
        want = curve(ParametricCoeffs(1.0, 1.0, 0.0, 10.0, 0.5), 50.0, [100.0]).p[0]
        assert out.splitlines()[-1] == f"100.000000,{want:.6f}"


class TestExitCodes:
    def test_unknown_scenario(self, capsys):
        code, _, err = run(capsys, "eval", "--scenario", "rural")
        assert code == 1 and "rural" in err

    def test_missing_file(self, capsys):
        assert run(capsys, "eval-param", "--coeffs", "/nonexistent/c.txt")[0] == 1

    def test_negative_height(self, capsys):
        assert run(capsys, "eval", "--h-tx", "-5")[0] == 1

    def test_bad_flag(self):
        with pytest.raises(SystemExit) as info:
            main(["eval", "--bogus"])
        assert info.value.code == 1

    def test_fit_failure(self, capsys):
        # suburban links shorter than 115 m cross no building: flat curves
        code, _, err = run(capsys, "fit", "--h-prime-grid", "50:150:50", "--d-min", "5", "--d-max", "110", "--d-step", "5")
        assert code == 2 and "fit failed" in err

    def test_module_entry_point(self):
        proc = subprocess.run([sys.executable, "-m", "a2glos", "eval", "--scenario", "nope"], capture_output=True, text=True)
        assert proc.returncode == 1


class TestGrid:
    def test_parse(self):
        np.testing.assert_allclose(parse_grid("10:50:10"), [10, 20, 30, 40, 50])
        np.testing.assert_allclose(parse_grid("1,5,7"), [1, 5, 7])

    @pytest.mark.parametrize("spec", ["10:5:1", "1:5:0", "a,b"])
    def test_bad(self, spec):
        with pytest.raises(UsageError):
            parse_grid(spec)


class TestFit:
    def test_writes_coefficients_and_report(self, tmp_path, capsys):
        out, report = tmp_path / "c.txt", tmp_path / "r.csv"
        code, _, _ = run(capsys, "fit", "--scenario", "urban", "--h-prime-grid", "30:300:30",
                         "--out", str(out), "--report", str(report))
        assert code == 0
        c = ParametricCoeffs.load(out)
        assert c.scenario_label == "urban"
        _, header, rows = read_csv(report)
        assert header == ["h_prime_m", "D1_m", "D2_m", "per_height_mse"]
        assert len(rows) == 10


class TestSimulate:
    ARGS = ("simulate", "--scenario", "urban", "--h-tx", "30", "--d-min", "50", "--d-max", "500",
            "--d-step", "50", "--trials", "2000", "--seed", "42")

    def test_byte_identical(self, tmp_path, capsys):
        paths = [tmp_path / f"s{k}.csv" for k in range(3)]
        for path, threads in zip(paths, ("1", "1", "4")):
            assert run(capsys, *self.ARGS, "--threads", threads, "--out", str(path))[0] == 0
        texts = [p.read_bytes() for p in paths]
        assert texts[0] == texts[1] == texts[2]
        assert (tmp_path / "s0.csv.meta").read_bytes() == (tmp_path / "s2.csv.meta").read_bytes()
        assert b"threads" not in texts[0]

    def test_elevation_axis(self, capsys):
        code, out, _ = run(capsys, "simulate", "--axis", "elevation", "--h-tx", "1000", "--trials", "100")
        assert code == 0
        assert "theta_rad,p_los_hat,trials,ci95_halfwidth" in out


class TestCompare:
    def test_gap_matches_library(self, capsys):
        code, out, err = run(capsys, "compare", "--scenario", "suburban", "--h-tx", "30", "--h-rx", "2",
                             "--d-min", "10", "--d-max", "1000", "--d-step", "10")
        assert code == 0
        d = np.arange(10, 1001, 10.0)
        want = max_abs_gap(los_probability_curve(30.0, 2.0, d, preset("suburban")),
                           curve(table2_preset("suburban"), 28.0, d))
        assert f"max_abs_gap {want:.6f}" in err
        assert out.splitlines()[[l.startswith("x,") for l in out.splitlines()].index(True)] == \
            "x,p_theoretical,p_parametric,p_simulated"

    def test_inputs_mismatch(self, tmp_path, capsys):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        run(capsys, "eval", "--d-max", "100", "--out", str(a))
        run(capsys, "eval-param", "--d-max", "200", "--out", str(b))
        assert run(capsys, "compare", "--inputs", str(a), str(b))[0] == 1

    def test_surface_mode(self, capsys):
        code, out, err = run(capsys, "compare", "--scenario", "urban", "--h-prime-grid", "50:150:50",
                             "--d-min", "10", "--d-max", "300", "--d-step", "10")
        assert code == 0
        assert "h_prime_m,d_rx_m,p_theoretical,p_parametric,sq_error" in out


class TestFresnel:
    def test_profile(self, capsys):
        code, out, _ = run(capsys, "fresnel", "--frequency", "28e9", "--distance", "500", "--samples", "3")
        assert code == 0
        assert "250.000000,1.156875" in out.splitlines()
