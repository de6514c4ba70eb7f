import json
import subprocess
import sys

import numpy as np
import pytest

from spectralfactor.cli import build_parser, main
from spectralfactor.io import read_series_csv, write_boundary_csv
from spectralfactor.pipeline import (
    EXIT_CHECK_FAILED,
    EXIT_DIAGNOSTIC,
    EXIT_OK,
    EXIT_USAGE,
    ConfigError,
    load_config,
)
from spectralfactor.spectra import BoundaryFunction, FrequencyGrid

FAST = ["--n", "4096", "--replicas", "2"]


def report(out, name):
    return json.loads((out / name).read_text())


class TestConfig:
    def test_defaults(self):
        cfg = load_config(None, {"subcommand": "factor"})
        assert cfg.M == 4096 and cfg.K == 256 and cfg.seed == 0

    def test_file_then_flags(self, tmp_path):
        p = tmp_path / "c.json"
        p.write_text(json.dumps({"model": "ar1_plus_noise", "a": 0.5, "sigma2": 2.0, "M": 2048, "K": 64}))
        cfg = load_config(str(p), {"subcommand": "wiener", "K": 32, "params": {"a": 0.6}})
        assert cfg.M == 2048 and cfg.K == 32
        assert cfg.params == {"a": 0.6, "sigma2": 2.0}

    def test_invalid_values(self):
        for bad in ({"M": 1000}, {"tol_recon": 0.0}, {"replicas": 1}, {"seed": -1}):
            with pytest.raises(ConfigError):
                load_config(None, {"subcommand": "factor", **bad})

    def test_unreadable_file(self, tmp_path):
        with pytest.raises(ConfigError):
            load_config(str(tmp_path / "missing.json"), {"subcommand": "factor"})

    def test_parser_lists(self):
        args = build_parser().parse_args(["rate", "--N", "8,16", "--floor", "1e-9"])
        assert args.N == [8, 16] and args.floor == 1e-9
        args = build_parser().parse_args(["factor", "--floor", "0.5"])
        assert args.density_floor == 0.5


class TestSubcommands:
    def test_factor(self, tmp_path):
        assert main(["factor", "--model", "cosine", "--out", str(tmp_path)]) == EXIT_OK
        rep = report(tmp_path, "factor_report.json")
        assert rep["status"] == "ok" and rep["delta"] == pytest.approx(0.25)
        phi = read_series_csv(tmp_path / "phi_plus.csv")
        assert np.allclose(phi.coeffs[:3], [1, 0.5, 0], atol=1e-12)

    def test_wiener(self, tmp_path):
        assert main(["wiener", "--model", "ar1_plus_noise", "--out", str(tmp_path)]) == EXIT_OK
        rep = report(tmp_path, "wiener_report.json")
        assert abs(rep["mmse_spectral"] - rep["mmse_oracle_L64"]) <= 0.02 * rep["mmse_oracle_L64"]
        for name in ("hw.csv", "he.csv", "h.csv"):
            assert (tmp_path / name).exists()

    def test_approx_from_series(self, tmp_path):
        s = tmp_path / "s.csv"
        s.write_text("k,re,im\n" + "".join(f"{k},{(-0.5) ** k!r},0\n" for k in range(60)))
        code = main(["approx", "--series", str(s), "--N", "4,8,16,32", "--kind", "trunc", "--out", str(tmp_path)])
        assert code == EXIT_OK
        rep = report(tmp_path, "rate_report.json")
        assert rep["error"][0] == pytest.approx(0.5 ** 5 / 0.5, rel=1e-9)
        assert (tmp_path / "approx_truncation_N8.csv").exists()

    def test_rate(self, tmp_path):
        assert main(["rate", "--model", "holder", "--M", "16384", "--out", str(tmp_path)]) == EXIT_OK
        rep = report(tmp_path, "rate_report.json")
        assert rep["checks"]["jackson_rate"]["passed"]

    def test_probe(self, tmp_path):
        code = main(["probe", "--terms", "1024", "--radii", "0.9,0.99", "--out", str(tmp_path)])
        assert code == EXIT_OK
        rep = report(tmp_path, "probe_report.json")
        assert rep["status"] == "ok" and rep["model"] == "pathological"
        assert rep["outer"][0]["nondecreasing"] and rep["gamma"][0]["nondecreasing"]

    def test_probe_other_model(self, tmp_path):
        code = main(["probe", "--model", "cosine", "--radii", "0.9,0.99", "--out", str(tmp_path)])
        assert code == EXIT_OK
        rep = report(tmp_path, "probe_report.json")
        assert rep["gamma_source"] == "psi / phi_minus" and rep["outer"][0]["shrinking"]

    def test_simulate(self, tmp_path):
        assert main(["simulate", "--model", "ar1", *FAST, "--out", str(tmp_path)]) == EXIT_OK
        rep = report(tmp_path, "simulate_report.json")
        assert rep["checks"]["periodogram"]["passed"]

    def test_pass_through_pipeline(self, tmp_path):
        assert main(["pipeline", "--model", "cosine", *FAST, "--out", str(tmp_path)]) == EXIT_OK
        rep = report(tmp_path, "pipeline_report.json")
        rx0 = 1.25
        assert rep["mse"]["N64"]["mean"] <= 1e-6 * rx0

    def test_boundary_file(self, tmp_path):
        g = FrequencyGrid(1024)
        path = write_boundary_csv(tmp_path / "d.csv", BoundaryFunction(g, 1.25 + np.cos(g.nodes)))
        assert main(["factor", "--boundary", str(path), "--out", str(tmp_path)]) == EXIT_OK


class TestExitCodes:
    def test_usage_error(self, tmp_path):
        assert main(["factor", "--M", "1000", "--out", str(tmp_path)]) == EXIT_USAGE

    def test_bad_parameter_is_usage_error(self, tmp_path):
        assert main(["factor", "--model", "ar1", "--param", "b=2", "--out", str(tmp_path)]) == EXIT_USAGE
        assert report(tmp_path, "factor_report.json")["status"] == "usage_error"

    def test_nonpositive_density_is_diagnostic(self, tmp_path):
        assert main(["factor", "--cosine", "0,0.5", "--out", str(tmp_path)]) == EXIT_DIAGNOSTIC
        rep = report(tmp_path, "factor_report.json")
        assert rep["status"] == "diagnostic_error" and "omega" in rep["error"]

    def test_floor_rescues(self, tmp_path):
        assert main(["factor", "--cosine", "0,0.5", "--floor", "2", "--out", str(tmp_path)]) == EXIT_OK
        phi = read_series_csv(tmp_path / "phi_plus.csv")
        assert np.allclose(phi.coeffs[:2], [(1 + np.sqrt(3)) / 2, (np.sqrt(3) - 1) / 2], atol=1e-9)

    def test_reconstruction_diagnostic(self, tmp_path):
        code = main(["factor", "--model", "holder", "--tol-recon", "1e-300", "--out", str(tmp_path)])
        assert code == EXIT_DIAGNOSTIC

    def test_failed_check(self, tmp_path):
        # the length-1 Toeplitz reference is far above what the V_64 cascade achieves
        code = main(["pipeline", "--model", "ar1_plus_noise", "--oracle-L", "1", *FAST, "--out", str(tmp_path)])
        assert code == EXIT_CHECK_FAILED
        rep = report(tmp_path, "pipeline_report.json")
        assert rep["status"] == "check_failed" and not rep["checks"]["mse_vs_oracle"]["passed"]

    def test_module_entry_point(self, tmp_path):
        res = subprocess.run([sys.executable, "-m", "spectralfactor", "factor", "--model", "constant",
                              "--out", str(tmp_path)], capture_output=True, text=True)
        assert res.returncode == EXIT_OK and "factor: ok" in res.stderr


class TestDeterminism:
    def test_pipeline_reports_identical(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        for out in (a, b):
            assert main(["pipeline", "--model", "ar1_plus_noise", *FAST, "--seed", "3", "--out", str(out)]) in (0, 1)
        ra, rb = report(a, "pipeline_report.json"), report(b, "pipeline_report.json")
        ra.pop("timestamp"), rb.pop("timestamp")
        assert ra == rb
