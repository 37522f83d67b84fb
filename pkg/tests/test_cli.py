import json
import math
import os
import pathlib
import subprocess
import sys

import numpy as np
import pytest

from isospec import cli
from isospec.io import read_csv, read_json


def run(args, **kwargs):
    return cli.main(list(args), **kwargs)


@pytest.fixture(autouse=True)
def _workdir(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    monkeypatch.delenv("ISOSPEC_THREADS", raising=False)
    return tmp_path


class TestUsageAndValidation:
    def test_missing_command_is_usage_error(self):
        assert run([]) == cli.EXIT_USAGE

    def test_unknown_command_is_usage_error(self):
        assert run(["frobnicate"]) == cli.EXIT_USAGE

    def test_unknown_flag_is_usage_error(self):
        assert run(["deform", "--bogus", "1"]) == cli.EXIT_USAGE

    def test_forbidden_lambda_names_interval(self, capsys):
        rc = run(["deform", "--lambda", "-0.5", "--output", "d.csv"])
        assert rc == cli.EXIT_VALIDATION
        assert "[-1, 0]" in capsys.readouterr().err

    def test_even_point_count_rejected(self):
        assert run(["deform", "--n-points", "4000", "--output", "d.csv"]) == cli.EXIT_VALIDATION

    def test_verify_rejects_csv(self):
        assert run(["verify", "--format", "csv"]) == cli.EXIT_VALIDATION

    def test_output_to_missing_directory_is_io_error(self):
        # small grid so the failure is cheap
        rc = run(["deform", "--n-points", "101", "--x-min", "-8", "--x-max", "8",
                  "--n-max", "0", "--output", "no/such/dir/d.csv"])
        assert rc == cli.EXIT_IO

    def test_bad_thread_cap_rejected(self, monkeypatch):
        monkeypatch.setenv("ISOSPEC_THREADS", "lots")
        assert run(["deform", "--output", "d.csv"]) == cli.EXIT_VALIDATION

    @pytest.mark.parametrize("cap", ["2", "0"])  # 0 means automatic
    def test_thread_cap_accepted(self, monkeypatch, tmp_path, cap):
        monkeypatch.setenv("ISOSPEC_THREADS", cap)
        assert run(["deform", "--n-points", "201", "--x-min", "-9", "--x-max", "9",
                    "--n-max", "2", "--output", "d.csv"]) == cli.EXIT_OK


SMALL = ["--n-points", "1001", "--x-min", "-10", "--x-max", "10", "--n-max", "20"]


class TestDeformCommand:
    def test_csv_columns(self, tmp_path):
        assert run(["deform", "--lambda", "1", "--output", "d.csv"]) == cli.EXIT_OK
        header, cols = read_csv(tmp_path / "d.csv")
        assert header == ["x", "phi", "W_hat", "V_lambda", "theta0"]
        assert cols[0].size == 4001
        mid = 2000
        assert cols[1][mid] == pytest.approx(1.0 / math.sqrt(math.pi) / 1.5, abs=1e-12)

    def test_sidecar_written(self, tmp_path):
        run(["deform", "--output", "d.csv"])
        meta = read_json(tmp_path / "d.csv.meta.json")
        assert meta["command"] == "deform"
        assert meta["config"]["lambda"] == 1.0
        assert "numpy" in meta["versions"]
        assert meta["wall_time_s"] >= 0.0

    def test_default_output_name(self, tmp_path):
        assert run(["deform", *SMALL]) == cli.EXIT_OK
        assert (tmp_path / "deform.csv").exists()
        assert (tmp_path / "deform.csv.meta.json").exists()

    def test_json_format(self, tmp_path):
        run(["deform", *SMALL, "--format", "json", "--output", "d.json"])
        payload = read_json(tmp_path / "d.json")
        assert payload["lambda"] == 1.0
        assert len(payload["theta0"]) == 1001


class TestSpectrumCommand:
    def test_levels_match(self, tmp_path):
        assert run(["spectrum", "--levels", "5", "--output", "s.csv"]) == cli.EXIT_OK
        header, cols = read_csv(tmp_path / "s.csv")
        assert header == ["n", "base", "deformed"]
        assert np.abs(cols[1] - cols[2]).max() < 5e-3
        assert np.abs(cols[1] - (np.arange(5) + 0.5)).max() < 5e-3

    def test_json_format(self, tmp_path):
        assert run(["spectrum", "--levels", "4", "--format", "json", "--output", "s.json"]) == cli.EXIT_OK
        payload = read_json(tmp_path / "s.json")
        assert payload["levels"] == 4
        assert len(payload["base"]) == 4 and len(payload["deformed"]) == 4


class TestUnitaryCommand:
    def test_csv_export(self, tmp_path):
        assert run(["unitary", "--truncation", "12", "--output", "u.csv"]) == cli.EXIT_OK
        header, cols = read_csv(tmp_path / "u.csv")
        assert header == ["n", "m", "value"]
        assert cols[0].size == 144
        assert cols[2][0] == pytest.approx(math.sqrt(2) * math.log(2), abs=1e-7)

    def test_closed_form_route_json(self, tmp_path):
        rc = run(["unitary", "--route", "closed-form", "--truncation", "12",
                  "--format", "json", "--output", "u.json"])
        assert rc == cli.EXIT_OK
        payload = read_json(tmp_path / "u.json")
        assert payload["route"] == "closed-form"
        assert len(payload["entries"]) == 12

    def test_block_flag_reported(self, capsys):
        assert run(["unitary", "--truncation", "16", "--block", "4", "--output", "u.csv"]) == cli.EXIT_OK
        assert "4x4 block" in capsys.readouterr().out


class TestStateCommands:
    def test_coherent_csv_round_trip(self, tmp_path):
        assert run(["coherent", "--z-re", "1", "--z-im", "0.5", "--output", "c.csv"]) == cli.EXIT_OK
        header, cols = read_csv(tmp_path / "c.csv")
        assert header == ["x", "re(psi)", "im(psi)"]
        norm = np.sqrt(np.sum((cols[1] ** 2 + cols[2] ** 2)) * 0.006)
        assert norm == pytest.approx(1.0, abs=1e-4)

    def test_squeezed_json_metadata(self, tmp_path):
        rc = run(["squeezed", "--xi-r", "0.5", "--z-re", "0", "--z-im", "0",
                  "--truncation", "40", "--format", "json", "--output", "sq.json"])
        assert rc == cli.EXIT_OK
        payload = read_json(tmp_path / "sq.json")
        assert payload["xi"] == {"r": 0.5, "phi": 0.0}
        assert payload["grid"]["n_points"] == 4001

    def test_tail_condition_enforced(self):
        assert run(["coherent", "--z-re", "2", "--truncation", "12"]) == cli.EXIT_VALIDATION


class TestVerifyCommand:
    def test_passes_on_defaults(self, tmp_path, capsys):
        assert run(["verify", "--lambda", "1", "--levels", "8", "--output", "r.json"]) == cli.EXIT_OK
        out = capsys.readouterr().out
        assert out.count("ok") >= 5
        payload = read_json(tmp_path / "r.json")
        assert payload["lambda"] == 1.0
        assert len(payload["base_eigenvalues"]) == 8

    def test_bitwise_reproducible(self, tmp_path):
        assert run(["verify", "--output", "a.json"]) == cli.EXIT_OK
        assert run(["verify", "--output", "b.json"]) == cli.EXIT_OK
        assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()

    def test_negative_branch(self, tmp_path):
        assert run(["verify", "--lambda", "-2", "--output", "n.json"]) == cli.EXIT_OK

    def test_fails_on_underresolved_grid(self, tmp_path, capsys):
        # 201 points cannot meet the residual and orthonormality bounds,
        # so the gate must report the violations and exit 1
        rc = run(["verify", "--n-points", "201", "--n-max", "8", "--truncation", "9",
                  "--levels", "8", "--output", "coarse.json"])
        assert rc == cli.EXIT_VERIFY_FAILED
        assert "FAIL" in capsys.readouterr().out
        assert (tmp_path / "coarse.json").exists()  # report still written


class TestLimitScanCommand:
    def test_default_scan_trends(self, tmp_path):
        assert run(["limit-scan", "--output", "scan.csv"]) == cli.EXIT_OK
        header, cols = read_csv(tmp_path / "scan.csv")
        assert header == ["lambda", "sup_phi", "u00_minus_one", "theta0_distance", "uncertainty_product"]
        sup_phi = cols[1]
        assert 9.0 < sup_phi[0] / sup_phi[1] < 11.0
        assert 9.0 < sup_phi[1] / sup_phi[2] < 11.0
        assert cols[2][2] <= 1e-4  # ground-ground element at 1e4
        assert cols[3][2] <= 1e-3

    def test_empty_lambda_list(self, tmp_path):
        assert run(["limit-scan", "--lambdas", "", "--output", "empty.csv"]) == cli.EXIT_OK
        text = (tmp_path / "empty.csv").read_text()
        assert text.splitlines() == ["lambda,sup_phi,u00_minus_one,theta0_distance,uncertainty_product"]

    def test_forbidden_entry_rejected(self):
        assert run(["limit-scan", "--lambdas", "10,-0.5"]) == cli.EXIT_VALIDATION


class TestConfigFile:
    def test_config_overrides_defaults_and_flags_win(self, tmp_path):
        cfg = tmp_path / "run.json"
        cfg.write_text(json.dumps({"lambda": 0.5, "n_points": 1001, "x_min": -10, "x_max": 10, "n_max": 20}))
        assert run(["deform", "--config", str(cfg), "--lambda", "2", "--output", "d.json",
                    "--format", "json"]) == cli.EXIT_OK
        payload = read_json(tmp_path / "d.json")
        assert payload["lambda"] == 2.0
        assert len(payload["x"]) == 1001

    def test_unknown_key_rejected(self, tmp_path):
        cfg = tmp_path / "run.json"
        cfg.write_text(json.dumps({"lambda": 1.0, "frobnication": 3}))
        assert run(["deform", "--config", str(cfg)]) == cli.EXIT_VALIDATION

    def test_non_object_rejected(self, tmp_path):
        cfg = tmp_path / "run.json"
        cfg.write_text("[1, 2, 3]")
        assert run(["deform", "--config", str(cfg)]) == cli.EXIT_VALIDATION

    def test_missing_config_is_io_error(self):
        assert run(["deform", "--config", "nowhere.json"]) == cli.EXIT_IO


class TestReproducibleArtifacts:
    def test_identical_runs_identical_bytes(self, tmp_path):
        args = ["deform", *SMALL, "--lambda", "0.5"]
        run([*args, "--output", "one.csv"])
        run([*args, "--output", "two.csv"])
        assert (tmp_path / "one.csv").read_bytes() == (tmp_path / "two.csv").read_bytes()

    def test_artifact_round_trips_library_values_exactly(self, tmp_path):
        from isospec import build_oscillator_basis, make_deformation, make_grid

        run(["deform", *SMALL, "--lambda", "0.5", "--output", "d.csv"])
        _, cols = read_csv(tmp_path / "d.csv")
        basis = build_oscillator_basis(make_grid(-10, 10, 1001), 20)
        d = make_deformation(basis, 0.5)
        assert np.array_equal(cols[0], basis.grid.x)
        assert np.array_equal(cols[1], d.phi.values)
        assert np.array_equal(cols[3], d.V_lambda.values)
        assert np.array_equal(cols[4], d.theta[0].values)


def test_module_entry_point(tmp_path):
    # make the package importable in the child even without installation
    import isospec

    env = os.environ.copy()
    package_root = str(pathlib.Path(isospec.__file__).resolve().parents[1])
    env["PYTHONPATH"] = package_root + os.pathsep + env.get("PYTHONPATH", "")
    proc = subprocess.run(
        [sys.executable, "-m", "isospec", "deform", "--n-points", "201", "--x-min", "-9",
         "--x-max", "9", "--n-max", "2", "--output", str(tmp_path / "d.csv")],
        capture_output=True,
        text=True,
        env=env,
    )
    assert proc.returncode == 0, proc.stderr
    assert (tmp_path / "d.csv").exists()
