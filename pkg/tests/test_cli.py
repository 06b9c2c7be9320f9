"""Command-line front end: donor presets, parameter resolution (flags over
config file over defaults), CSV and manifest schemas, determinism across
worker counts, and exit codes."""

import json
import subprocess
import sys

import numpy as np
import pytest

from driventop import cli
from driventop.cli import RunConfig, build_parser, config_from_args, donor_presets
from driventop.errors import ConfigError
from driventop.spinops import (
    SphereDirection,
    SpinQuantumNumber,
    husimi_grid,
    spin_coherent_state,
)

GAMMA_N_SB123 = 5.55e6


def run_cli(args):
    return cli.main([str(a) for a in args])


def read_rows(path):
    lines = path.read_text(encoding="utf-8").splitlines()
    header = lines[0].split(",")
    return header, [dict(zip(header, line.split(","))) for line in lines[1:]]


class TestDonorPresets:
    def test_reference_isotope_values(self):
        preset = donor_presets("Sb123")
        assert preset.spin.two_i == 7
        assert preset.gamma_n == 5.55e6
        assert preset.hyperfine_a == 101.52e6
        assert preset.qn_range == (-0.49e-28, -0.69e-28)

    def test_heaviest_isotope_values(self):
        preset = donor_presets("Bi209")
        assert preset.spin.two_i == 9
        assert preset.gamma_n == 6.96e6
        assert preset.hyperfine_a == 1475.4e6

    def test_full_table(self):
        table = {
            "P31": (1, 45.59, 117.53e6, 17.26e6, None),
            "As75": (3, 53.76, 198.35e6, 7.31e6, (0.314e-28, 0.314e-28)),
            "Sb121": (5, 42.74, 186.80e6, 10.26e6, (-0.36e-28, -0.54e-28)),
            "Sb123": (7, 42.74, 101.52e6, 5.55e6, (-0.49e-28, -0.69e-28)),
            "Bi209": (9, 70.98, 1475.4e6, 6.96e6, (-0.37e-28, -0.77e-28)),
        }
        for name, (two_i, binding, a, gamma_n, qn) in table.items():
            preset = donor_presets(name)
            assert preset.spin.two_i == two_i
            assert preset.binding_energy_mev == binding
            assert preset.hyperfine_a == a
            assert preset.gamma_n == gamma_n
            assert preset.qn_range == qn

    def test_spin_half_has_no_quadrupole(self):
        preset = donor_presets("P31")
        assert preset.qn_range is None
        with pytest.raises(ConfigError):
            preset.spec(1.0, q=1e6)

    def test_spec_builder(self):
        spec = donor_presets("Sb123").spec(1.4, q=2e6)
        assert spec.gamma_n == GAMMA_N_SB123
        assert spec.b0 == 1.4
        assert spec.q == 2e6

    def test_unknown_name_rejected(self):
        with pytest.raises(ConfigError, match="unknown donor"):
            donor_presets("Xy99")


class TestConfigResolution:
    def chaos_args(self, tmp_path, extra):
        return [
            "chaos-fraction",
            "--output",
            tmp_path / "out.csv",
            "--samples",
            "5",
            *extra,
        ]

    def test_flags_override_config_file(self, tmp_path):
        config = tmp_path / "cfg.json"
        config.write_text(
            json.dumps({"beta": 1.0, "gamma": 0.02, "freq": 1.4, "samples": 50})
        )
        out = tmp_path / "out.csv"
        assert run_cli(
            ["chaos-fraction", "--config", config, "--samples", "4", "--output", out]
        ) == 0
        manifest = json.loads((tmp_path / "out.manifest.json").read_text())
        assert manifest["parameters"]["samples"] == 4
        assert manifest["parameters"]["beta"] == 1.0

    def test_config_file_supplies_required_values(self, tmp_path):
        config = tmp_path / "cfg.json"
        config.write_text(
            json.dumps(
                {"beta": 1.0, "gamma": 0.0, "freq": 1.4, "samples": 5, "seed": 11}
            )
        )
        out = tmp_path / "out.csv"
        assert run_cli(["chaos-fraction", "--config", config, "--output", out]) == 0
        manifest = json.loads((tmp_path / "out.manifest.json").read_text())
        assert manifest["seed"] == 11

    def test_defaults_echoed_in_manifest(self, tmp_path):
        out = tmp_path / "out.csv"
        assert run_cli(
            self.chaos_args(tmp_path, ["--beta", "1.0", "--gamma", "0.0", "--freq", "1.4"])
        ) == 0
        manifest = json.loads((tmp_path / "out.manifest.json").read_text())
        assert manifest["parameters"]["duration"] == 100.0
        assert manifest["parameters"]["threshold"] is None
        assert manifest["workers"] == 1

    def test_unknown_config_key_rejected(self, tmp_path, capsys):
        config = tmp_path / "cfg.json"
        config.write_text(json.dumps({"betaa": 1.0}))
        code = run_cli(["chaos-fraction", "--config", config])
        assert code == 1
        assert "betaa" in capsys.readouterr().err

    def test_missing_required_parameter(self, tmp_path, capsys):
        code = run_cli(
            self.chaos_args(tmp_path, ["--gamma", "0.0", "--freq", "1.4"])
        )
        assert code == 1
        assert "--beta" in capsys.readouterr().err

    def test_workers_env_default(self, monkeypatch):
        monkeypatch.setenv("DRIVENTOP_WORKERS", "3")
        args = build_parser().parse_args(
            ["chaos-fraction", "--beta", "1.0", "--gamma", "0.0", "--freq", "1.4"]
        )
        assert config_from_args(args).workers == 3

    def test_workers_env_invalid(self, monkeypatch):
        monkeypatch.setenv("DRIVENTOP_WORKERS", "soon")
        args = build_parser().parse_args(
            ["chaos-fraction", "--beta", "1.0", "--gamma", "0.0", "--freq", "1.4"]
        )
        with pytest.raises(ConfigError, match="DRIVENTOP_WORKERS"):
            config_from_args(args)

    def test_run_config_validation(self):
        with pytest.raises(ConfigError, match="unknown experiment"):
            RunConfig("nope", {}, 0, 1, "out.csv")
        with pytest.raises(ConfigError, match="workers"):
            RunConfig("chaos-fraction", {}, 0, 0, "out.csv")


class TestOutputFormat:
    @pytest.fixture()
    def fraction_run(self, tmp_path):
        out = tmp_path / "fraction.csv"
        code = run_cli(
            [
                "chaos-fraction",
                "--beta", "1.0", "--gamma", "0.05", "--freq", "1.4",
                "--samples", "10", "--seed", "7", "--output", out,
            ]
        )
        assert code == 0
        return tmp_path, out

    def test_csv_is_lf_utf8_with_full_precision(self, fraction_run):
        _, out = fraction_run
        raw = out.read_bytes()
        assert b"\r" not in raw
        assert raw.endswith(b"\n")
        text = raw.decode("utf-8")
        header, rows = text.splitlines()[0], text.splitlines()[1:]
        assert header == "beta,gamma,freq,fraction,n_chaotic,n_samples"
        assert rows[0].split(",")[2] == format(1.4, ".17g")

    def test_manifest_pairs_with_csv(self, fraction_run):
        tmp_path, out = fraction_run
        manifest_path = tmp_path / "fraction.manifest.json"
        assert manifest_path.exists()
        manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
        assert manifest["schema_version"] == 1
        assert manifest["experiment"] == "chaos-fraction"
        assert manifest["outputs"] == [str(out)]
        assert manifest["wall_time_seconds"] > 0
        assert set(manifest["parameters"]) == {
            "beta", "gamma", "freq", "duration", "threshold", "samples",
        }
        assert "threshold" in manifest["derived"]

    def test_no_temp_files_left_behind(self, fraction_run):
        tmp_path, _ = fraction_run
        assert not list(tmp_path.glob("*.tmp"))


class TestExperimentOutputs:
    def test_determinism_across_worker_counts(self, tmp_path):
        outs = []
        for workers in (1, 2):
            out = tmp_path / f"w{workers}.csv"
            assert run_cli(
                [
                    "chaos-fraction",
                    "--beta", "1.0", "--gamma", "0.05", "--freq", "1.4",
                    "--samples", "40", "--seed", "3",
                    "--workers", workers, "--output", out,
                ]
            ) == 0
            outs.append(out.read_bytes())
        assert outs[0] == outs[1]

    def test_spectrum_collapses_to_single_frequency_without_quadrupole(self, tmp_path):
        out = tmp_path / "spectrum.csv"
        assert run_cli(
            ["spectrum", "--donor", "Sb123", "--b0", "1.4", "--q", "0", "--eta", "0",
             "--output", out]
        ) == 0
        _, rows = read_rows(out)
        freqs = {float(r["frequency"]) for r in rows}
        assert len(rows) == 7
        assert all(abs(f - 7.77e6) < 1e-3 for f in freqs)

    def test_purity_map_without_noise_is_all_ones(self, tmp_path):
        out = tmp_path / "purity.csv"
        assert run_cli(
            [
                "purity-map", "--two-i", "3", "--gamma-n", "5.55e6",
                "--b0", "2.5e-3", "--q", "4000", "--b1", "1.5e-3", "--freq", "5000",
                "--parameter", "Q", "--sigma", "0", "--periods", "5",
                "--members", "2", "--levels", "3", "--n-theta", "2", "--n-phi", "4",
                "--segments", "100", "--output", out,
            ]
        ) == 0
        _, rows = read_rows(out)
        assert len(rows) == 8
        assert all(abs(float(r["purity"]) - 1.0) < 1e-9 for r in rows)

    def test_classical_map_schema(self, tmp_path):
        out = tmp_path / "map.csv"
        assert run_cli(
            [
                "classical-map", "--beta", "1.0", "--gamma", "0.05", "--freq", "1.4",
                "--n-theta", "4", "--n-phi", "6", "--output", out,
            ]
        ) == 0
        header, rows = read_rows(out)
        assert header == ["theta", "phi", "exponent", "chaotic"]
        assert len(rows) == 24
        assert {r["chaotic"] for r in rows} <= {"0", "1"}

    def test_orientation_scan_writes_branch_sidecar(self, tmp_path):
        out = tmp_path / "scan.csv"
        assert run_cli(
            [
                "orientation-scan", "--donor", "Sb123", "--b0", "1.4",
                "--q", "0.8e6", "--n-angles", "5", "--output", out,
            ]
        ) == 0
        header, rows = read_rows(out)
        assert header == ["angle", "frequency", "intensity", "level_low", "level_high"]
        branch_path = tmp_path / "scan.branches.csv"
        bheader, brows = read_rows(branch_path)
        assert bheader == ["branch", "angle", "frequency", "intensity"]
        manifest = json.loads((tmp_path / "scan.manifest.json").read_text())
        assert manifest["outputs"] == [str(out), str(branch_path)]
        n_branches = manifest["derived"]["n_branches"]
        assert len(brows) == 5 * n_branches

    def test_overlap_trace_rows(self, tmp_path):
        out = tmp_path / "trace.csv"
        assert run_cli(
            [
                "overlap-trace", "--two-i", "7", "--gamma-n", "5.55e6",
                "--b0", "0.5", "--q", "0.8e6", "--b1", "10e-3", "--freq", "5e6",
                "--periods", "10", "--segments", "300", "--output", out,
            ]
        ) == 0
        _, rows = read_rows(out)
        assert len(rows) == 11
        assert float(rows[0]["amplitude"]) == pytest.approx(1.0, abs=1e-12)

    def test_tunneling_defaults_to_island_seed(self, tmp_path):
        out = tmp_path / "tunneling.csv"
        assert run_cli(
            [
                "tunneling", "--two-i", "7", "--gamma-n", "5.55e6",
                "--b0", "0.5", "--q", "0.8e6", "--b1", "10e-3", "--freq", "5e6",
                "--output", out,
            ]
        ) == 0
        manifest = json.loads((tmp_path / "tunneling.manifest.json").read_text())
        derived = manifest["derived"]
        expected_theta = np.arccos(5.55e6 * 0.5 / (2 * 0.8e6 * 3.5))
        assert derived["seed_theta"] == pytest.approx(expected_theta, rel=1e-12)
        assert derived["tunneling_period_s"] == pytest.approx(3.31e-6, rel=0.01)

    def test_stateprep_outputs(self, tmp_path):
        out = tmp_path / "prep.csv"
        assert run_cli(
            [
                "stateprep", "--two-i", "7", "--gamma-n", "5.55e6",
                "--b0", "0.7", "--q", "1e6", "--b1", "1e-3",
                "--target-theta", 4 * np.pi / 5, "--target-phi", np.pi / 2,
                "--output", out,
            ]
        ) == 0
        _, rows = read_rows(out)
        manifest = json.loads((tmp_path / "prep.manifest.json").read_text())
        assert len(rows) == manifest["derived"]["n_pulses"]
        assert manifest["derived"]["predicted_fidelity"] > 0.99
        assert len(manifest["derived"]["sequence"]["pulses"]) == len(rows)

    def test_husimi_first_frame_matches_direct_distribution(self, tmp_path):
        out_dir = tmp_path / "frames"
        theta, phi = 1.05, 0.0
        assert run_cli(
            [
                "husimi-frames", "--two-i", "7", "--gamma-n", "5.55e6",
                "--b0", "0.5", "--q", "0.8e6", "--b1", "10e-3", "--freq", "5e6",
                "--theta", theta, "--phi", phi, "--frames", "2",
                "--n-theta", "4", "--n-phi", "8", "--segments", "100",
                "--output", out_dir,
            ]
        ) == 0
        manifest = json.loads((out_dir / "manifest.json").read_text())
        assert len(manifest["outputs"]) == 2
        _, rows = read_rows(out_dir / "frame_0000.csv")
        psi = spin_coherent_state(
            SpinQuantumNumber(7), SphereDirection(theta, phi)
        )
        thetas = (np.arange(4) + 0.5) * np.pi / 4
        phis = (np.arange(8) + 0.5) * 2 * np.pi / 8
        expected = husimi_grid(np.outer(psi, psi.conj()), thetas, phis)
        got = np.array([float(r["husimi"]) for r in rows]).reshape(4, 8)
        np.testing.assert_allclose(got, expected, rtol=1e-15, atol=1e-300)


class TestExitCodes:
    def test_invalid_flag_value_returns_one(self, capsys):
        assert run_cli(["chaos-fraction", "--beta", "plenty"]) == 1
        assert "configuration error" in capsys.readouterr().err

    def test_no_subcommand_returns_one(self, capsys):
        assert run_cli([]) == 1
        assert "no experiment selected" in capsys.readouterr().err

    def test_numerical_failure_returns_two(self, tmp_path, capsys):
        code = run_cli(
            [
                "stateprep", "--two-i", "7", "--gamma-n", "5.55e6",
                "--b0", "0.7", "--q", "0", "--b1", "1e-3",
                "--target-theta", "2.5", "--target-phi", "1.5",
                "--output", tmp_path / "prep.csv",
            ]
        )
        assert code == 2
        assert "numerical failure" in capsys.readouterr().err

    def test_module_entry_point(self, tmp_path):
        out = tmp_path / "out.csv"
        proc = subprocess.run(
            [
                sys.executable, "-m", "driventop.cli", "chaos-fraction",
                "--beta", "1.0", "--gamma", "0.0", "--freq", "1.4",
                "--samples", "5", "--output", str(out),
            ],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0, proc.stderr
        assert out.exists()
