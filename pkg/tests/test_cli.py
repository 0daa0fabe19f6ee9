import json
import hashlib

import numpy as np
import pytest

from spinsteer.cli import main
from spinsteer.config import ExperimentConfig, load_config, parse_config_file
from spinsteer.errors import ConfigError


def sha256(path):
    return hashlib.sha256(path.read_bytes()).hexdigest()


class TestConfigFile:
    def test_empty_file_gives_defaults(self, tmp_path):
        f = tmp_path / "empty.cfg"
        f.write_text("")
        cfg = load_config(f)
        assert cfg.gamma1 == 2.0
        assert cfg.t_f == 1.0
        assert cfg.b0 == 1.0
        assert cfg.steps == 4000

    def test_flag_overrides_file(self, tmp_path):
        f = tmp_path / "a.cfg"
        f.write_text("eta = 20\n")
        cfg = load_config(f, overrides={"eta": 5.0})
        assert cfg.eta == 5.0

    def test_file_overrides_default(self, tmp_path):
        f = tmp_path / "a.cfg"
        f.write_text("gamma1 = 3.5\nsteps = 2000\n")
        cfg = load_config(f)
        assert cfg.gamma1 == 3.5
        assert cfg.steps == 2000

    def test_triple_flip_run_config(self, tmp_path):
        f = tmp_path / "fig4.cfg"
        f.write_text("# triple flip\n"
                     "gammas = 2, 5.34, 8.94\n"
                     "kappa = 0.5\n"
                     "eta = 5\n")
        cfg = load_config(f)
        assert cfg.gammas == [2.0, 5.34, 8.94]
        assert cfg.kappa == 0.5
        assert cfg.eta == 5.0

    def test_comments_and_typing(self, tmp_path):
        f = tmp_path / "a.cfg"
        f.write_text("kappa = 1.5  # inline comment\nfmt = json\nsteps = 64\n")
        raw = parse_config_file(f)
        assert raw == {"kappa": 1.5, "fmt": "json", "steps": 64}

    def test_missing_file(self):
        with pytest.raises(ConfigError):
            load_config("/nonexistent/path.cfg")

    def test_malformed_line(self, tmp_path):
        f = tmp_path / "bad.cfg"
        f.write_text("this is not a pair\n")
        with pytest.raises(ConfigError):
            load_config(f)

    def test_unknown_key_named(self, tmp_path):
        f = tmp_path / "bad.cfg"
        f.write_text("not_a_key = 1\n")
        with pytest.raises(ConfigError, match="not_a_key"):
            load_config(f)

    def test_invariants_enforced(self):
        with pytest.raises(ConfigError, match="t_f"):
            ExperimentConfig(t_f=0.0).validate()
        with pytest.raises(ConfigError, match="steps"):
            ExperimentConfig(steps=8).validate()
        with pytest.raises(ConfigError, match="finite"):
            ExperimentConfig(kappa=float("inf")).validate()


class TestCliRuns:
    def test_flip_emits_field_and_trajectory(self, tmp_path):
        rc = main(["flip", "--gamma", "2", "--tf", "1", "--b0", "1",
                   "--kappa", "1", "--eta", "0", "--steps", "600",
                   "--out-dir", str(tmp_path)])
        assert rc == 0
        field = tmp_path / "flip_field.csv"
        spin = tmp_path / "flip_spin_gamma2.csv"
        manifest = tmp_path / "manifest.json"
        assert field.exists() and spin.exists() and manifest.exists()
        assert field.read_text().splitlines()[0] == "t,Bx,By,Bz"
        assert spin.read_text().splitlines()[0] == "t,sx,sy,sz"
        doc = json.loads(manifest.read_text())
        assert doc["command"] == "flip"
        for entry in doc["files"]:
            assert sha256(tmp_path / entry["path"]) == entry["sha256"]

    def test_flip_output_is_deterministic(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        for out in (a, b):
            assert main(["flip", "--kappa", "0.5", "--eta", "5",
                         "--steps", "600", "--out-dir", str(out)]) == 0
        for name in ("flip_field.csv", "flip_spin_gamma2.csv"):
            assert (a / name).read_bytes() == (b / name).read_bytes()

    def test_flip_rejects_zero_duration(self, tmp_path):
        out = tmp_path / "x"
        rc = main(["flip", "--tf", "0", "--kappa", "1", "--eta", "0",
                   "--out-dir", str(out)])
        assert rc == 2
        assert not any(out.glob("*.csv"))

    def test_flip_requires_ansatz_parameters(self, tmp_path):
        rc = main(["flip", "--out-dir", str(tmp_path)])
        assert rc == 2

    def test_unknown_subcommand_exits_2(self, capsys):
        with pytest.raises(SystemExit) as err:
            main(["frobnicate"])
        assert err.value.code == 2
        assert "usage" in capsys.readouterr().err

    def test_trajectory_floats_round_trip(self, tmp_path):
        assert main(["flip", "--kappa", "1", "--eta", "0", "--steps", "600",
                     "--out-dir", str(tmp_path)]) == 0
        lines = (tmp_path / "flip_spin_gamma2.csv").read_text().splitlines()
        first = lines[1].split(",")
        # 17 significant digits reproduce the double exactly
        assert float(first[3]) == 1.0

    def test_synth_methods(self, tmp_path):
        for method in ("precession", "operator", "madelung"):
            args = ["synth", "--method", method, "--out-dir", str(tmp_path)]
            if method == "precession":
                args += ["--kappa", "1", "--eta", "0"]
            assert main(args) == 0
            doc = json.loads((tmp_path / f"synth_{method}_protocol.json").read_text())
            assert doc["t_f"] == 1.0
        op = np.loadtxt(tmp_path / "synth_operator_field.csv", delimiter=",",
                        skiprows=1)
        assert np.abs(op[:, 2] - np.pi / 2.0).max() < 1e-12   # constant By

    def test_scan_flip_csv_layout(self, tmp_path):
        rc = main(["scan", "--target", "flip", "--kappa", "0.5",
                   "--ratio-min", "0.9", "--ratio-max", "1.1", "--ratio-count", "3",
                   "--eta-min", "4", "--eta-max", "6", "--eta-count", "2",
                   "--steps", "600", "--out-dir", str(tmp_path)])
        assert rc == 0
        lines = (tmp_path / "scan_flip_kappa0.5.csv").read_text().splitlines()
        assert lines[0].split(",")[0] == "gamma_ratio\\eta"
        assert [float(x) for x in lines[0].split(",")[1:]] == [4.0, 6.0]
        assert len(lines) == 4
        row1 = [float(x) for x in lines[2].split(",")]
        assert row1[0] == 1.0
        assert row1[1] <= 1e-8   # ratio 1 cell

    def test_scan_json_format(self, tmp_path):
        rc = main(["scan", "--target", "superposition", "--gamma1", "2",
                   "--gamma2", "1", "--eta-min", "2", "--eta-max", "3",
                   "--eta-count", "2", "--kmin", "4", "--kmax", "5",
                   "--kcount", "3", "--steps", "600", "--format", "json",
                   "--out-dir", str(tmp_path)])
        assert rc == 0
        doc = json.loads((tmp_path / "scan_superposition.json").read_text())
        assert doc["axis1_name"] == "eta"
        assert len(doc["values"]) == 2 and len(doc["values"][0]) == 3

    def test_scan_with_worker_pool_matches_serial(self, tmp_path):
        base = ["scan", "--target", "flip", "--kappa", "1.0",
                "--ratio-min", "0.5", "--ratio-max", "2.5", "--ratio-count", "5",
                "--eta-min", "0", "--eta-max", "16", "--eta-count", "17",
                "--steps", "600"]
        a, b = tmp_path / "serial", tmp_path / "pool"
        assert main(base + ["--out-dir", str(a), "--workers", "1"]) == 0
        assert main(base + ["--out-dir", str(b), "--workers", "2"]) == 0
        assert (a / "scan_flip_kappa1.csv").read_bytes() == \
            (b / "scan_flip_kappa1.csv").read_bytes()

    def test_magic_tiny_range_reports_empty(self, tmp_path):
        rc = main(["magic", "--eta", "20", "--epsilon", "0.01",
                   "--kmin", "0.01", "--kmax", "0.02", "--steps", "600",
                   "--out-dir", str(tmp_path)])
        assert rc == 0
        doc = json.loads((tmp_path / "magic_report.json").read_text())
        assert doc["magic"] == []

    def test_numerical_failure_exits_3(self, tmp_path):
        rc = main(["magic", "--eta", "20", "--epsilon", "1.5",
                   "--kmin", "1.5", "--kmax", "1.6", "--steps", "600",
                   "--out-dir", str(tmp_path)])
        assert rc == 3

    def test_baseline_and_robust_tables(self, tmp_path):
        assert main(["baseline", "--epsilons", "0.01,0.02",
                     "--out-dir", str(tmp_path)]) == 0
        lines = (tmp_path / "baseline_curves.csv").read_text().splitlines()
        assert lines[0] == "epsilon,survival_pi,survival_se,lambda_pi,lambda_se"
        assert len(lines) == 3

        assert main(["robust", "--eta", "5", "--kappas", "0.5",
                     "--epsilons", "0.01", "--steps", "600",
                     "--out-dir", str(tmp_path)]) == 0
        header = (tmp_path / "robust_comparison.csv").read_text().splitlines()[0]
        assert header == "epsilon,lambda_pi,lambda_se,lambda_k0.5"

    def test_coupled_deviation_small(self, tmp_path):
        rc = main(["coupled", "--gamma1", "2", "--gamma2", "3", "--kappa", "1",
                   "--eta", "0", "--mu", "2", "--steps", "1200",
                   "--out-dir", str(tmp_path)])
        assert rc == 0
        doc = json.loads((tmp_path / "coupled_deviation.json").read_text())
        assert doc["max_deviation_spin1"] < 1e-6
        assert doc["max_deviation_spin2"] < 1e-6

    def test_bell_curve(self, tmp_path):
        rc = main(["bell", "--xi", "1", "--tfxi", "2,30", "--steps", "1200",
                   "--out-dir", str(tmp_path)])
        assert rc == 0
        lines = (tmp_path / "fidelity_curve.csv").read_text().splitlines()
        assert lines[0] == "tf_xi,fidelity_bell,fidelity_w"
        last = [float(x) for x in lines[-1].split(",")]
        assert last[0] == 30.0 and last[1] > 0.999
