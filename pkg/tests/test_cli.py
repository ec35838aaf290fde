"""Command-line interface: config handling, artifacts, exit codes."""

from pathlib import Path

import numpy as np
import pytest

from pulselab import cli


def read_summary(path: Path) -> dict:
    out = {}
    for line in path.read_text().splitlines():
        key, val = line.split(" = ", 1)
        out[key] = val
    return out


def read_csv(path: Path):
    lines = path.read_text().splitlines()
    header = lines[0].split(",")
    data = np.array([[float(v) for v in ln.split(",")] for ln in lines[1:]])
    return header, data


class TestRunConfig:
    def test_round_trip(self):
        text = "[params]\na = 0.5\nm = 0.45\n\n[terrain]\nkind = gaussian\nA = 1\nB = 0.5\n"
        cfg = cli.RunConfig.parse(text)
        again = cli.RunConfig.parse(cfg.serialize())
        assert again.sections == cfg.sections
        assert again.serialize() == cfg.serialize()

    def test_unknown_key_rejected(self):
        with pytest.raises(cli.UsageError):
            cli.RunConfig.parse("[params]\nbogus = 1\n")

    def test_unknown_section_rejected(self):
        with pytest.raises(cli.UsageError):
            cli.RunConfig.parse("[nonsense]\na = 1\n")

    def test_key_outside_section_rejected(self):
        with pytest.raises(cli.UsageError):
            cli.RunConfig.parse("a = 1\n")

    def test_comments_ignored(self):
        cfg = cli.RunConfig.parse("# top\n[params]\na = 0.5  # rainfall\n")
        assert cfg.get("params", "a") == "0.5"


class TestTerrainSpecs:
    def test_catalog(self):
        assert cli.parse_terrain("flat").kind == "flat"
        assert cli.parse_terrain("gaussian:1:0.5").params == (1.0, 0.5)
        assert cli.parse_terrain("lncosh:0.7").params == (0.7,)
        t = cli.parse_terrain("scaled:gaussian:0.01:0.75")
        assert t.delta_scale == 0.01

    def test_bad_spec_is_usage_error(self):
        with pytest.raises(cli.UsageError):
            cli.parse_terrain("gaussian:1")  # missing B
        with pytest.raises(cli.UsageError):
            cli.parse_terrain("volcano:1:2")


class TestSubcommands:
    def test_check(self, tmp_path):
        rc = cli.main(["check", "--terrain", "gaussian:1:0.5",
                       "--out", str(tmp_path)])
        assert rc == 0
        s = read_summary(tmp_path / "check_summary.txt")
        assert s["a3_delta_below_quarter"] == "False"

    def test_dichotomy_bounds(self, tmp_path):
        rc = cli.main(["dichotomy-bounds", "--terrain", "lncosh:0.1",
                       "--out", str(tmp_path)])
        assert rc == 0
        s = read_summary(tmp_path / "dichotomy_summary.txt")
        assert float(s["delta"]) == pytest.approx(0.2, abs=2e-3)
        assert float(s["K"]) == 2.5

    def test_slowfield_csv(self, tmp_path):
        rc = cli.main(["slowfield", "--terrain", "flat", "--L", "15",
                       "--n", "3001", "--out", str(tmp_path), "--gnuplot"])
        assert rc == 0
        header, data = read_csv(tmp_path / "slowfield.csv")
        assert header == ["x", "u_b", "p_b", "u_plus", "u_minus"]
        assert np.allclose(data[:, 1], 1.0, atol=1e-9)
        assert (tmp_path / "slowfield.gp").exists()

    def test_construct_pulse(self, tmp_path):
        rc = cli.main(["construct-pulse", "--a", "0.5", "--m", "0.45",
                       "--D", "0.01", "--terrain", "flat", "--out", str(tmp_path)])
        assert rc == 0
        s = read_summary(tmp_path / "pulse_summary.txt")
        assert float(s["u0_minus"]) == pytest.approx(3.1166, abs=1e-3)
        assert (tmp_path / "pulse_physical.csv").exists()
        header, data = read_csv(tmp_path / "pulse_fast.csv")
        assert header == ["xi", "u", "p", "v", "q"]

    def test_construct_pulse_domain_error(self, tmp_path):
        # D raised so mu > 1/12: no pulse, domain-error exit code
        rc = cli.main(["construct-pulse", "--a", "0.5", "--m", "0.45",
                       "--D", "0.1", "--terrain", "flat", "--out", str(tmp_path)])
        assert rc == 1

    def test_usage_error_exit_code(self, tmp_path):
        rc = cli.main(["check", "--terrain", "volcano:1", "--out", str(tmp_path)])
        assert rc == 2

    def test_two_pulse(self, tmp_path):
        rc = cli.main(["two-pulse", "--beta", "1.0", "--out", str(tmp_path)])
        assert rc == 0
        s = read_summary(tmp_path / "two_pulse_summary.txt")
        assert float(s["P_star"]) == pytest.approx(0.5108, abs=1e-3)

    def test_small_eig(self, tmp_path):
        rc = cli.main(["small-eig", "--terrain", "scaled:gaussian:0.01:0.75",
                       "--a", "0.5", "--m", "0.45", "--D", "0.001",
                       "--out", str(tmp_path)])
        assert rc == 0
        s = read_summary(tmp_path / "small_eig_summary.txt")
        # B at the curvature threshold: the height-limit bracket nearly vanishes
        assert abs(float(s["small_eig_double_limit"])) < 1e-5

    def test_fixed_points(self, tmp_path):
        rc = cli.main(["fixed-points", "--terrain", "lncosh:1", "--P-lo", "-1",
                       "--P-hi", "1", "--out", str(tmp_path)])
        assert rc == 0
        s = read_summary(tmp_path / "fixed_points_summary.txt")
        assert abs(float(s["fixed_points"])) < 1e-8
        assert float(s["eigenvalue_0"]) < 0

    def test_pulse_ode(self, tmp_path):
        rc = cli.main(["pulse-ode", "--terrain", "lncosh:1",
                       "--positions", "0.4", "--t-end", "50",
                       "--out", str(tmp_path)])
        assert rc == 0
        header, data = read_csv(tmp_path / "pulse_ode.csv")
        assert header == ["t", "P1"]
        assert data[-1, 1] < 0.4  # drifts toward the crest

    def test_simulate_short(self, tmp_path):
        rc = cli.main(["simulate", "--terrain", "flat", "--L", "8",
                       "--dx", "0.005", "--dt", "0.02", "--t-end", "5",
                       "--sample-dt", "1", "--out", str(tmp_path)])
        assert rc == 0
        s = read_summary(tmp_path / "simulate_summary.txt")
        assert abs(float(s["final_positions"])) < 1e-4
        header, data = read_csv(tmp_path / "final_state.csv")
        assert header == ["x", "U", "V"]

    def test_determinism(self, tmp_path):
        d1, d2 = tmp_path / "r1", tmp_path / "r2"
        for d in (d1, d2):
            assert cli.main(["slowfield", "--terrain", "lncosh:0.5",
                             "--L", "15", "--n", "2001", "--out", str(d)]) == 0
        assert (d1 / "slowfield.csv").read_bytes() == (d2 / "slowfield.csv").read_bytes()

    def test_csv_number_format(self, tmp_path):
        cli.main(["two-pulse", "--beta", "1.0", "--out", str(tmp_path)])
        text = (tmp_path / "two_pulse.csv").read_text()
        assert "," in text and ";" not in text
        # 12 significant digits on a representative value
        line = text.splitlines()[2]
        assert len(line.split(",")[0].replace(".", "").replace("-", "").lstrip("0")) <= 12

    def test_config_file_defaults(self, tmp_path):
        cfgfile = tmp_path / "run.cfg"
        cfgfile.write_text("[terrain]\nkind = lncosh\nbeta = 1\n\n"
                           "[output]\ndir = %s\n" % (tmp_path / "cfg_out"))
        rc = cli.main(["fixed-points", "--config", str(cfgfile),
                       "--P-lo", "-1", "--P-hi", "1"])
        assert rc == 0
        assert (tmp_path / "cfg_out" / "fixed_points_summary.txt").exists()

    def test_env_output_dir(self, tmp_path, monkeypatch):
        monkeypatch.setenv("PULSELAB_OUT", str(tmp_path / "envdir"))
        rc = cli.main(["two-pulse", "--beta", "1.0"])
        assert rc == 0
        assert (tmp_path / "envdir" / "two_pulse_summary.txt").exists()
