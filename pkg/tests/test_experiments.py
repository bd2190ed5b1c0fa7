import json

import numpy as np
import pytest

from gevlc.experiments import cli
from gevlc.experiments.config import ConfigError, ExperimentConfig, OUT_ENV, load_config, parse_config, render_config
from gevlc.experiments.report import ExperimentReport, write_report
from gevlc.fourier_grid import GridSpec, random_field
from gevlc.snapshot import write_snapshot

FAST_KERNEL = """
[norms]
kernel_orders = 1
kernel_times = 1.0
kernel_n = 32
kernel_refined_n = 64
"""


def test_default_config_round_trips():
    text = render_config()
    assert parse_config(text) == ExperimentConfig()


def test_config_overrides_and_validation():
    cfg = parse_config("[grid]\nn = 16\n[norms]\ndecay_times = 0.1, 0.2\n[solver]\nrenormalize = yes\n")
    assert cfg.grid.n == 16 and cfg.norms.decay_times == (0.1, 0.2) and cfg.solver.renormalize
    for bad in (
        "[nope]\nx = 1\n",
        "[grid]\nsize = 3\n",
        "[grid]\nn = many\n",
        "[norms]\np = 2\nq = 8\n",
        "[norms]\ntheta = 2\n",
        "[solver]\nscheme = rk4\n",
        "[grid]\ndim = 2\n",
        "not an ini file",
    ):
        with pytest.raises(ConfigError):
            parse_config(bad)
    with pytest.raises(ConfigError):
        load_config("/nonexistent/config.ini")


def test_output_dir_resolution(monkeypatch, tmp_path):
    monkeypatch.setenv(OUT_ENV, str(tmp_path))
    assert ExperimentConfig().output.resolved_dir() == tmp_path
    assert ExperimentConfig().with_output("x").output.resolved_dir().name == "x"


def test_report_serialisation(tmp_path):
    rep = ExperimentReport("demo", 1, {"a": {"b": (1.0, 2.0)}})
    rep.check("ok", "c", 0.5, "<= 1", True)
    rep.monitor("m", "c", float("inf"))
    rep.regression("r", "c", np.float64(3.0))
    rep.record(0.0, "x", 1.0)
    rep.runtime = 12.5
    with pytest.raises(ValueError):
        rep.check("ok", "c", 0.5, "<= 1", True)
    doc = json.loads(rep.to_json())
    assert doc["schema_version"] == 1 and doc["passed"]
    assert doc["checks"][1]["measured"] == "inf"
    assert "runtime" not in rep.to_json()
    rep.check("bad", "c", 2.0, "<= 1", False)
    assert not rep.passed and [r.name for r in rep.failures] == ["bad"]
    paths = write_report(rep, tmp_path)
    assert {p.name for p in paths} == {"report_demo.json", "checks_demo.csv", "series_demo.csv"}
    assert json.loads((tmp_path / "timings.json").read_text()) == {"demo": 12.5}
    assert (tmp_path / "checks_demo.csv").read_text().splitlines()[0].startswith("name,claim,kind")


def test_cli_gen_config(capsys):
    assert cli.main(["gen-config"]) == 0
    assert parse_config(capsys.readouterr().out) == ExperimentConfig()


def test_cli_usage_errors(tmp_path, capsys):
    assert cli.main([]) == 2
    assert cli.main(["verify", "everything"]) == 2
    bad = tmp_path / "bad.ini"
    bad.write_text("[grid]\nn = 12x\n")
    assert cli.main(["verify", "bilinear", "--config", str(bad), "--out", str(tmp_path)]) == 2
    assert "configuration error" in capsys.readouterr().err


def test_cli_inspect(tmp_path, capsys):
    f = random_field(GridSpec(3, 8), np.random.default_rng(0), components=3)
    write_snapshot(tmp_path / "u.gvlc", f)
    assert cli.main(["inspect", str(tmp_path / "u.gvlc")]) == 0
    info = json.loads(capsys.readouterr().out)
    assert info["n"] == 8 and info["components"] == 3 and info["real"]
    (tmp_path / "junk.gvlc").write_bytes(b"GVLC1234")
    assert cli.main(["inspect", str(tmp_path / "junk.gvlc")]) == 2
    assert cli.main(["inspect", str(tmp_path / "missing.gvlc")]) == 2


def test_cli_verify_json(tmp_path, capsys):
    assert cli.main(["verify", "bilinear", "--out", str(tmp_path), "--json", "--seed", "3"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["suite"] == "bilinear" and doc["seed"] == 3 and doc["passed"]
    assert (tmp_path / "report_bilinear.json").exists()


def test_cli_reports_failed_assertions(tmp_path, capsys):
    # a 32-point kernel box is too coarse for the 1e-4 refinement check
    cfg = tmp_path / "fast.ini"
    cfg.write_text(FAST_KERNEL)
    assert cli.main(["verify", "kernel", "--config", str(cfg), "--out", str(tmp_path)]) == 1
    assert "FAIL" in capsys.readouterr().out


def test_cli_env_output(monkeypatch, tmp_path):
    monkeypatch.setenv(OUT_ENV, str(tmp_path / "env"))
    assert cli.main(["verify", "bilinear"]) == 0
    assert (tmp_path / "env" / "report_bilinear.json").exists()
