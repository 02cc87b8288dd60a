import json
from pathlib import Path

import click
import pytest
from click.testing import CliRunner

from ui.cli import cli, main, parse_cli


def test_parse_npiv_defaults():
    spec = parse_cli(["npiv", "--input", "d.csv", "--alpha", "0.14", "--h", "1", "--out", "band.csv"])
    assert spec.command == "npiv"
    assert spec.alpha == pytest.approx(0.14)
    assert spec.h == pytest.approx(1.0)
    assert spec.input_path == Path("d.csv")
    assert (spec.gamma, spec.grid_m, spec.c0, spec.gauss_draws, spec.seed) == (0.05, 100, 0.0, 2000, 0)
    assert spec.process == 1


def test_parse_mc_preset():
    spec = parse_cli(["mc", "--preset", "fig1a", "--reps", "200", "--seed", "7", "--out", "r.json"])
    assert spec.mc.n == 1000
    assert spec.mc.alpha == pytest.approx(0.14)
    assert spec.mc.h == pytest.approx(1.0)
    assert spec.mc.replications == 200
    assert spec.mc.master_seed == 7


def test_mc_flags_override_preset():
    spec = parse_cli(["mc", "--preset", "fig2b", "--n", "300", "--out", "r.json"])
    assert spec.mc.n == 300
    assert spec.mc.method == "concentration"
    assert spec.mc.h == pytest.approx(0.6)


def test_negative_alpha_is_usage_error():
    with pytest.raises(click.UsageError, match="alpha must be positive"):
        parse_cli(["npiv", "--input", "d.csv", "--alpha", "-1", "--h", "1", "--out", "b.csv"])


def test_missing_bandwidth_names_flag():
    with pytest.raises(click.UsageError, match="--h"):
        parse_cli(["npiv", "--input", "d.csv", "--alpha", "0.1", "--out", "b.csv"])


def test_deconv_defaults_to_process_two():
    spec = parse_cli(["deconv", "--input", "y.csv", "--alpha", "0.05", "--noise", "epanechnikov:0.3", "--out", "b.csv"])
    assert spec.process == 2


def test_unknown_command():
    with pytest.raises(click.UsageError):
        parse_cli(["ridge", "--out", "x"])


def test_help_lists_commands():
    result = CliRunner().invoke(cli, ["--help"])
    assert result.exit_code == 0
    for command in ("npiv", "funreg", "deconv", "mc", "dkw"):
        assert command in result.output


def test_usage_error_exit_status(capsys):
    status = main(["npiv", "--input", "d.csv", "--alpha", "-1", "--h", "1", "--out", "b.csv"])
    err = capsys.readouterr().err
    assert status == 2
    assert err.startswith("error: ")
    assert len(err.strip().splitlines()) == 1


def test_missing_input_exit_status(tmp_path, capsys):
    status = main(["npiv", "--input", str(tmp_path / "nope.csv"), "--alpha", "0.1", "--h", "1",
                   "--out", str(tmp_path / "b.csv")])
    err = capsys.readouterr().err
    assert status == 1
    assert len(err.strip().splitlines()) == 1
    assert not (tmp_path / "b.csv").exists()


def test_npiv_end_to_end_is_deterministic(tmp_path, npiv_csv, capsys):
    outputs = []
    for name in ("a.csv", "b.csv"):
        out = tmp_path / name
        status = main(["npiv", "--input", str(npiv_csv), "--alpha", "0.14", "--h", "1", "--out", str(out),
                       "--grid", "30", "--draws", "200"])
        assert status == 0
        outputs.append(out.read_bytes())
    assert outputs[0] == outputs[1]
    assert capsys.readouterr().out == ""
    meta = json.loads((tmp_path / "a.csv.meta.json").read_text())
    assert meta["method"] == "gauss"


def test_funreg_end_to_end(tmp_path, funreg_csv):
    out = tmp_path / "f.csv"
    status = main(["funreg", "--input", str(funreg_csv), "--alpha", "0.01", "--method", "concentration",
                   "--out", str(out)])
    assert status == 0
    assert len(out.read_text().splitlines()) == 21


def test_dkw_end_to_end(tmp_path):
    sample = tmp_path / "x.csv"
    sample.write_text("x\n0.1\n0.4\n0.35\n0.8\n")
    out = tmp_path / "ecdf.csv"
    assert main(["dkw", "--input", str(sample), "--out", str(out), "--grid", "10"]) == 0
    assert out.read_text().splitlines()[0] == "x,ecdf,lower,upper"


def test_mc_end_to_end(tmp_path):
    out = tmp_path / "report.json"
    status = main(["mc", "--n", "200", "--alpha", "0.14", "--h", "1", "--reps", "2", "--grid", "20",
                   "--draws", "200", "--out", str(out)])
    assert status == 0
    payload = json.loads(out.read_text())
    assert payload["replications_used"] == 2
    assert (tmp_path / "report.json.curve.csv").exists()
