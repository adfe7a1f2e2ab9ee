import json

import numpy as np
import pytest

from specpredict.cli import main
from specpredict.jsonio import dumps_canonical, format_float
from specpredict.weights import WeightFunction

from helpers import ma1_weight, random_constant


@pytest.fixture()
def ma1_path(tmp_path):
    path = tmp_path / "ma1.json"
    path.write_text(dumps_canonical(ma1_weight(0.5).to_json_dict(), indent=2))
    return str(path)


@pytest.fixture()
def constant_path(tmp_path):
    c = random_constant(2, 0)
    path = tmp_path / "const.json"
    path.write_text(dumps_canonical(WeightFunction.constant(c).to_json_dict(), indent=2))
    return str(path), c


def test_float_formatting_pins_17_digits():
    assert format_float(0.75) == "0.75"
    assert format_float(1.0 / 3.0) == "0.33333333333333331"
    with pytest.raises(ValueError):
        format_float(float("inf"))


def test_canonical_json_is_deterministic():
    payload = {"b": [1.0, 0.1], "a": None, "flag": True}
    assert dumps_canonical(payload) == dumps_canonical(payload)
    assert dumps_canonical(payload) == '{"b": [1, 0.10000000000000001], "a": null, "flag": true}'


def test_predict_constant(constant_path, capsys):
    path, c = constant_path
    assert main(["predict", path, "--set", "all-but-zero", "--grid", "256"]) == 0
    data = json.loads(capsys.readouterr().out)
    delta = np.asarray(data["delta_re"]) + 1j * np.asarray(data["delta_im"])
    np.testing.assert_allclose(delta, c, atol=1e-10)


def test_predict_nakazi_scalar(ma1_path, capsys):
    assert main(["predict", ma1_path, "--set", "nakazi:1", "--truncation", "64"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["delta_scalar"] == pytest.approx(0.8, abs=1e-8)
    assert data["set"] == {"family": "nakazi", "n": 1}


def test_predict_window_and_formats(ma1_path, capsys):
    assert main(["predict", ma1_path, "--set", "window:[-1,1]", "--format", "csv"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == "set,delta_scalar,eig_1"
    assert main(["predict", ma1_path, "--set", "past", "--truncation", "64",
                 "--format", "pretty"]) == 0
    assert "delta_scalar" in capsys.readouterr().out


def test_predict_cyclic_grid_weight(tmp_path, capsys):
    samples = ma1_weight(0.5).evaluate_on_grid(8)
    spec = WeightFunction.from_grid_samples(samples).to_json_dict()
    path = tmp_path / "grid.json"
    path.write_text(dumps_canonical(spec, indent=2))
    assert main(["predict", str(path), "--set", "cyclic:8:[1,2]"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["predictor"]["kind"] == "frequency_coefficients"


def test_verify_pass_and_fail(ma1_path, capsys):
    assert main(["verify", ma1_path, "--theorem", "3.6", "--set", "past", "-K", "96"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["pass"] is True and report["theorem"] == "3.6"
    # a 4-lag window cannot meet the default tolerance on this weight
    assert main(["verify", ma1_path, "--theorem", "3.2", "--set", "gap:1", "-K", "4"]) == 2


def test_verify_cyclic(tmp_path, capsys):
    samples = ma1_weight(0.5).evaluate_on_grid(8)
    path = tmp_path / "grid.json"
    path.write_text(dumps_canonical(WeightFunction.from_grid_samples(samples).to_json_dict()))
    assert main(["verify", str(path), "--theorem", "cyclic", "--set", "cyclic:8:[1,2,3]"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["pass"] is True


def test_verify_plot(ma1_path, tmp_path, capsys):
    plot = tmp_path / "report.png"
    assert main(["verify", ma1_path, "--theorem", "3.7", "--set", "past", "-K", "32",
                 "--plot", str(plot)]) == 0
    capsys.readouterr()
    assert plot.stat().st_size > 0


def test_sweep_csv_and_figure(ma1_path, tmp_path):
    out = tmp_path / "sweep.csv"
    plot = tmp_path / "sweep.png"
    assert main(["sweep", ma1_path, "--set", "nakazi", "--n-max", "3",
                 "--truncation", "64", "-o", str(out), "--plot", str(plot)]) == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "n,delta_scalar,eig_1"
    assert len(lines) == 5
    assert float(lines[2].split(",")[1]) == pytest.approx(0.8, abs=1e-8)
    assert plot.stat().st_size > 0


def test_sweep_rejects_non_sweepable(ma1_path):
    assert main(["sweep", ma1_path, "--set", "past", "--n-max", "3"]) == 1


def test_factor_roundtrip_is_byte_identical(ma1_path, tmp_path, capsys):
    factor_path = tmp_path / "factor.json"
    assert main(["factorize", ma1_path, "--truncation", "64", "-o", str(factor_path)]) == 0
    assert main(["predict", ma1_path, "--set", "nakazi:2", "--truncation", "64"]) == 0
    direct = capsys.readouterr().out
    assert main(["predict", ma1_path, "--set", "nakazi:2",
                 "--factor-file", str(factor_path)]) == 0
    from_file = capsys.readouterr().out
    assert direct == from_file


def test_repeated_runs_are_byte_identical(ma1_path, capsys):
    main(["predict", ma1_path, "--set", "gap:2"])
    first = capsys.readouterr().out
    main(["predict", ma1_path, "--set", "gap:2"])
    assert capsys.readouterr().out == first


def test_input_errors_exit_one(ma1_path, capsys):
    assert main(["predict", "no-such-file.json", "--set", "past"]) == 1
    assert "ParseError" in capsys.readouterr().err
    assert main(["predict", ma1_path, "--set", "bogus:1"]) == 1
    assert main(["predict", ma1_path, "--set", "nakazi:1", "--truncation", "64",
                 "--factor-file", "missing.json"]) == 1


def test_grid_env_override(ma1_path, capsys, monkeypatch):
    monkeypatch.setenv("SPECPREDICT_GRID", "1024")
    assert main(["verify", ma1_path, "--theorem", "3.6", "--set", "past", "-K", "32"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["N_grid"] == 1024
    monkeypatch.setenv("SPECPREDICT_GRID", "not-a-number")
    assert main(["verify", ma1_path, "--theorem", "3.6", "--set", "past"]) == 1


def test_nakazi_zero_equals_past(ma1_path, capsys):
    assert main(["predict", ma1_path, "--set", "nakazi:0", "--truncation", "64"]) == 0
    nakazi0 = json.loads(capsys.readouterr().out)
    assert main(["predict", ma1_path, "--set", "past", "--truncation", "64"]) == 0
    past = json.loads(capsys.readouterr().out)
    assert nakazi0["delta_re"] == past["delta_re"]
    assert nakazi0["delta_scalar"] == past["delta_scalar"]


def test_sweep_matrix_weight_figure(tmp_path):
    from specpredict.jsonio import dumps_canonical as dumps
    from helpers import diagonal_weight

    path = tmp_path / "diag.json"
    path.write_text(dumps(diagonal_weight([0.5, -0.3]).to_json_dict()))
    out = tmp_path / "sweep.csv"
    plot = tmp_path / "sweep.png"
    assert main(["sweep", str(path), "--set", "gap", "--n-max", "3",
                 "-o", str(out), "--plot", str(plot)]) == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "n,delta_scalar,eig_1,eig_2"
    assert plot.stat().st_size > 0


def test_verify_pretty_table(ma1_path, capsys):
    assert main(["verify", ma1_path, "--theorem", "3.6", "--set", "past", "-K", "64",
                 "--format", "pretty"]) == 0
    out = capsys.readouterr().out
    assert "check 3.6" in out and "pass" in out and "product_error" in out
