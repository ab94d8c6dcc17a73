import json
import math

import pytest

from liouville_cyl.cli import main
from liouville_cyl.correlators import CorrelatorSpec
from liouville_cyl.errors import ConfigError
from liouville_cyl.io import (
    WORKERS_ENV,
    charge_from_json,
    default_workers,
    load_spec,
    make_manifest,
    monomial_from_dict,
    save_spec,
    spec_from_dict,
    spec_to_dict,
    to_jsonable,
    write_csv,
)


def test_charge_parsing():
    assert charge_from_json({"alpha": -0.3}, 0.3) == -0.3
    assert charge_from_json({"alpha": [0.1, 0.2]}, 0.3) == 0.1 + 0.2j
    assert charge_from_json({"n": -2}, 0.3) == pytest.approx(-0.6)
    with pytest.raises(ConfigError):
        charge_from_json({}, 0.3)
    with pytest.raises(ConfigError):
        charge_from_json({"alpha": [1, 2, 3]}, 0.3)


def test_spec_round_trip(tmp_path):
    spec = CorrelatorSpec.build(0.3, 2.0, [0.3 + 0.1j, -0.6, -0.1j], [(0, 0), (0.5, 0.2), (1, -0.5)], [4, 1, 2])
    path = tmp_path / "s.json"
    save_spec(spec, path, torus={"T": 4.0})
    back, extras = load_spec(path)
    assert spec_to_dict(back) == spec_to_dict(spec)
    assert extras == {"torus": {"T": 4.0}}


def test_spec_errors(tmp_path):
    with pytest.raises(ConfigError):
        spec_from_dict({"insertions": []})
    with pytest.raises(ConfigError):
        spec_from_dict({"params": {"b": 0.3}, "insertions": [{"n": 1}]})
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    with pytest.raises(ConfigError):
        load_spec(bad)


def test_monomial_from_dict():
    m = monomial_from_dict([{"n": -1, "center": [0, 0], "half_widths": [0.1, 0.1], "scale": [1, 2]}], 0.3)
    assert m.charges == [-1] and m.factors[0][0].scale == 1 + 2j


def test_manifest_fields(monkeypatch):
    monkeypatch.setenv(WORKERS_ENV, "3")
    m = make_manifest("x", {"b": 0.3}, out="o.json")
    assert set(m) == {"command", "params", "spec", "cfg", "output", "workers", "timestamp", "version"}
    assert m["workers"] == 3 and m["output"] == "o.json"
    monkeypatch.setenv(WORKERS_ENV, "zero")
    with pytest.raises(ConfigError):
        default_workers()


def test_to_jsonable():
    assert to_jsonable({"a": 1 + 2j, "b": [float("nan")]}) == {"a": {"re": 1.0, "im": 2.0}, "b": [None]}


def test_write_csv(tmp_path):
    p = tmp_path / "r.csv"
    write_csv([{"a": 1, "b": 2}], ["a", "b"], p, manifest={"command": "k"})
    lines = p.read_text().splitlines()
    assert lines[0].startswith("# manifest:") and lines[1] == "a,b" and lines[2] == "1,2"


def test_cli_kernel_eval(capsys):
    assert main(["kernel", "eval", "--fn", "green_euclidean", "--t", "0", "--x", "1"]) == 0
    assert float(capsys.readouterr().out.split()[-1]) == pytest.approx(-math.log(2), rel=1e-14)


def test_cli_kernel_sweep_csv(tmp_path):
    out = tmp_path / "sweep.csv"
    code = main(["kernel", "sweep", "--fn", "green_euclidean", "--t", "0.5,1", "--x", "0,0.5", "--out", str(out),
                 "--format", "csv"])
    assert code == 0
    rows = [l for l in out.read_text().splitlines() if not l.startswith("#")]
    assert len(rows) == 5


def test_cli_usage_errors(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["kernel", "eval", "--fn", "nope"])
    assert exc.value.code == 2
    assert main(["verify", "translation", "--w", "2"]) == 2


def test_cli_correlator_and_lightcone(tmp_path, capsys):
    p = tmp_path / "s.json"
    p.write_text(json.dumps({"params": {"b": 0.3}, "insertions": [{"n": -1, "point": [0, 0]}]}))
    assert main(["correlator", "--spec", str(p), "--mode", "lorentzian", "--rel-tol", "1e-7"]) == 0
    assert "-7.0989249" in capsys.readouterr().out
    p.write_text(json.dumps({"params": {"b": 0.3}, "insertions": [
        {"n": 1, "point": [0, 0], "label": 7}, {"n": -1, "point": [0.5, 0.5], "label": 9}]}))
    assert main(["correlator", "--spec", str(p), "--mode", "lorentzian"]) == 3
    err = capsys.readouterr().err
    assert "7" in err and "9" in err
    assert main(["correlator", "--spec", str(tmp_path / "missing.json")]) == 2


def test_cli_oracle_json(capsys):
    assert main(["oracle", "tadpole", "--b", "0.3", "--format", "json"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert "manifest" in payload


def test_cli_verify_exit_code(tmp_path):
    out = tmp_path / "v.json"
    assert main(["verify", "negative-w", "--out", str(out), "--format", "json"]) == 0
    payload = json.loads(out.read_text())
    assert payload["passed"] and payload["manifest"]["command"] == "verify negative-w"
