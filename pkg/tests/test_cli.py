"""End-to-end command runs against a throwaway workspace.

Each test drives cli.main with explicit argv, then inspects exit codes,
stdout lines, and the artifacts left in the cache.
"""

from __future__ import annotations

import json
import re
from fractions import Fraction

import pytest

from rslift.cli import main
from rslift.modsym import MSSpace
from rslift.polyact import scalar_to_str
from rslift.workspace import ENV_CACHE


@pytest.fixture(autouse=True)
def _no_env_cache(monkeypatch):
    monkeypatch.delenv(ENV_CACHE, raising=False)


def run(tmp_path, *argv):
    return main(["--workspace", str(tmp_path), *argv])


def _artifact(out: str):
    match = re.search(r"artifact: (\S+?\.json)", out)
    assert match, out
    return match.group(1)


def test_qf_enum_and_cache(tmp_path, capsys):
    assert run(tmp_path, "qf", "enum", "--p", "5", "--dmax", "100") == 0
    out1 = capsys.readouterr().out
    assert "10 discriminants" in out1
    path = _artifact(out1)
    blob = open(path, "rb").read()

    assert run(tmp_path, "qf", "enum", "--p", "5", "--dmax", "100") == 0
    out2 = capsys.readouterr().out
    assert "(cache hit)" in out2
    assert open(_artifact(out2), "rb").read() == blob

    obj = json.loads(blob)
    discs = [c["D"] for c in obj["classes"]]
    assert discs == sorted(discs)
    assert set(discs) == {5, 20, 25, 40, 45, 60, 65, 80, 85, 100}


def test_qf_enum_rejects_composite(tmp_path, capsys):
    assert run(tmp_path, "qf", "enum", "--p", "4", "--dmax", "50") == 2
    assert "p must be prime" in capsys.readouterr().err


def test_config_supplies_defaults(tmp_path, capsys):
    (tmp_path / "rslift.cfg").write_text("p = 5\ndmax = 100\n")
    assert run(tmp_path, "qf", "enum") == 0
    assert "p=5 dmax=100" in capsys.readouterr().out


def test_ms_basis_dimensions(tmp_path, capsys):
    assert run(tmp_path, "ms", "basis", "--p", "5", "--k", "2") == 0
    obj = json.loads(open(_artifact(capsys.readouterr().out)).read())
    assert obj["dim"] == 4
    assert obj["cuspidal"] == 2
    assert obj["pnew_cuspidal"] == 2
    assert obj["even"] == obj["odd"] == 1
    assert run(tmp_path, "ms", "basis", "--p", "5", "--k", "0") == 2
    assert "k must be at least 1" in capsys.readouterr().err


def test_ms_hecke_matrix(tmp_path, capsys):
    assert run(tmp_path, "ms", "hecke", "--p", "5", "--k", "2", "--l", "2") == 0
    obj = json.loads(open(_artifact(capsys.readouterr().out)).read())
    assert obj["commutes_with_w_inf"] is True
    assert len(obj["matrix"]) == obj["dim"] == 4
    assert all(isinstance(x, str) for row in obj["matrix"] for x in row)
    assert run(tmp_path, "ms", "hecke", "--p", "5", "--k", "2", "--l", "6") == 2


def test_lift_compute_report(tmp_path, capsys):
    code = run(tmp_path, "lift", "compute", "--p", "5", "--k", "2", "--dmax", "100", "--select", "odd:0")
    assert code == 0
    out = capsys.readouterr().out
    assert "plus-lift zero: true" in out
    assert "lift is zero up to Dmax: false" in out
    assert "support check: true" in out
    path = _artifact(out)
    obj = json.loads(open(path).read())
    assert obj["plus_lift"]["coeffs"] == {}
    assert obj["lift"]["coeffs"]
    csv_path = path[: -len(".json")] + ".csv"
    png_path = path[: -len(".json")] + ".png"
    rows = open(csv_path).read().splitlines()
    assert rows[0] == "n,D,coefficient"
    assert len(rows) == len(obj["lift"]["coeffs"]) + 1
    assert open(png_path, "rb").read(8)[1:4] == b"PNG"


def test_lift_refuses_boundary_selection(tmp_path, capsys):
    code = run(tmp_path, "lift", "compute", "--p", "5", "--k", "2", "--dmax", "100", "--select", "eisenstein:0")
    assert code == 2
    assert "cuspidal" in capsys.readouterr().err


def test_lift_selector_errors(tmp_path, capsys):
    assert run(tmp_path, "lift", "compute", "--p", "5", "--k", "2", "--dmax", "100", "--select", "odd:7") == 2
    assert "out of range" in capsys.readouterr().err
    assert run(tmp_path, "lift", "compute", "--p", "5", "--k", "2", "--dmax", "100", "--select", "weird:0") == 2
    assert "unknown selector family" in capsys.readouterr().err


def test_lift_check_hecke(tmp_path, capsys):
    code = run(tmp_path, "lift", "check-hecke", "--p", "5", "--k", "2", "--dmax", "200", "--l", "2")
    assert code == 0
    assert "hecke equivariance l=2: pass" in capsys.readouterr().out
    assert run(tmp_path, "lift", "check-hecke", "--p", "5", "--k", "2", "--dmax", "200", "--l", "5") == 2


def test_lift_check_even(tmp_path, capsys):
    assert run(tmp_path, "lift", "check-even", "--p", "5", "--k", "2", "--dmax", "100") == 0
    out = capsys.readouterr().out
    assert "pnew:0 plus-lift zero: true" in out
    assert "pnew:1 plus-lift zero: true" in out


def _write_symbol_file(tmp_path, which: str):
    space = MSSpace.build(5, 2)
    if which == "odd":
        coords = space.even_odd_split(space.pnew_cuspidal_basis())[1][0]
    else:
        coords = space.eisenstein_basis()[0]
    target = tmp_path / f"{which}.json"
    target.write_text(
        json.dumps({"p": 5, "k": 2, "coords": [scalar_to_str(Fraction(c)) for c in coords]})
    )
    return target


def test_cocycle_new_roundtrip(tmp_path, capsys):
    src = _write_symbol_file(tmp_path, "odd")
    assert run(tmp_path, "cocycle", "new", "--from-ms", str(src)) == 0
    out = capsys.readouterr().out
    assert "harmonic: true" in out
    assert "cuspidal: true" in out
    artifact = _artifact(out)

    code = run(tmp_path, "lift", "compute", "--p", "5", "--k", "2", "--dmax", "100", "--select", f"file:{artifact}")
    assert code == 0
    assert "plus-lift zero: true" in capsys.readouterr().out


def test_cocycle_new_rejects_old_symbol(tmp_path, capsys):
    src = _write_symbol_file(tmp_path, "eisenstein")
    assert run(tmp_path, "cocycle", "new", "--from-ms", str(src)) == 2
    assert capsys.readouterr().err.startswith("error:")


def test_oracle_commands(tmp_path, capsys):
    assert run(tmp_path, "oracle", "dims", "--p", "5", "--k", "2") == 0
    assert "cusp dimension 1" in capsys.readouterr().out

    assert run(tmp_path, "oracle", "orbits", "--p", "5", "--D", "20") == 0
    out = capsys.readouterr().out
    assert "2 classes" in out
    assert "certificates verified: true" in out

    assert run(tmp_path, "oracle", "dims", "--p", "5", "--k", "1") == 2
    capsys.readouterr()


def test_oracle_periods_report(tmp_path, capsys):
    code = run(
        tmp_path,
        "oracle", "periods",
        "--p", "5", "--k", "2", "--D", "45", "--prec", "10", "--digits", "6",
    )
    assert code == 0
    out = capsys.readouterr().out
    assert "period ratio constant to 6 digits: pass" in out
    path = _artifact(out)
    obj = json.loads(open(path).read())
    assert obj["passed"] is True
    assert open(path[: -len(".json")] + ".png", "rb").read(8)[1:4] == b"PNG"
