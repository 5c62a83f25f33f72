"""Config parsing, orchestration, CSV emission, CLI."""

import math
from pathlib import Path

import numpy as np
import pytest

from critvar import (emit_csv, parse_scenario, run, serialize_scenario,
                     write_report)
from critvar.cli import main as cli_main
from critvar.errors import ConfigError, EmptyReport, IoError

MINIMAL = """
[domain]
dimension = 5

[weights.a]
gamma0 = 1.0
coefficient = 1.0

[weights.b]
gamma0 = 1.0
coefficient = 1.0
"""

SWEEP = """
[domain]
schema = 1
dimension = 5
cells = 400

[weights.a]
gamma0 = 1.0
exponent = 4.0
coefficient = 1.0

[weights.b]
gamma0 = 1.0
exponent = 4.0
coefficient = 1.0

[flow]
max_iters = 4000
grad_tol = 1e-5

[sweep]
lambdas = 6 12

[output]
analyses = constants eig minimize pohozaev
"""


def test_minimal_config_defaults():
    s = parse_scenario(MINIMAL)
    assert s.cells == 2000
    assert s.grading == "uniform"
    assert s.radius == 1.0
    assert s.mode == "theorem"
    assert s.weight_a.exponent == 2.0
    assert s.analyses == ("constants", "eig", "minimize", "asymptotics",
                          "pohozaev", "omega")


def test_gamma0_mismatch_rejected():
    text = MINIMAL.replace("gamma0 = 1.0\ncoefficient = 1.0\n\n[weights.b]",
                           "gamma0 = 2.0\ncoefficient = 1.0\n\n[weights.b]", 1)
    with pytest.raises(ConfigError, match="gamma0"):
        parse_scenario(text)


def test_unknown_key_named():
    with pytest.raises(ConfigError, match="wibble"):
        parse_scenario(MINIMAL + "\n[flow]\nwibble = 3\n")


def test_unknown_section_rejected():
    with pytest.raises(ConfigError, match="mystery"):
        parse_scenario(MINIMAL + "\n[mystery]\nx = 1\n")


def test_mode_bounds():
    with pytest.raises(ConfigError):
        parse_scenario(MINIMAL.replace("dimension = 5", "dimension = 3"))
    low_dim = MINIMAL.replace("dimension = 5", "dimension = 3\nmode = machinery")
    assert parse_scenario(low_dim).dimension == 3


def test_roundtrip_identity():
    s = parse_scenario(SWEEP)
    assert parse_scenario(serialize_scenario(s)) == s


def test_roundtrip_with_perturbation():
    text = MINIMAL + "\n[sweep]\nstart = 1.0\nstop = 2.0\nstep = 0.5\n"
    text = text.replace("[weights.b]",
                        "perturbation_r = 0.0 0.5 1.0\n"
                        "perturbation_theta = 0.0 0.1 0.0\n\n[weights.b]")
    s = parse_scenario(text)
    assert s.lambdas == (1.0, 1.5, 2.0)
    assert s.weight_a.perturbation == ((0.0, 0.5, 1.0), (0.0, 0.1, 0.0))
    assert parse_scenario(serialize_scenario(s)) == s


def test_constants_only_run():
    s = parse_scenario(MINIMAL.replace(
        "[weights.b]", "[weights.b]").replace("dimension = 5",
                                              "dimension = 5\ncells = 100"))
    from dataclasses import replace

    s = replace(s, analyses=("constants",))
    rep = run(s)
    assert len(rep.constants_rows) == 1
    assert rep.minimize_rows == [] and rep.eig_rows == []
    row = rep.constants_rows[0]
    assert row["slope_factor"] == pytest.approx(105.0 / 32.0)


def test_full_run_and_dependencies(tmp_path):
    s = parse_scenario(SWEEP)
    rep = run(s)
    assert len(rep.minimize_rows) == 2
    converged = {r["lambda"] for r in rep.minimize_rows
                 if r["status"] == "converged"}
    poh = {r["lambda"] for r in rep.pohozaev_rows}
    assert poh == converged                     # dependency correctness
    for row in rep.minimize_rows:
        assert row["verdict"] in ("achieved_by_theorem", "energy_gap_only",
                                  "no_minimizer_by_theorem", "outside_theory")
        assert row["case_id"]
    paths = write_report(rep, tmp_path)
    names = {p.name for p in paths}
    assert {"constants.csv", "eig.csv", "minimize.csv", "pohozaev.csv",
            "provenance.csv"} <= names


def test_determinism(tmp_path):
    s = parse_scenario(SWEEP)
    bodies = []
    for tag in ("one", "two"):
        rep = run(s)
        out = tmp_path / tag
        write_report(rep, out)
        body = {}
        for p in sorted(out.glob("*.csv")):
            lines = p.read_text().splitlines()
            body[p.name] = [x for x in lines if not x.startswith("#")]
        bodies.append(body)
    assert bodies[0] == bodies[1]


def test_emit_csv_formatting(tmp_path):
    path = tmp_path / "x.csv"
    emit_csv([{"a": 1.0 / 3.0, "b": True, "c": "txt"}], path, timestamp=False)
    lines = path.read_text().splitlines()
    assert lines[0] == "a,b,c"
    assert lines[1] == "0.33333333333333331,true,txt"


def test_emit_csv_errors(tmp_path):
    with pytest.raises(EmptyReport):
        emit_csv([], tmp_path / "y.csv")
    with pytest.raises(IoError):
        emit_csv([{"a": 1.0}], tmp_path / "no-such-dir" / "y.csv")


def test_cli_end_to_end(tmp_path, capsys):
    cfg = tmp_path / "scen.ini"
    cfg.write_text(SWEEP)
    code = cli_main(["minimize", "--config", str(cfg), "--out",
                     str(tmp_path / "out")])
    assert code == 0
    assert (tmp_path / "out" / "minimize.csv").exists()
    out = capsys.readouterr().out
    assert "minimize.csv" in out


def test_cli_bad_config(tmp_path):
    cfg = tmp_path / "bad.ini"
    cfg.write_text("[domain]\ndimension = 5\nnonsense = 1\n")
    assert cli_main(["constants", "--config", str(cfg)]) == 2


def test_cli_missing_file(tmp_path):
    assert cli_main(["constants", "--config", str(tmp_path / "nope.ini")]) == 2
