import csv
import io
import json
import subprocess
import sys
import time

import numpy as np
import pytest

from qengine import cli
from qengine.cli import CSV_COLUMNS, main

HEADER = ("kind,gamma0,omega_h,omega_c,beta_h,beta_c,alpha,n_h,n_c,valid,coherence,power,j_hot,j_cold,"
          "efficiency,entropy_rate,var_power,nsr,F_p,fano,q_ctur,upsilon,psi,f_qtur,slack")


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def read_rows(path):
    lines = path.read_text(encoding="utf-8").splitlines()
    data = [ln for ln in lines if not ln.startswith("#")]
    return lines, list(csv.reader(io.StringIO("\n".join(data))))


def test_header_pinned():
    assert ",".join(CSV_COLUMNS) == HEADER


def test_format_is_fixed_scientific():
    assert cli.fmt(0.5) == "5.00000000000000000e-01"
    assert cli.fmt(True) == "true"
    assert cli.fmt(float("nan")) == "nan"


# -- point -----------------------------------------------------------------

POINT = ["point", "--kind", "coherent", "--gamma0", "0.01", "--wh", "10", "--wc", "5", "--bh", "0.01",
         "--bc", "0.8", "--alpha", "0.8"]


def test_point_report(capsys):
    code, out, _ = run(capsys, *POINT)
    assert code == 0
    rep = json.loads(out)
    assert list(rep) == ["occupations", "rates", "steady_state", "observables", "cumulants", "fano", "tur"]
    assert rep["observables"]["efficiency"] == 0.5
    assert rep["observables"]["power"] < 0
    assert rep["tur"]["qtur_ok"] is True
    assert list(rep["cumulants"]) == ["power", "hot_current", "cold_current", "photon_flux"]


def test_point_deterministic(capsys):
    outs = [run(capsys, *POINT)[1] for _ in range(2)]
    assert outs[0] == outs[1]


def test_point_both_kinds(capsys):
    code, out, _ = run(capsys, "point", "--kind", "both")
    assert code == 0
    assert list(json.loads(out)) == ["coherent", "incoherent"]


def test_point_zero_drive(capsys):
    code, out, _ = run(capsys, *POINT[:-1], "0")
    rep = json.loads(out)
    assert code == 0
    assert rep["observables"]["power"] == 0
    assert rep["cumulants"]["power"]["nsr"] == "ZeroMean"
    assert rep["tur"]["q_value"] == "ZeroMean"


def test_point_not_an_engine(capsys):
    code, _, err = run(capsys, "point", "--bh", "0.5", "--bc", "0.8")
    assert code == 3 and "not an engine" in err


def test_point_invalid_parameters(capsys):
    code, _, err = run(capsys, "point", "--bh", "0.9", "--bc", "0.8")
    assert code == 2 and "beta_c > beta_h" in err
    code, _, err = run(capsys, "point", "--wh", "4")
    assert code == 2 and "omega_h > omega_c" in err


def test_point_zero_temperature_cold_bath(capsys):
    code, out, _ = run(capsys, "point", "--bc", "1e6")
    rep = json.loads(out)
    assert code == 0 and rep["tur"]["infinite_entropy"] is True and rep["tur"]["q_value"] == "inf"


# -- config ----------------------------------------------------------------

def test_config_precedence(tmp_path, capsys):
    cfg = tmp_path / "engine.cfg"
    cfg.write_text("# operating point\nkind = incoherent\nbc = 3\nalpha = 0.1\n", encoding="utf-8")
    _, out, _ = run(capsys, "point", "--config", str(cfg))
    from_file = json.loads(out)
    _, out, _ = run(capsys, "point", "--kind", "incoherent", "--bc", "3", "--alpha", "0.1")
    assert json.loads(out) == from_file
    _, out, _ = run(capsys, "point", "--config", str(cfg), "--alpha", "0.2")
    assert json.loads(out)["observables"]["power"] != from_file["observables"]["power"]


def test_config_errors(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("alpha 0.1\n", encoding="utf-8")
    assert run(capsys, "point", "--config", str(cfg))[0] == 2
    cfg.write_text("colour = blue\n", encoding="utf-8")
    assert run(capsys, "point", "--config", str(cfg))[0] == 2
    assert run(capsys, "point", "--config", str(tmp_path / "missing.cfg"))[0] == 2


# -- sweep -----------------------------------------------------------------

def test_sweep_row_count(tmp_path, capsys):
    out = tmp_path / "s.csv"
    code, _, _ = run(capsys, "sweep", "--vary", "alpha:1e-3:1:100:log", "--kind", "both", "--out", str(out))
    assert code == 0
    lines, rows = read_rows(out)
    assert lines[0] == HEADER
    assert len(rows) == 201
    assert [r[0] for r in rows[1:]] == ["coherent"] * 100 + ["incoherent"] * 100
    assert all(r[9] == "true" for r in rows[1:])
    assert out.read_bytes().count(b"\r") == 0


def test_sweep_two_axes_ordering(tmp_path, capsys):
    out = tmp_path / "s.csv"
    code, _, _ = run(capsys, "sweep", "--vary", "alpha:1e-3:1:50:log", "--vary", "beta_c:0.0015:0.1:50:log",
                     "--bh", "0.001", "--kind", "coherent", "--method", "closed", "--out", str(out))
    assert code == 0
    _, rows = read_rows(out)
    rows = rows[1:]
    assert len(rows) == 2500
    alpha = np.array([float(r[6]) for r in rows]).reshape(50, 50)
    beta_c = np.array([float(r[5]) for r in rows]).reshape(50, 50)
    assert np.all(alpha == alpha[:, :1]) and np.all(np.diff(alpha[:, 0]) > 0)
    assert np.all(beta_c == beta_c[:1, :]) and np.all(np.diff(beta_c[0]) > 0)
    # beta_c * omega_c <= beta_h * omega_h at the low end: flagged, not dropped
    valid = np.array([r[9] == "true" for r in rows]).reshape(50, 50)
    assert not valid[:, 0].any() and valid[:, -1].all()


def test_sweep_numeric_matches_closed(tmp_path, capsys):
    paths = {}
    for method in ("numeric", "closed"):
        paths[method] = tmp_path / ("%s.csv" % method)
        run(capsys, "sweep", "--vary", "alpha:1e-3:1:12:log", "--vary", "beta_c:0.5:3:3", "--kind", "both",
            "--method", method, "--out", str(paths[method]))
    a = np.array([[float(x) for x in r[10:]] for r in read_rows(paths["numeric"])[1][1:]])
    b = np.array([[float(x) for x in r[10:]] for r in read_rows(paths["closed"])[1][1:]])
    assert a.shape == (72, 15)
    np.testing.assert_allclose(a, b, rtol=1e-7, atol=1e-300)


def test_sweep_deterministic(tmp_path, capsys):
    out = [tmp_path / "a.csv", tmp_path / "b.csv"]
    for path in out:
        run(capsys, "sweep", "--vary", "alpha:1e-3:1:20:log", "--vary", "beta_h:0.001:0.01:4", "--out", str(path))
    assert out[0].read_bytes() == out[1].read_bytes()


@pytest.mark.parametrize("axis", ["alpha:0:1:5", "alpha:1:2:1", "gamma0:1:2:3", "alpha:1:2", "alpha:1:2:3:cubic",
                                  "alpha:a:2:3"])
def test_sweep_spec_errors(axis, tmp_path, capsys):
    code, _, err = run(capsys, "sweep", "--vary", axis, "--out", str(tmp_path / "x.csv"))
    assert code == 2 and err


def test_sweep_invalid_grid_point(tmp_path, capsys):
    # beta_h crosses beta_c = 0.8: parameter-invalid, not just engine-invalid
    code, _, err = run(capsys, "sweep", "--vary", "beta_h:0.1:1:4", "--out", str(tmp_path / "x.csv"))
    assert code == 2 and "beta_c > beta_h" in err


def test_sweep_not_an_engine_rows(tmp_path, capsys):
    out = tmp_path / "s.csv"
    run(capsys, "sweep", "--vary", "beta_h:0.01:0.5:5", "--out", str(out))
    _, rows = read_rows(out)
    flags = [r[9] for r in rows[1:]]
    assert "false" in flags and "true" in flags
    assert all(r[10] == "nan" for r in rows[1:] if r[9] == "false")


# -- figures ---------------------------------------------------------------

def test_figure_fig4b(tmp_path, capsys):
    out = tmp_path / "f.csv"
    code, text, _ = run(capsys, "figure", "Fig4b", "--out", str(out))
    assert code == 0
    assert "min q (coherent) = 1.24" in text
    lines, rows = read_rows(out)
    assert lines[0] == HEADER
    assert len(rows) == 801
    assert any(ln.startswith("# preset Fig4b") for ln in lines)


@pytest.mark.parametrize("preset,extra", [("Fig2a", "power_ratio"), ("Fig3b", "rel_slack"),
                                          ("Fig4a", None), ("AlphaCrit", "alpha_crit")])
def test_figure_columns(preset, extra, tmp_path, capsys):
    out = tmp_path / "f.csv"
    assert run(capsys, "figure", preset, "--out", str(out))[0] == 0
    header = out.read_text(encoding="utf-8").splitlines()[0]
    assert header == HEADER + ("," + extra if extra else "")


def test_figure_unknown_preset(capsys):
    assert run(capsys, "figure", "Fig9")[0] == 2


# -- validate --------------------------------------------------------------

def test_validate_passes(capsys):
    t0 = time.perf_counter()
    code, out, _ = run(capsys, "validate", "--seed", "42", "--samples", "200")
    assert code == 0, out
    assert time.perf_counter() - t0 < 10
    assert "failures=0" in out and "not-an-engine=" in out
    skipped = int(out.split("not-an-engine=")[1].split()[0])
    assert skipped > 0


def test_validate_no_samples(capsys):
    assert run(capsys, "validate", "--samples", "0")[0] == 2


def test_validate_reports_failures(capsys, monkeypatch):
    monkeypatch.setattr(cli, "validate_point", lambda p: [("made-up check", 1.0, 0.5)])
    code, out, _ = run(capsys, "validate", "--samples", "2")
    assert code == 1 and out.startswith("FAIL made-up check")


def test_console_entry_point():
    res = subprocess.run([sys.executable, "-m", "qengine", "point", "--bh", "0.5", "--bc", "0.8"],
                         capture_output=True, text=True)
    assert res.returncode == 3
