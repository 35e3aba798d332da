import json
import math
import subprocess
import sys

import pytest

from thflows.cli import InputError, parse_complex, parse_triple, run, verify_all
from thflows.models import FoliationSpec


def _run(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_parse_complex():
    assert parse_complex("0.5+0.2i") == 0.5 + 0.2j
    assert parse_complex("0.5+0.2j") == 0.5 + 0.2j
    assert parse_complex("2/3") == pytest.approx(2 / 3)
    assert parse_complex("[1, 2]") == 1 + 2j
    assert parse_complex("1,2") == 1 + 2j
    assert parse_complex(3) == 3
    with pytest.raises(InputError):
        parse_complex("abc")
    with pytest.raises(InputError):
        parse_complex([1, 2, 3])


def test_parse_triple():
    assert parse_triple("48,64,64", int) == (48, 64, 64)
    with pytest.raises(InputError):
        parse_triple("1,2")
    with pytest.raises(InputError):
        parse_triple("a,b,c")


def test_bott_quadrature(capsys):
    code, out, _ = _run(capsys, "bott", "--a", "0.3", "--method", "quadrature")
    assert code == 0
    data = json.loads(out)
    exact = -4 * math.pi**2 / 0.21
    assert abs(data["value"][0] - exact) < 1e-8 * abs(exact)
    assert data["method"] == "quadrature_analytic_alpha" and data["grid"] == [48, 64, 64]
    assert data["error_estimate"] >= 0


def test_bott_closed_form_and_normalization(capsys):
    code, out, _ = _run(capsys, "bott", "--n", "2", "--normalization", "two_pi_i")
    assert code == 0
    assert json.loads(out)["value"][0] == pytest.approx(18 * math.pi**2 / (4 * math.pi**2))


def test_full_precision_json(capsys):
    _, out, _ = _run(capsys, "bott", "--a", "0.3")
    v = json.loads(out)["value"][0]
    assert v == -4 * math.pi**2 / (0.3 * 0.7)  # round-trips bit for bit


def test_seifert(capsys):
    code, out, _ = _run(capsys, "seifert", "--a", "2/3")
    data = json.loads(out)
    assert code == 0 and (data["p1"], data["p2"], data["b"]) == (2, 1, 0)
    code, out, _ = _run(capsys, "seifert", "--k", "2,4")
    assert json.loads(out)["multiplicities"] == [2, 4]
    assert _run(capsys, "seifert", "--k", "2")[0] == 2
    assert _run(capsys, "seifert", "--a", "3/2")[0] == 2


def test_verify_discrete(capsys):
    code, out, _ = _run(capsys, "verify", "--spec", '{"family":"discrete","n":2,"lambda":1}', "--points", "1000")
    data = json.loads(out)
    assert code == 0 and data["passed"]
    for c in data["checks"]:
        if "max" in c and not c.get("informational"):
            assert c["max"] < 1e-10


def test_verify_all_cartan_reporting():
    rep = verify_all(FoliationSpec.parametric(1 / 3), 200, 1)
    cart = next(c for c in rep["checks"] if c["check"] == "cartan")
    assert cart["status"] == "PASS"
    rep = verify_all(FoliationSpec.parametric(2 + 1j), 200, 1)
    cart = next(c for c in rep["checks"] if c["check"] == "cartan")
    assert cart["status"] == "FAIL-as-expected" and cart["informational"]
    assert rep["passed"]
    rep = verify_all(FoliationSpec.discrete(1), 200, 1)
    assert next(c for c in rep["checks"] if c["check"] == "integrability")["status"] == "PASS"


def test_verify_deterministic(capsys):
    a = _run(capsys, "verify", "--a", "0.5+0.2i", "--points", "300", "--seed", "7")[1]
    b = _run(capsys, "verify", "--a", "0.5+0.2i", "--points", "300", "--seed", "7")[1]
    assert a == b


def test_monodromy(capsys):
    code, out, _ = _run(capsys, "monodromy", "--a", "1/3", "--leaf", "2")
    data = json.loads(out)
    assert code == 0
    assert abs(complex(*data["value"]) - 2j * math.pi * 0.5) < 1e-4
    code, out, _ = _run(capsys, "monodromy", "--n", "2", "--method", "closed_form")
    assert json.loads(out)["value"] == [0.0, math.pi]
    assert _run(capsys, "monodromy", "--n", "2", "--leaf", "2")[0] == 2
    assert _run(capsys, "monodromy", "--a", "0.5", "--z0", "1")[0] == 2


def test_recover(capsys):
    code, out, _ = _run(capsys, "recover", "--bott", f"{-16 * math.pi**2}")
    data = json.loads(out)
    assert code == 0 and data["discrete_n"] == 1
    assert all(abs(complex(*a) - 0.5) < 1e-7 for a in data["parametric"])


def test_trace_csv_and_svg(capsys, tmp_path):
    svg = tmp_path / "t.svg"
    code, out, _ = _run(capsys, "trace", "--a", "0.5+0.2i", "--advance", "1,12.566370614359172",
                        "--svg", str(svg))
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "t,x1,y1,x2,y2,theta1_lift,theta2_lift,drift"
    last = [float(x) for x in lines[-1].split(",")]
    assert abs(last[5] - lines_first(lines)[5] - 4 * math.pi) < 1e-9
    assert max(float(l.split(",")[-1]) for l in lines[1:]) < 1e-8
    text = svg.read_text()
    assert text.startswith("<?xml") and "<svg" in text and "spec:" in text
    assert _run(capsys, "trace", "--a", "0.5")[0] == 2


def lines_first(lines):
    return [float(x) for x in lines[1].split(",")]


def test_petals(capsys):
    code, out, _ = _run(capsys, "petals", "--n", "2")
    assert code == 0 and json.loads(out)["count"] == 2
    assert _run(capsys, "petals", "--n", "2", "--radius", "2")[0] == 2


def test_petals_workers(capsys):
    code, out, _ = _run(capsys, "petals", "--n", "1", "--workers", "2")
    assert code == 0 and json.loads(out)["count"] == 1


def test_cover(capsys):
    code, out, _ = _run(capsys, "cover", "--n", "3", "--points", "20")
    data = json.loads(out)["max_residuals"]
    assert code == 0
    assert data["pullback"] < 1e-12 and data["zeta"] < 1e-12 and data["sigma_n"] < 1e-10
    assert data["covered_leaf_constants"] < 1e-6


def test_plot(capsys, tmp_path):
    out = tmp_path / "p.svg"
    assert _run(capsys, "plot", "petal_curves", "--n", "3", "--out", str(out))[0] == 0
    assert "polyline" in out.read_text()
    out2 = tmp_path / "q.svg"
    assert _run(capsys, "plot", "trace", "--n", "1", "--t-max", "5", "--out", str(out2))[0] == 0
    assert _run(capsys, "plot", "petal_curves", "--n", "3")[0] == 2


def test_config_merging(capsys, tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"spec": {"family": "parametric", "a": [0.3, 0]}, "normalization": "two_pi_i"}))
    code, out, _ = _run(capsys, "bott", "--config", str(cfg))
    assert code == 0 and json.loads(out)["value"][0] == pytest.approx(1 / 0.21)
    # flags win over the file
    code, out, _ = _run(capsys, "bott", "--config", str(cfg), "--normalization", "standard")
    assert json.loads(out)["normalization"] == "standard"
    cfg.write_text(json.dumps({"bogus": 1}))
    assert _run(capsys, "bott", "--config", str(cfg), "--a", "0.3")[0] == 2
    assert _run(capsys, "bott", "--config", str(tmp_path / "missing.json"), "--a", "0.3")[0] == 3


def test_exit_codes(capsys, tmp_path):
    assert _run(capsys, "bott", "--a", "2")[0] == 2
    assert _run(capsys, "bott", "--a", "0.3", "--n", "2")[0] == 2
    assert _run(capsys, "bott", "--unknown-flag")[0] == 2
    assert _run(capsys, "nonsense")[0] == 2
    assert _run(capsys, "bott", "--a", "0.3", "-o", str(tmp_path / "no" / "dir.json"))[0] == 3


def test_output_file(capsys, tmp_path):
    p = tmp_path / "o.json"
    assert _run(capsys, "recover", "--bott", "-100", "-o", str(p))[0] == 0
    assert "parametric" in json.loads(p.read_text())


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "thflows", "seifert", "--a", "1/2"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0 and json.loads(res.stdout)["p1"] == 1
