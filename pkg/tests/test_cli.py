import csv
import io
import json
import math
from fractions import Fraction
from pathlib import Path

import pytest

from tce_dynamics.cli import ConfigError, dumps_json, evaluate, length_value, main, params_from_kv
from tce_dynamics.numeric import PHI

ROOT = Path(__file__).resolve().parent.parent
SWAP = str(ROOT / "params" / "swap2.txt")
REFL = str(ROOT / "params" / "reflective2.txt")
D3 = str(ROOT / "params" / "islands_d3.txt")


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_evaluate():
    assert evaluate("1/3 + 2", {}) == Fraction(7, 3)
    assert evaluate("pi - 2.5", {"pi": math.pi}) == math.pi - 2.5
    assert evaluate("-(2)**3", {}) == -8
    assert length_value("1 - phi") == 1 - PHI
    assert length_value("phi**2") == PHI ** 2
    assert length_value("3/7") == Fraction(3, 7)


@pytest.mark.parametrize("bad", ["__import__('os')", "open('x')", "x + 1", "2 ** 0.5", "[1]", "1 if 1 else 2", "a.b", "1 +"])
def test_evaluate_rejects(bad):
    with pytest.raises(ConfigError):
        evaluate(bad, {"pi": math.pi})


def test_param_validation_messages():
    base = {"alpha": "0.5, pi - 2.5", "tau": "2, 1", "lambda": "phi", "eta": "1 - phi"}
    assert params_from_kv(base).d == 2
    with pytest.raises(ConfigError, match="alpha"):
        params_from_kv({**base, "alpha": "2, 1.5"})
    with pytest.raises(ConfigError, match="tau"):
        params_from_kv({**base, "tau": "1, 1"})
    with pytest.raises(ConfigError, match="eta"):
        params_from_kv({**base, "eta": "2"})
    with pytest.raises(ConfigError, match="lambda"):
        params_from_kv({k: v for k, v in base.items() if k != "lambda"})


def test_bad_params_exit_code(tmp_path, capsys):
    f = tmp_path / "bad.txt"
    f.write_text("alpha = 2, 1.5\ntau = 2, 1\nlambda = phi\neta = 1 - phi\n")
    assert main(["orbit", "--params", str(f), "--z", "0.1,0.1", "--steps", "3"]) == 2
    assert "alpha" in capsys.readouterr().err
    assert main(["orbit", "--params", str(tmp_path / "missing.txt"), "--z", "0,1"]) == 2


def test_orbit_outputs(tmp_path):
    out = tmp_path / "o.csv"
    assert main(["orbit", "--params", SWAP, "--z", "0.3,0.2", "--steps", "50", "--out", str(out)]) == 0
    rows = read_csv(out)
    assert len(rows) == 51
    assert set(rows[0]) == {"n", "re", "im", "symbol"}
    js = tmp_path / "o.json"
    assert main(["orbit", "--params", SWAP, "--z", "0.3,0.2", "--steps", "50", "--out", str(js)]) == 0
    assert json.loads(js.read_text())["schema_version"] == 1
    svg = tmp_path / "o.svg"
    assert main(["orbit", "--params", SWAP, "--z", "0.3,0.2", "--steps", "50", "--out", str(svg)]) == 0
    assert svg.read_text().startswith("<svg")


def test_return_map(tmp_path):
    out = tmp_path / "r.csv"
    svg = tmp_path / "r.svg"
    assert main(["return-map", "--params", SWAP, "--mu-prime", "3.6021", "--cone", "1",
                 "--terms", "5", "--out", str(out), "--svg", str(svg)]) == 0
    rows = read_csv(out)
    assert len(rows) >= 5
    for r in rows:
        assert abs(float(r["y_detected"]) - float(r["y_dynseq"])) <= 1e-9 * float(r["y_dynseq"])
        assert r["side"] == r["side_predicted"]
    assert svg.read_text().startswith("<svg")
    # slope outside the named cone
    assert main(["return-map", "--params", SWAP, "--mu-prime", "-2", "--cone", "1"]) == 2


def test_bifurcation(tmp_path):
    out = tmp_path / "b.csv"
    assert main(["bifurcation", "--k", "1", "--terms", "6", "--out", str(out)]) == 0
    rows = read_csv(out)
    assert [int(r["k_prime"]) for r in rows[:4]] == [2, 5, 13, 34]
    js = tmp_path / "b.json"
    assert main(["bifurcation", "--k", "2", "--terms", "4", "--out", str(js)]) == 0
    json.loads(js.read_text())


def test_dynseq(tmp_path):
    out = tmp_path / "d.csv"
    assert main(["dynseq", "--nu", "1", "--mu", "10", "--k", "1", "--terms", "10", "--out", str(out)]) == 0
    rows = read_csv(out)
    assert len(rows) == 11
    assert "closed_form_p_n" in rows[0]
    assert all(r["match"] == "true" for r in rows)
    out2 = tmp_path / "d2.csv"
    assert main(["dynseq", "--nu", "1", "--mu", "3", "--lam", "phi", "--eta", "phi**3",
                 "--terms", "5", "--out", str(out2)]) == 0
    # a non-golden pair cannot give closed forms
    assert main(["dynseq", "--nu", "1", "--mu", "3", "--lam", "phi", "--eta", "phi**3", "--closed-form"]) == 2


def test_renorm_check(tmp_path, capsys):
    out = tmp_path / "rc.json"
    assert main(["renorm-check", "--params", SWAP, "--samples", "200", "--depth", "2",
                 "--seed", "1", "--out", str(out)]) == 0
    rep = json.loads(out.read_text())
    assert rep["ok"] and rep["max_dev"] < 1e-9
    f = tmp_path / "ng.txt"
    f.write_text("alpha = 0.5, pi - 2.5\ntau = 2, 1\nlambda = phi\neta = phi**3\n")
    assert main(["renorm-check", "--params", str(f), "--samples", "10"]) == 2
    assert "golden" in capsys.readouterr().err


def test_islands(tmp_path):
    out = tmp_path / "i.json"
    svg = tmp_path / "i.svg"
    assert main(["islands", "--params", REFL, "--j", "1", "--max-n", "3", "--samples", "50",
                 "--background", "200", "--out", str(out), "--svg", str(svg)]) == 0
    rep = json.loads(out.read_text())
    assert rep["schema_version"] == 1
    assert svg.stat().st_size < 5_000_000
    assert main(["islands", "--params", D3, "--j", "1", "--max-n", "2", "--samples", "20",
                 "--out", str(tmp_path / "i3.json")]) == 0


def test_verify_all_subset(tmp_path, capsys):
    out = tmp_path / "v.json"
    assert main(["verify-all", "--only", "1", "--out", str(out)]) == 0
    rep = json.loads(out.read_text())
    assert rep["ok"]
    assert "PASS" in capsys.readouterr().err


def test_json_deterministic(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for f in (a, b):
        assert main(["renorm-check", "--params", SWAP, "--samples", "100", "--depth", "1",
                     "--seed", "7", "--out", str(f)]) == 0
    strip = lambda t: {k: v for k, v in json.loads(t).items() if k != "seconds"}  # noqa: E731
    assert strip(a.read_text()) == strip(b.read_text())


def test_dumps_json_floats():
    text = dumps_json({"x": 0.1, "big": float("inf"), "g": PHI, "z": 1 + 2j})
    obj = json.loads(text)
    assert obj["x"] == 0.1 and obj["big"] == "inf" and obj["g"] == "phi" and obj["z"] == [1.0, 2.0]
    assert "0.10000000000000001" in text


def test_stdout_default(capsys):
    assert main(["bifurcation", "--k", "1", "--terms", "3"]) == 0
    rows = list(csv.reader(io.StringIO(capsys.readouterr().out)))
    assert len(rows) == 4
