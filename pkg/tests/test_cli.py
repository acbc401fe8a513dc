import json

import pytest

from warpfield.cli import main
from warpfield.profile import RadialProfile, flat_profile, sine_profile
from warpfield.surgery import Exterior, StdMetricDescriptor


@pytest.fixture(autouse=True)
def _in_tmp(tmp_path, monkeypatch):
    # default output names such as cert.json land in the working directory
    monkeypatch.chdir(tmp_path)


def run(tmp_path, *argv):
    return main([str(a) for a in argv])


def test_torpedo_outputs(tmp_path):
    out, cert, svg = tmp_path / "t.csv", tmp_path / "c.json", tmp_path / "t.svg"
    assert run(tmp_path, "torpedo", "--delta", 0.1, "--b", 0.5, "--out", out, "--cert", cert, "--svg", svg) == 0
    prof = RadialProfile.from_csv(str(out))
    assert prof.r_max == pytest.approx(0.5)
    data = json.loads(cert.read_text())
    # the neck value (n-1)(n-2)/delta^2 is the minimum
    assert data["pass"] is True and data["R_min"] == pytest.approx(200.0, rel=1e-9)
    assert svg.read_text().startswith("<svg")


def test_failing_certificate_exits_one(tmp_path):
    assert run(tmp_path, "torpedo", "--delta", 0.1, "--b", 0.5, "--margin", 1e9, "--cert", tmp_path / "c.json") == 1
    assert json.loads((tmp_path / "c.json").read_text())["pass"] is False


@pytest.mark.parametrize(
    "argv",
    [
        ["torpedo", "--delta", "0.1"],
        ["torpedo", "--delta", "0.1", "--b", "0.01"],
        ["torpedo", "--delta", "x", "--b", "1"],
        ["nonsense"],
        ["verify", "--suite", "no-such-suite"],
        ["retract", "--input", "/no/such/file.csv", "--rho-std", "1"],
        ["torpedo", "--config", "/no/such/config.json"],
    ],
)
def test_usage_errors_exit_two(tmp_path, argv, capsys):
    assert main(argv) == 2
    assert "warpfield" in capsys.readouterr().err


def test_config_supplies_defaults(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"delta": 0.2, "b": 1.0}))
    out = tmp_path / "t.csv"
    assert run(tmp_path, "torpedo", "--config", cfg, "--out", out) == 0
    assert RadialProfile.from_csv(str(out)).r_max == pytest.approx(1.0)
    assert run(tmp_path, "torpedo", "--config", cfg, "--b", 0.8, "--out", out) == 0
    assert RadialProfile.from_csv(str(out)).r_max == pytest.approx(0.8)
    cfg.write_text(json.dumps({"delta": 0.2, "colour": "red"}))
    assert run(tmp_path, "torpedo", "--config", cfg) == 2


def test_torpedo_is_byte_identical(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for path in (a, b):
        assert run(tmp_path, "torpedo", "--delta", 0.1, "--b", 0.5, "--out", path, "--cert", tmp_path / "c.json") == 0
    assert a.read_bytes() == b.read_bytes()


def test_retract_command(tmp_path):
    src = tmp_path / "w.csv"
    sine_profile(0.2, 0.1 * 3.141592653589793).to_csv(src)
    cls, cert = tmp_path / "cls.json", tmp_path / "cert.json"
    code = run(tmp_path, "retract", "--input", src, "--rho-std", 0.1 * 3.141592653589793, "--steps", 16,
               "--classify-json", cls, "--cert", cert, "--out", tmp_path / "p.csv", "--stride", 64)
    assert code == 0
    assert json.loads(cls.read_text())["case_id"] == 2
    assert json.loads(cert.read_text())["pass"] is True
    assert (tmp_path / "p.csv").read_text().startswith("s,arc,f,R")


def test_retract_failure_exits_one(tmp_path):
    src = tmp_path / "w.csv"
    flat_profile(1.0).to_csv(src)
    assert run(tmp_path, "retract", "--input", src, "--rho-std", 1.0, "--steps", 16) == 1


def test_surgery_round_trip(tmp_path):
    d = StdMetricDescriptor("X", 2, 3, 1.0, 0.5, 0.1, exterior=Exterior("m", "m.csv"))
    src, mid, back = tmp_path / "x.json", tmp_path / "y.json", tmp_path / "x2.json"
    src.write_text(d.to_json())
    assert run(tmp_path, "surgery", "--input", src, "--out", mid, "--cert", tmp_path / "h.json") == 0
    assert StdMetricDescriptor.from_json(mid.read_text()).side == "Y"
    assert run(tmp_path, "surgery", "--input", mid, "--direction", "inv", "--out", back) == 0
    assert StdMetricDescriptor.from_json(back.read_text()) == d
    assert json.loads((tmp_path / "h.json").read_text())["pass"] is True
    assert run(tmp_path, "surgery", "--input", src, "--direction", "inv") == 2


def test_verify_subset(tmp_path, capsys):
    out = tmp_path / "v.json"
    code = run(tmp_path, "verify", "--seed", 7, "--suite", "curvature-oracles", "--suite", "surgery-bijection",
               "--json", out)
    assert code == 0
    rows = json.loads(out.read_text())
    assert [r["suite"] for r in rows] == ["curvature-oracles", "surgery-bijection"]
    assert all(r["pass"] for r in rows)
    assert "curvature-oracles" in capsys.readouterr().out


def test_verify_is_deterministic(tmp_path):
    outs = []
    for name in ("a.json", "b.json"):
        path = tmp_path / name
        assert run(tmp_path, "verify", "--seed", 3, "--suite", "finite-differences", "--json", path) == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]


def test_bend_command(tmp_path):
    cert, curve = tmp_path / "b.json", tmp_path / "curve.csv"
    assert run(tmp_path, "bend", "--steps", 16, "--cert", cert, "--curve", curve, "--stride", 256) == 0
    assert json.loads(cert.read_text())["pass"] is True
    assert curve.read_text().count("\n") > 100
