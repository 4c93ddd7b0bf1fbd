import json

import pytest

from leafmetric.cli import ScanConfig, main


def run(tmp_path, *argv):
    return main([*argv, "--out", str(tmp_path)])


def body(path):
    return [l for l in path.read_text().splitlines() if not l.startswith("#")]


def test_config_round_trip():
    cfg = ScanConfig(field_source="fixture:radial", chart_center=(0.1j, 0), eps0=0.1, eps1=0.02, seed=7)
    assert ScanConfig.from_json(json.loads(json.dumps(cfg.to_json()))) == cfg


def test_config_rejects_bad_eps():
    with pytest.raises(ValueError, match="eps1 < eps0"):
        ScanConfig(eps0=0.01, eps1=0.02)


def test_fixtures_listing(capsys):
    assert main(["fixtures"]) == 0
    assert "example5" in capsys.readouterr().out


def test_malformed_field_exits_2(tmp_path, capsys):
    f = tmp_path / "bad.txt"
    f.write_text("(z + ) d/dz")
    assert main(["classify", "--field", str(f), "--out", str(tmp_path)]) == 2
    assert "^" in capsys.readouterr().err


def test_invalid_eps_exits_1(tmp_path):
    assert run(tmp_path, "chain", "--fixture", "radial", "--x", "0.3,0.1", "--eps0", "0.01", "--eps1", "0.02") == 1


def test_blowup_witness(tmp_path):
    assert run(tmp_path, "blowup", "--fixture", "example5") == 0
    rep = json.loads((tmp_path / "report.json").read_text())
    assert rep["non_linearizable_witness"] is True
    assert rep["pullback"] == "(t + w) d/dt + (w - t^2*w^3) d/dw"


def test_flow_writes_trace(tmp_path):
    assert run(tmp_path, "flow", "--fixture", "example5", "--z", "0.1,0.2i", "--t", "0.5+0.1i") == 0
    assert (tmp_path / "flow_trace.csv").exists()


def test_holder_is_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        assert main(["holder", "--fixture", "radial", "--pairs", "200", "--seed", "3", "--out", str(d)]) == 0
    assert body(a / "holder.csv") == body(b / "holder.csv")
    rep = json.loads((a / "report.json").read_text())
    assert rep["alpha"] > 0 and rep["fraction_satisfied"] == 1.0


def test_chain_and_eta_on_radial(tmp_path):
    assert run(tmp_path / "c", "chain", "--fixture", "radial", "--x", "0.3,0.2i", "--R", "2") == 0
    assert run(tmp_path / "e", "eta", "--fixture", "radial") == 0
    rep = json.loads((tmp_path / "e" / "report.json").read_text())
    assert rep["slope"] == pytest.approx(1.0, abs=0.02)
