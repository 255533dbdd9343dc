import copy
import csv
import json

import pytest

from uwbnotch import cli
from uwbnotch.circuit import SingularNetworkError
from uwbnotch.config import DEFAULT_CONFIG
from uwbnotch.core_em import SPEED_OF_LIGHT


def run(capsys, *argv):
    code = cli.main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def write_config(tmp_path, doc, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return path


def test_design_writes_outputs(tmp_path, capsys):
    code, out, _ = run(capsys, "design", "--out", tmp_path)
    assert code == 0
    assert {p.name for p in tmp_path.iterdir()} == {"design.json", "geometry.json", "layout.svg"}
    design = json.loads((tmp_path / "design.json").read_text())
    lengths = [s["half_wave_length_mm"] for s in design["slots"]]
    assert lengths == pytest.approx([26.06398, 16.58617, 12.16319], abs=1e-5)
    assert [s["flagged"] for s in design["slots"]] == [False, True, False]
    assert "26.06" in out and "+16.4% !" in out


def test_design_free_space_slots(tmp_path, capsys):
    # free-space slots are ~1.64x longer, so the board and patch grow to hold them
    doc = {
        "substrate": {"eps_r": 1.0},
        "substrate_length_mm": 70,
        "substrate_width_mm": 40,
        "patch_radius_mm": 15,
        "taper": {"length_mm": 14},
    }
    cfg = write_config(tmp_path, doc)
    code, _, _ = run(capsys, "design", "--config", cfg, "--out", tmp_path / "o")
    assert code == 0
    slots = json.loads((tmp_path / "o" / "design.json").read_text())["slots"]
    for s in slots:
        assert s["half_wave_length_mm"] == pytest.approx(SPEED_OF_LIGHT / (2 * s["target_hz"]) * 1e3, rel=1e-14)


@pytest.mark.parametrize(
    "text",
    ["{not json", json.dumps({"substrate": {"eps_r": -4.4}}), json.dumps({"notches": [{"band": "nope"}]})],
)
def test_malformed_config(tmp_path, capsys, text):
    cfg = tmp_path / "bad.json"
    cfg.write_text(text)
    out = tmp_path / "o"
    code, _, err = run(capsys, "design", "--config", cfg, "--out", out)
    assert code == 2
    assert "invalid config" in err
    assert not out.exists()


def test_geometry_failure_is_config_error(tmp_path, capsys):
    cfg = write_config(tmp_path, {"patch_radius_mm": 0.1})
    code, _, err = run(capsys, "export", "--config", cfg, "--out", tmp_path / "o")
    assert code == 2
    assert "slot outside patch" in err


def test_analyze(tmp_path, capsys):
    code, out, _ = run(capsys, "analyze", "--out", tmp_path)
    assert code == 0
    with open(tmp_path / "s11.csv", newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["freq_hz", "s11_re", "s11_im", "s11_db", "vswr"]
    assert len(rows) == 1002
    bands = json.loads((tmp_path / "bands.json").read_text())
    assert [b["rejected"] for b in bands["bands"]] == [True, True, True]
    assert bands["uwb_matched"] is True


def test_analyze_without_notches(tmp_path, capsys):
    cfg = write_config(tmp_path, {"notches": []})
    code, _, _ = run(capsys, "analyze", "--config", cfg, "--out", tmp_path / "o")
    assert code == 0
    bands = json.loads((tmp_path / "o" / "bands.json").read_text())
    assert bands["stopbands"] == []
    assert not any(b["rejected"] for b in bands["bands"])


def test_analyze_sweep_override(tmp_path, capsys):
    code, _, _ = run(capsys, "analyze", "--sweep", "3:11:0.5", "--out", tmp_path)
    assert code == 0
    assert len((tmp_path / "s11.csv").read_text().splitlines()) == 18


def test_model_failure(tmp_path, capsys, monkeypatch):
    def broken(params, freqs):
        raise SingularNetworkError("denominator vanished")

    monkeypatch.setattr(cli, "model_trace", broken)
    code, _, err = run(capsys, "analyze", "--out", tmp_path)
    assert code == 3
    assert "model construction failed" in err


def test_notch(capsys, tmp_path):
    code, out, _ = run(capsys, "notch", "--out", tmp_path)
    assert code == 0
    assert "16.59" in out and "5.5000" in out


def test_taper_defaults(capsys):
    code, out, _ = run(capsys, "taper")
    assert code == 0
    assert "aL = 2.37" in out


def test_taper_min_length(capsys):
    code, out, _ = run(capsys, "taper", "--zl", 534.9, "--gamma-max", 0.33, "--f-low", 3.1e9)
    assert code == 0
    assert "33.6366 mm" in out


def test_taper_usage_errors(capsys):
    with pytest.raises(SystemExit) as info:
        cli.main(["taper", "--gamma-max", "0.1"])
    assert info.value.code == 2
    with pytest.raises(SystemExit):
        cli.main(["taper", "--zl", "100", "--a-l", "1"])


def test_optimize(tmp_path, capsys):
    code, out, _ = run(capsys, "optimize", "--out", tmp_path)
    assert code == 0
    tune = json.loads((tmp_path / "tune.json").read_text())
    assert tune["converged"] is True
    assert "converged: True" in out


def detuned_config(scale):
    doc = copy.deepcopy(DEFAULT_CONFIG)
    for n, length in zip(doc["notches"], [26.06398, 16.58617, 12.16319]):
        n["slot_length_mm"] = scale * length
    return doc


def test_optimize_not_converged(tmp_path, capsys):
    doc = detuned_config(1.1)
    doc["optimizer"] = {"max_iterations": 1, "tolerance_hz": 1.0}
    cfg = write_config(tmp_path, doc)
    code, _, err = run(capsys, "optimize", "--config", cfg, "--out", tmp_path / "o")
    assert code == 4
    assert "did not converge" in err
    assert json.loads((tmp_path / "o" / "tune.json").read_text())["converged"] is False


def test_report(tmp_path, capsys):
    code, _, _ = run(capsys, "report", "--out", tmp_path)
    assert code == 0
    report = json.loads((tmp_path / "requirements.json").read_text())
    assert len(report["requirements"]) == 7
    assert report["requirements"][0]["status"] == "PASS"
    rows = report["notch_bands"]
    assert [r["status"] for r in rows] == ["PASS"] * 3
    for r in rows:
        assert abs(r["achieved_center_hz"] - r["target_hz"]) < 50e6


def test_report_detuned(tmp_path, capsys):
    cfg = write_config(tmp_path, detuned_config(1.5))
    code, out, _ = run(capsys, "report", "--config", cfg, "--out", tmp_path / "o")
    assert code == 0
    report = json.loads((tmp_path / "o" / "requirements.json").read_text())
    rows = report["notch_bands"]
    assert [r["status"] for r in rows] == ["FAIL"] * 3
    # the 7.5 GHz slot drops to ~5 GHz and blankets WLAN, but that is not the WLAN slot's notch
    assert rows[1]["band_rejected"] is True
    assert "FAIL" in out


@pytest.mark.parametrize("command, files", [("analyze", ["s11.csv", "bands.json"]), ("optimize", ["tune.json"])])
def test_outputs_are_reproducible(tmp_path, capsys, command, files):
    cfg = write_config(tmp_path, detuned_config(1.05))
    run(capsys, command, "--config", cfg, "--out", tmp_path / "a")
    run(capsys, command, "--config", cfg, "--out", tmp_path / "b")
    for name in files:
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
