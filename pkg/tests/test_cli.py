"""
End-to-end tests for the command-line front end.
"""
import csv
import io
import json

import numpy as np
import pytest

from polarlab.ensemble_lab import closed_form_pair_phase, closed_form_pair_visibility
from polarlab_cli import main


def write_grid(path, matrix):
    path.write_text("\n".join(",".join(repr(float(v)) for v in row) for row in matrix) + "\n")
    return str(path)


def write_json(path, doc):
    path.write_text(json.dumps(doc))
    return str(path)


def run(capsys, argv):
    status = main(argv)
    captured = capsys.readouterr()
    return status, captured.out, captured.err


def damping_kraus(gamma):
    return {"kraus": [
        [1, 0, 0, 0, 0, 0, np.sqrt(1 - gamma), 0],
        [0, 0, np.sqrt(gamma), 0, 0, 0, 0, 0],
    ]}


def test_analyze_identity(tmp_path, capsys):
    status, out, _ = run(capsys, ["analyze-mueller", write_grid(tmp_path / "id.csv", np.eye(4))])
    assert status == 0
    report = json.loads(out)
    assert list(report)[:2] == ["meta", "validity"]
    assert report["meta"]["mode"] == "mueller-analyze"
    assert report["validity"]["verdict"] == "PHYSICAL"
    assert report["purity"]["P1"] == pytest.approx(1.0)
    assert report["holonomy"]["angle"] == pytest.approx(0.0, abs=1e-12)
    assert len(report["phases"]) == 1
    assert "error" not in report


def test_analyze_depolarizer_reports_no_core(tmp_path, capsys):
    path = write_grid(tmp_path / "dep.csv", np.diag([1.0, 0, 0, 0]))
    status, out, err = run(capsys, ["analyze-mueller", path])
    assert status == 3
    report = json.loads(out)
    np.testing.assert_allclose([report["purity"][k] for k in ("P1", "P2", "P3")], [0, 0, 0], atol=1e-12)
    assert "holonomy" not in report
    assert report["error"]["code"] == "no_coherent_core"
    assert list(report)[-1] == "error"
    assert "no_coherent_core" in err


def test_analyze_with_probe(tmp_path, capsys):
    phi = 0.8
    m = np.eye(4)
    m[2:, 2:] = [[np.cos(phi), -np.sin(phi)], [np.sin(phi), np.cos(phi)]]
    path = write_grid(tmp_path / "ret.csv", m)
    status, out, _ = run(capsys, ["analyze-mueller", path, "--probe", "1,0,0", "-p", "0,0,1"])
    assert status == 0
    phases = json.loads(out)["phases"]
    assert len(phases) == 2
    assert phases[0]["geometric_phase"] == pytest.approx(-phi / 2, abs=1e-9)
    assert phases[0]["coherent_visibility_modulus"] == pytest.approx(1.0, abs=1e-9)
    assert phases[1]["geometric_phase"] == pytest.approx(0.0, abs=1e-9)


def test_validate_nonphysical(tmp_path, capsys):
    path = write_grid(tmp_path / "bad.csv", np.diag([1.0, 1.0, 1.0, -1.0]))
    status, out, err = run(capsys, ["validate", path])
    assert status == 2
    report = json.loads(out)
    assert report["validity"]["verdict"] == "NONPHYSICAL"
    assert report["validity"]["min_eigenvalue"] == pytest.approx(-0.5)
    assert "nonphysical" in err


def test_parse_errors(tmp_path, capsys):
    path = write_json(tmp_path / "short.json", {"mueller": [0.0] * 15})
    status, out, err = run(capsys, ["analyze-mueller", path])
    assert status == 4
    assert "missing 1" in json.loads(out)["error"]["message"]

    status, _, _ = run(capsys, ["validate", str(tmp_path / "absent.csv")])
    assert status == 4

    status, _, err = run(capsys, ["sweep", "--family", "retarder-pair", "--grid", "0:3"])
    assert status == 4
    assert "start:stop:count" in err


def test_usage_error_exits_with_one(capsys):
    with pytest.raises(SystemExit) as e:
        main([])
    assert e.value.code == 1


def test_sweep_matches_closed_form(capsys):
    status, out, _ = run(capsys, ["sweep", "--family", "retarder-pair", "--grid", "0:3:200"])
    assert status == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 200
    for row in rows:
        phi = float(row["param"])
        v = closed_form_pair_visibility(phi)
        assert float(row["re_v"]) == pytest.approx(v.real, abs=1e-12)
        assert float(row["im_v"]) == pytest.approx(v.imag, abs=1e-12)
        assert float(row["arg_v"]) == pytest.approx(closed_form_pair_phase(phi), abs=1e-12)


def test_sweep_from_family_document(tmp_path, capsys):
    path = write_json(tmp_path / "family.json", {"retarder_family": [
        {"weight": 0.5, "axis": [1, 0, 0]},
        {"weight": 0.5, "axis": [0, 1, 0]},
    ]})
    status, out, _ = run(capsys, ["sweep", path, "--grid", "0:3:7", "--format", "structured-report"])
    assert status == 0
    sweep = json.loads(out)["sweep"]
    assert len(sweep) == 7
    assert sweep[-1]["im_v"] == pytest.approx(closed_form_pair_visibility(3.0).imag, abs=1e-12)


def test_channel_amplitude_damping(tmp_path, capsys):
    path = write_json(tmp_path / "damping.json", damping_kraus(0.3))
    status, out, _ = run(capsys, ["analyze-channel", path])
    assert status == 0
    channel = json.loads(out)["channel"]
    assert channel["source"] == "kraus"
    assert channel["kraus_count"] == 2
    assert channel["trace_preserving"]
    assert channel["dissipative"]
    assert channel["angle"] == pytest.approx(0.0, abs=1e-10)
    np.testing.assert_allclose(channel["lambdas"], [0.85, 0.15, 0, 0], atol=1e-12)


def test_channel_completely_depolarizing(tmp_path, capsys):
    ops = [[0.5, 0, 0, 0, 0, 0, 0.5, 0], [0.5, 0, 0, 0, 0, 0, -0.5, 0],
           [0, 0, 0.5, 0, 0.5, 0, 0, 0], [0, 0, 0, -0.5, 0, 0.5, 0, 0]]
    path = write_json(tmp_path / "dep.json", {"kraus": ops})
    status, out, _ = run(capsys, ["analyze-channel", path])
    assert status == 3
    report = json.loads(out)
    assert report["channel"]["trace_preserving"]
    assert report["error"]["code"] == "no_coherent_core"


@pytest.mark.parametrize("rho", [np.zeros((4, 4)), -np.eye(4) / 4])
def test_channel_choi_without_positive_trace(tmp_path, capsys, rho):
    path = write_json(tmp_path / "choi.json", {"choi": rho.tolist()})
    status, out, err = run(capsys, ["analyze-channel", path])
    assert status == 2
    report = json.loads(out)
    assert report["channel"]["source"] == "choi"
    assert report["error"]["code"] == "nonphysical"
    assert "positive trace" in report["error"]["message"]
    assert "nonphysical" in err


def test_channel_from_choi(tmp_path, capsys):
    rho = np.zeros((4, 4))
    rho[0, 0] = rho[0, 3] = rho[3, 0] = rho[3, 3] = 0.5
    path = write_json(tmp_path / "choi.json", {"choi": rho.tolist()})
    status, out, _ = run(capsys, ["analyze-channel", path])
    assert status == 0
    channel = json.loads(out)["channel"]
    assert channel["source"] == "choi"
    assert not channel["dissipative"]


def test_synth_from_seed_and_ensemble(tmp_path, capsys):
    status, out, _ = run(capsys, ["synth", "--seed", "7", "--rank", "2"])
    assert status == 0
    report = json.loads(out)
    assert report["components"]["source"] == "seed"
    assert report["validity"]["verdict"] == "PHYSICAL"

    phi = 1.2
    c, s = np.cos(phi / 2), np.sin(phi / 2)
    doc = {"jones_ensemble": [
        {"weight": 0.5, "jones": [c, -s, 0, 0, 0, 0, c, s]},
        {"weight": 0.5, "jones": [c, 0, 0, -s, 0, -s, c, 0]},
    ]}
    status, out, _ = run(capsys, ["synth", write_json(tmp_path / "pair.json", doc), "--probe", "1,0,0,0"])
    assert status == 0
    report = json.loads(out)
    assert report["phases"][0]["arg"] == pytest.approx(closed_form_pair_phase(phi), abs=1e-12)
    m = np.array(report["components"]["mueller"])
    assert m[0, 0] == pytest.approx(1.0)


def test_table_format_and_output_file(tmp_path, capsys):
    path = write_grid(tmp_path / "id.csv", np.eye(4))
    out_file = tmp_path / "out" / "report.csv"
    status, out, _ = run(capsys, ["analyze-mueller", path, "-f", "table", "-o", str(out_file)])
    assert status == 0
    assert out == ""
    lines = out_file.read_text().splitlines()
    assert lines[0] == "section,key,value"
    assert any(line.startswith("purity,P1,") for line in lines)


def test_reports_are_reproducible(tmp_path, capsys):
    path = write_grid(tmp_path / "m.csv", np.diag([1.0, 0.5, 0.3, 0.1]))
    first, second = tmp_path / "a.json", tmp_path / "b.json"
    assert run(capsys, ["analyze-mueller", path, "-o", str(first)])[0] == 0
    assert run(capsys, ["analyze-mueller", path, "-o", str(second)])[0] == 0
    assert first.read_bytes() == second.read_bytes()


def test_batch_mode(tmp_path, capsys):
    inputs = tmp_path / "inputs"
    inputs.mkdir()
    write_grid(inputs / "good.csv", np.eye(4))
    write_grid(inputs / "bad.csv", np.diag([1.0, 1.0, 1.0, -1.0]))
    out_dir = tmp_path / "reports"
    status, _, err = run(capsys, ["validate", str(inputs), "--batch", "-o", str(out_dir), "--workers", "2"])
    assert status == 2
    assert json.loads((out_dir / "good.json").read_text())["validity"]["verdict"] == "PHYSICAL"
    assert json.loads((out_dir / "bad.json").read_text())["error"]["code"] == "nonphysical"
    assert "nonphysical" in err
