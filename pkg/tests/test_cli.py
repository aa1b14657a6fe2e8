import json

import pytest

from spindlekit.cli import main


def test_cap_eigen_json(capsys):
    assert main(["cap-eigen", "--b", "0"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["lambda"] == pytest.approx(2.0, abs=1e-8)
    assert out["alpha"] == pytest.approx(1.0, abs=1e-8)


def test_iso_verify_csv(capsys):
    assert main(["iso-verify", "--surface", "spindle", "0.5", "--family", "perturbed-caps", "--n", "10", "--out", "csv"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == "curve_id,L,A,margin,relative_margin"
    assert len(lines) == 11
    assert all(float(ln.split(",")[3]) >= 0 for ln in lines[1:])


def test_iso_verify_polygon_file(tmp_path, capsys):
    f = tmp_path / "p.json"
    f.write_text(json.dumps({"vertices": [[1, 0, 0], [0, 1, 0], [0, 0, 1]]}))
    assert main(["iso-verify", "--surface", "polygon", str(f), "--n", "8"]) == 0
    assert len(capsys.readouterr().out.strip().splitlines()) == 9


def test_unknown_flag_is_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["cap-eigen", "--b", "0", "--bogus"])
    assert exc.value.code == 2


def test_out_of_range_is_usage_error(capsys):
    assert main(["cap-eigen", "--b", "3"]) == 2


def test_bad_region_file(tmp_path, capsys):
    assert main(["dn-eigen", "--region", str(tmp_path / "missing.json")]) == 2


def test_dn_eigen_with_mesh_dump(tmp_path, capsys):
    region = tmp_path / "r.json"
    region.write_text(json.dumps({"W": {"lune": {"a": 0.5}}, "V": {"kind": "latitude-cap", "b": 0.4}}))
    out = tmp_path / "mu.json"
    mesh = tmp_path / "m.off"
    assert main(["dn-eigen", "--region", str(region), "--h", "0.1", "--out", str(out), "--mesh-out", str(mesh)]) == 0
    mu = json.loads(out.read_text())["mu"]
    assert mu == pytest.approx(3.88, abs=0.05)
    assert mesh.read_text().startswith("OFF\n")


def test_smooth_report(capsys):
    assert main(["smooth", "--a", "0.5", "--eps", "0.01", "--report", "json"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["coefficients"]["b1"] > 0 > out["coefficients"]["b2"]
    assert all(out["sign_conditions"].values())


def test_smooth_eps_too_large(capsys):
    assert main(["smooth", "--a", "0.5", "--eps", "0.4"]) == 1


def test_bkp_table(tmp_path):
    out = tmp_path / "t.csv"
    assert main(["bkp-table", "--bmin", "-0.5", "--bmax", "0.5", "--n", "3", "--out", str(out)]) == 0
    rows = out.read_text().strip().splitlines()
    assert rows[0] == "b,lambda,alpha,bkp_sum"
    assert float(rows[2].split(",")[3]) == pytest.approx(2.0, abs=1e-9)


def test_verify_lemma_suite(tmp_path):
    out = tmp_path / "rep.json"
    assert main(["verify", "lemma", "--seed", "7", "--out", str(out)]) == 0
    assert json.loads(out.read_text())["passed"] is True
