import copy
import json
import math

import pytest

from spindlekit.errors import BadRegionSpec
from spindlekit.io import csv_text, dumps_json, format_float
from spindlekit.regions import build_region
from spindlekit.verify import (
    Report,
    load_config,
    polygon_from_config,
    region_with_area,
    run_faber_krahn_suite,
    run_lemma_suite,
    run_theorem_iso_suite,
)


def small_config():
    cfg = copy.deepcopy(load_config())
    cfg["iso"].update(a_grid=[0.5], curves_per_surface=10, doubled_polygons=["octant"], regions_per_polygon=8)
    fk = cfg["faber_krahn"]
    fk["h"] = 0.1
    fk["area_fractions"] = [0.4]
    fk["shapes"] = fk["shapes"][:1] + fk["shapes"][4:5]
    fk["convergence"]["h"] = [0.2, 0.1]
    fk["bkp"]["n"] = 3
    cfg["friedland_hayman"]["h"] = 0.1
    cfg["friedland_hayman"]["partitions"] = cfg["friedland_hayman"]["partitions"][:2]
    lc = cfg["lemma"]
    lc["sum_lemma"]["n"] = 200
    lc["dichotomy"]["n"] = 20
    lc["calibration"] = {"a_grid": [0.3, 0.6], "eps_grid": [1e-2, 1e-3], "safety": 2.0}
    return cfg


def test_config_is_versioned():
    cfg = load_config()
    assert cfg["config_version"] >= 1
    assert len(cfg["faber_krahn"]["shapes"]) == 10
    assert len(cfg["friedland_hayman"]["partitions"]) == 5


def test_region_with_area_hits_target():
    W = polygon_from_config({"octant": True})
    shape = {"name": "t", "family": "halfspace", "normal": [1.0, -1.0, 0.0]}
    V = region_with_area(W, shape, 0.5)
    assert build_region(W, V).area() == pytest.approx(0.5, abs=1e-12)
    with pytest.raises(BadRegionSpec):
        region_with_area(W, shape, 10.0)


def test_lemma_suite_passes_and_is_deterministic():
    cfg = small_config()
    r1 = run_lemma_suite(7, cfg)
    r2 = run_lemma_suite(7, cfg)
    assert r1.passed
    assert r1.to_json() == r2.to_json()
    verdicts = {c.claim_id: c.verdict for c in r1.claims}
    assert verdicts["lemma.budget-constant"] == "informational"


def test_iso_and_fk_suites_small():
    cfg = small_config()
    iso = run_theorem_iso_suite(3, cfg)
    assert all(c.verdict == "pass" for c in iso.claims if c.claim_id != "iso.equality-detector")
    fk = run_faber_krahn_suite(3, cfg)
    assert fk.passed, [c.claim_id for c in fk.failures()]
    ids = {c.claim_id for c in fk.claims}
    assert {"fk.convergence", "fk.bkp", "fh.lune50-half"} <= ids


def test_report_json_layout():
    rep = Report("x", 1)
    rep.add("b.claim", "anchor", {"k": 1}, {"v": 0.1}, 1e-3, True)
    rep.add("a.claim", "anchor", {"k": 2}, {"v": 1.0}, 1e-3, False)
    d = json.loads(rep.to_json())
    assert [c["id"] for c in d["claims"]] == ["a.claim", "b.claim"]
    assert d["counts"] == {"pass": 1, "fail": 1, "informational": 0}
    assert not rep.passed


def test_float_formats():
    assert format_float(0.1) == "0.10000000000000001"
    assert format_float(0.1, 12) == "0.1"
    assert json.loads(dumps_json({"x": [math.pi, 1]}))["x"][0] == math.pi
    assert csv_text(["a", "b"], [[1, 1 / 3]]) == "a,b\n1,0.333333333333\n"
