"""Reproducible pass/fail reports for the isoperimetric and eigenvalue claims.

Each suite reads its grids from ``data/suites.json`` and returns a
:class:`Report` whose claims carry a short anchor string naming the
statement being checked, a digest of the inputs, the computed values and
a verdict.  Nothing time- or machine-dependent enters a report.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources
import hashlib
import json
import math

import numpy as np
from scipy import optimize

from . import __version__
from .errors import BadRegionSpec, SpindleKitError
from .fem import assemble, dn_eigenvalue, mesh_region, smallest_eigenvalue
from .io import dumps_json
from .isoperimetry import IsoTestCurveFamily, check_doubled, lemma_sum_check, polygon_family, profile_ode_identity
from .regions import build_region
from .smoothing import (
    calibrate_budget_constant,
    sign_conditions,
    smooth_tip,
    smoothed_curvature,
    tip_curvature_mass,
    total_curvature_smoothed,
)
from .spectral import bkp_sum, cap_eigenvalue, char_exponent
from .sphere_geom import (
    Lune,
    SphericalPolygon,
    delta_of_polygon,
    gen_p_dichotomy,
    interior_angles,
    octant_triangle,
    polygon_area,
    random_convex_polygon,
    regular_polygon,
)
from .spindle import Cap, cap_area, cap_perimeter, cap_with_area, profile_g, total_area

__all__ = [
    "Claim",
    "Report",
    "load_config",
    "polygon_from_config",
    "run_theorem_iso_suite",
    "run_faber_krahn_suite",
    "run_lemma_suite",
    "run_all",
]

PASS, FAIL, INFO = "pass", "fail", "informational"


@dataclass(frozen=True)
class Claim:
    claim_id: str
    anchor: str
    inputs_digest: str
    values: dict
    tolerance: float
    verdict: str

    def to_dict(self) -> dict:
        return {
            "id": self.claim_id,
            "anchor": self.anchor,
            "inputs_digest": self.inputs_digest,
            "tolerance": self.tolerance,
            "verdict": self.verdict,
            "values": self.values,
        }


@dataclass
class Report:
    suite: str
    seed: int
    claims: list = field(default_factory=list)
    config_version: int = 1

    def add(self, claim_id: str, anchor: str, inputs, values: dict, tolerance: float, ok) -> Claim:
        if ok is None:
            verdict = INFO
        else:
            verdict = PASS if ok else FAIL
        c = Claim(claim_id, anchor, digest(inputs), values, float(tolerance), verdict)
        self.claims.append(c)
        return c

    def extend(self, other: "Report") -> None:
        self.claims.extend(other.claims)

    @property
    def passed(self) -> bool:
        return all(c.verdict != FAIL for c in self.claims)

    def failures(self) -> list:
        return [c for c in self.claims if c.verdict == FAIL]

    def to_dict(self) -> dict:
        claims = sorted(self.claims, key=lambda c: c.claim_id)
        return {
            "suite": self.suite,
            "seed": self.seed,
            "package_version": __version__,
            "config_version": self.config_version,
            "passed": self.passed,
            "counts": {v: sum(c.verdict == v for c in claims) for v in (PASS, FAIL, INFO)},
            "claims": [c.to_dict() for c in claims],
        }

    def to_json(self) -> str:
        return dumps_json(self.to_dict())

    def to_csv_rows(self):
        for c in sorted(self.claims, key=lambda c: c.claim_id):
            yield c.claim_id, c.anchor, c.verdict, c.tolerance, c.inputs_digest


def digest(obj) -> str:
    text = json.dumps(obj, sort_keys=True, default=_jsonable, separators=(",", ":"))
    return hashlib.sha256(text.encode()).hexdigest()[:16]


def _jsonable(x):
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    return repr(x)


def load_config() -> dict:
    text = resources.files("spindlekit").joinpath("data/suites.json").read_text(encoding="utf-8")
    return json.loads(text)


def polygon_from_config(spec: dict):
    if spec.get("octant"):
        return octant_triangle()
    if "regular" in spec:
        r = spec["regular"]
        return regular_polygon(int(r["n"]), float(r["circumradius"]))
    if "random" in spec:
        r = spec["random"]
        rng = np.random.default_rng(int(r["seed"]))
        return random_convex_polygon(rng, int(r["n"]), float(r["radius"]))
    if "lune" in spec:
        return Lune(float(spec["lune"]["a"]))
    if "vertices" in spec:
        return SphericalPolygon(np.asarray(spec["vertices"], dtype=float))
    raise BadRegionSpec(f"unknown polygon spec {spec!r}")


def _w_area(W) -> float:
    return W.area() if isinstance(W, Lune) else polygon_area(W)


def _w_a(W) -> float:
    return _w_area(W) / (2.0 * math.pi)


def _centroid(W) -> np.ndarray:
    if isinstance(W, Lune):
        lon = 0.5 * math.pi * W.a
        return np.array([math.cos(lon), math.sin(lon), 0.0])
    c = W.vertices.sum(axis=0)
    return c / np.linalg.norm(c)


def _family_spec(W, shape: dict, p: float) -> dict:
    fam = shape["family"]
    if fam == "latitude-cap":
        V = {"kind": "latitude-cap", "b": p}
        if "vertex" in shape:
            V["vertex"] = int(shape["vertex"])
        return V
    if fam == "geodesic-disc":
        center = shape.get("center")
        center = _centroid(W).tolist() if center is None else center
        V = {"kind": "geodesic-disc", "center": center, "radius": p}
        if shape.get("clip"):
            V["clip"] = True
        return V
    if fam == "halfspace":
        n = np.asarray(shape["normal"], dtype=float)
        return {"kind": "halfspace", "normal": (n / np.linalg.norm(n)).tolist(), "offset": p}
    raise BadRegionSpec(f"unknown family {fam!r}")


def _param_range(fam: str):
    if fam == "latitude-cap":
        return -0.5 * math.pi + 1e-3, 0.5 * math.pi - 1e-3
    if fam == "geodesic-disc":
        return 1e-3, math.pi - 1e-3
    return -0.999, 0.999


def region_with_area(W, shape: dict, target: float):
    """V-spec of the shape's one-parameter family with area ``target``."""
    lo, hi = _param_range(shape["family"])
    grid = np.linspace(lo, hi, 97)
    areas = []
    for p in grid:
        try:
            areas.append(build_region(W, _family_spec(W, shape, float(p))).area())
        except BadRegionSpec:
            areas.append(math.nan)
    areas = np.array(areas)
    for i in range(len(grid) - 1):
        a0, a1 = areas[i] - target, areas[i + 1] - target
        if np.isfinite(a0) and np.isfinite(a1) and a0 * a1 <= 0.0:
            f = lambda p: build_region(W, _family_spec(W, shape, p)).area() - target
            p = optimize.brentq(f, grid[i], grid[i + 1], xtol=1e-14, rtol=1e-14)
            return _family_spec(W, shape, p)
    raise BadRegionSpec(f"no member of {shape['name']} has area {target}")


# suites


def run_theorem_iso_suite(seed: int, config: dict | None = None) -> Report:
    cfg = config or load_config()
    ic = cfg["iso"]
    rep = Report("iso", seed, config_version=cfg["config_version"])
    anchor = "isoperimetric inequality L^2 >= A(4 pi a - A) on spindles and doubled polygons"
    total = 0
    wrong_equality = []
    for a in ic["a_grid"]:
        fam = IsoTestCurveFamily(a, seed, "all", ic["curves_per_surface"])
        res = fam.check_all()
        total += len(res)
        scale = (4.0 * math.pi * a) ** 2
        non_eq = [r for r in res if not r.equality_expected]
        eq = [r for r in res if r.equality_expected]
        wrong_equality += [f"a={a}:{r.label}" for r in res if r.is_equality != r.equality_expected]
        rep.add(
            f"iso.spindle.a={a:g}",
            anchor + (" (round sphere: classical case)" if a == 1.0 else ""),
            {"a": a, "seed": seed, "n": ic["curves_per_surface"]},
            {
                "n_curves": len(res),
                "min_scaled_margin": min(r.margin for r in res) / scale,
                "min_relative_margin_non_equality": min(r.relative_margin for r in non_eq),
                "max_scaled_abs_margin_equality": max((abs(r.margin) for r in eq), default=0.0) / scale,
                "n_equality_expected": len(eq),
            },
            1e-6,
            all(r.passed for r in res),
        )
    for name in ic["doubled_polygons"]:
        W = polygon_from_config(cfg["polygons"][name])
        a = _w_a(W)
        res = [check_doubled(W, parts, label=label) for label, parts in polygon_family(W, seed, ic["regions_per_polygon"])]
        total += len(res)
        wrong_equality += [f"{name}:{r.label}" for r in res if r.is_equality]
        rep.add(
            f"iso.doubled.{name}",
            anchor,
            {"polygon": cfg["polygons"][name], "seed": seed, "n": ic["regions_per_polygon"]},
            {
                "a": a,
                "delta": delta_of_polygon(W),
                "n_regions": len(res),
                "min_scaled_margin": min(r.margin for r in res) / (4.0 * math.pi * a) ** 2,
                "min_relative_margin": min(r.relative_margin for r in res),
            },
            1e-6,
            all(r.passed for r in res),
        )
    rep.add(
        "iso.equality-detector",
        "equality only for caps on S_a",
        {"seed": seed, "config": ic},
        {"n_checked": total, "misclassified": wrong_equality},
        1e-8,
        total >= 800 and not wrong_equality,
    )
    return rep


def _fem_mu(W, V, h, tol=1e-10):
    return smallest_eigenvalue(assemble(mesh_region(W, V, h)), tol).value


def run_faber_krahn_suite(seed: int, config: dict | None = None) -> Report:
    cfg = config or load_config()
    fc = cfg["faber_krahn"]
    rep = Report("faber-krahn", seed, config_version=cfg["config_version"])
    h = fc["h"]
    slack = fc["slack_factor"] * h * h
    anchor = "mixed eigenvalue mu(V) >= lambda of the equal-area cap on S_1"
    for shape in fc["shapes"]:
        W = polygon_from_config(cfg["polygons"][shape["W"]])
        a = _w_a(W)
        rows = []
        ok = True
        for frac in fc["area_fractions"]:
            A = frac * _w_area(W)
            V = region_with_area(W, shape, A)
            mu = dn_eigenvalue(W, V, h, tol=1e-10)
            # the double of V has area 2A; compare with the cap of that area on S_a
            b = cap_with_area(a, 2.0 * A).b
            lam = cap_eigenvalue(b).value
            good = mu.value >= lam - slack
            if shape.get("equality"):
                good = good and abs(mu.value - lam) <= slack
            ok = ok and good
            rows.append({"area": A, "b": b, "mu": mu.value, "mu_error_estimate": mu.error_estimate, "lambda_cap": lam, "gap": mu.value - lam})
        values = {"a": a, "rows": rows, "slack": slack}
        if not isinstance(W, Lune):
            values["delta"] = delta_of_polygon(W)
        rep.add(
            f"fk.{shape['name']}",
            anchor + (" (equality for lunes)" if shape.get("equality") else ""),
            {"shape": shape, "W": cfg["polygons"][shape["W"]], "h": h, "fractions": fc["area_fractions"]},
            values,
            slack,
            ok,
        )

    cc = fc["convergence"]
    W = polygon_from_config(cfg["polygons"][cc["W"]])
    mus = [_fem_mu(W, cc["V"], hh) for hh in cc["h"]]
    errs = [abs(m - cc["exact"]) for m in mus]
    orders = [math.log(errs[i] / errs[i + 1]) / math.log(cc["h"][i] / cc["h"][i + 1]) for i in range(len(errs) - 1)]
    rep.add(
        "fk.convergence",
        "mesh convergence of the mixed eigenvalue (order 2)",
        cc,
        {"mu": mus, "errors": errs, "orders": orders},
        0.5,
        all(1.5 <= o <= 2.5 for o in orders[-1:]),
    )

    fh = cfg["friedland_hayman"]
    for part in fh["partitions"]:
        W = polygon_from_config(cfg["polygons"][part["W"]])
        V1 = dict(part["V"])
        V2 = dict(part["V"], complement=True)
        m1 = dn_eigenvalue(W, V1, fh["h"], tol=1e-10)
        m2 = dn_eigenvalue(W, V2, fh["h"], tol=1e-10)
        s = char_exponent(m1.value).alpha + char_exponent(m2.value).alpha
        ok = s >= 2.0 - fh["tol"]
        band = fc["slack_factor"] * fh["h"] ** 2
        if part.get("equality"):
            ok = ok and abs(s - 2.0) <= band
        rep.add(
            f"fh.{part['name']}",
            "alpha(V) + alpha(W minus V) >= 2" + (" (equality for the lune halves)" if part.get("equality") else ""),
            {"partition": part, "W": cfg["polygons"][part["W"]], "h": fh["h"]},
            {"mu_V": m1.value, "mu_complement": m2.value, "alpha_sum": s},
            fh["tol"],
            ok,
        )

    bc = fc["bkp"]
    bs = np.linspace(bc["b_min"], bc["b_max"], bc["n"])
    sums = np.array([bkp_sum(float(b)) for b in bs])
    near = [float(b) for b, s in zip(bs, sums) if abs(s - 2.0) <= bc["equality_tol"] and b != 0.0]
    at_zero = bkp_sum(0.0)
    rep.add(
        "fk.bkp",
        "alpha(U_{1,b}) + alpha(U_{1,-b}) >= 2",
        bc,
        {"min_sum": float(sums.min()), "argmin_b": float(bs[int(np.argmin(sums))]), "near_equality_nonzero_b": near, "sum_at_zero": at_zero},
        bc["lower_tol"],
        bool(np.all(sums >= 2.0 - bc["lower_tol"])) and not near and abs(at_zero - 2.0) <= bc["equality_tol"],
    )
    return rep


def run_lemma_suite(seed: int, config: dict | None = None) -> Report:
    cfg = config or load_config()
    lc = cfg["lemma"]
    rep = Report("lemma", seed, config_version=cfg["config_version"])
    rng = np.random.default_rng(seed)

    sc = lc["smoothing"]
    cal = lc["calibration"]
    c_hat = calibrate_budget_constant(cal["a_grid"], cal["eps_grid"], cal["safety"])
    rep.add(
        "lemma.budget-constant",
        "calibrated tip-budget constant C",
        cal,
        c_hat,
        0.0,
        None,
    )
    for a in sc["a_grid"]:
        for eps in sc["eps_grid"]:
            s = smooth_tip(a, eps)
            signs = sign_conditions(s, sc["sign_grid"])
            k_eps = float(smoothed_curvature(s, eps))
            gb = total_curvature_smoothed(a, eps)
            mass = tip_curvature_mass(s)
            mass_bound = 2.0 * math.pi * (1.0 - a) + c_hat["tip_mass"] * eps
            ok = (
                max(s.matching_residuals) <= sc["residual_tol"]
                and s.b1 > 0.0 > s.b2
                and abs(k_eps - 1.0) <= sc["curvature_tol"]
                and signs.ok
                and abs(gb - 4.0 * math.pi) <= sc["gauss_bonnet_rel_tol"] * 4.0 * math.pi
                and mass <= mass_bound
            )
            rep.add(
                f"lemma.smoothing.a={a:g}.eps={eps:g}",
                "quartic tip smoothing: C^2 match, signs, K(eps) = 1, monotone K, total curvature 4 pi",
                {"a": a, "eps": eps, "grid": sc},
                {
                    "b": [s.b0, s.b1, s.b2],
                    "max_residual": max(s.matching_residuals),
                    "K_eps": k_eps,
                    "sign_violation": signs.first_violation,
                    "total_curvature": gb,
                    "tip_mass": mass,
                    "tip_mass_bound": mass_bound,
                },
                sc["residual_tol"],
                ok,
            )

    sl = lc["sum_lemma"]
    n_ok = 0
    for _ in range(sl["n"]):
        a = rng.uniform(0.05, 0.999)
        m = int(rng.integers(2, sl["max_parts"] + 1))
        total = 4.0 * math.pi * a
        A = rng.uniform(1e-3, 1.2, m) * total
        base = np.sqrt(np.maximum(A * (total - A), 0.0))
        L = np.maximum(base * (1.0 + rng.exponential(0.1, m) * rng.integers(0, 2, m)), 1e-3)
        n_ok += lemma_sum_check(L, A, a)
    rep.add(
        "lemma.sum",
        "sum of parts satisfying the profile bound satisfies it strictly",
        {"seed": seed, **sl},
        {"n": sl["n"], "n_strict": n_ok},
        0.0,
        n_ok == sl["n"],
    )

    dc = lc["dichotomy"]
    worst_identity = 0.0
    worst_max = math.inf
    for _ in range(dc["n"]):
        n = int(rng.integers(dc["min_vertices"], dc["max_vertices"] + 1))
        P = random_convex_polygon(rng, n, rng.uniform(0.3, 1.4))
        th = interior_angles(P)
        a = polygon_area(P) / (2.0 * math.pi)
        for shift in range(n):
            order = np.roll(th, shift)
            for m in range(n + 1):
                r = gen_p_dichotomy(order, m, a)
                worst_identity = max(worst_identity, abs(r.q1 + r.q2 - 2.0 * a))
                worst_max = min(worst_max, max(r.q1, r.q2) - a)
    rep.add(
        "lemma.dichotomy",
        "split angle sums: q1 + q2 = 2a, max(q1, q2) >= a",
        {"seed": seed, **dc},
        {"max_identity_error": worst_identity, "min_max_minus_a": worst_max},
        dc["tol"],
        worst_identity <= dc["tol"] and worst_max >= -dc["tol"],
    )

    ci = lc["cap_identity"]
    worst = 0.0
    for _ in range(ci["n"]):
        a = rng.uniform(0.01, 1.0)
        b = rng.uniform(-0.5 * math.pi, 0.5 * math.pi)
        c = Cap(a, b)
        A = cap_area(c)
        worst = max(worst, abs(cap_perimeter(c) ** 2 - A * (4.0 * math.pi * a - A)) / (4.0 * math.pi * a) ** 2)
    rep.add("lemma.cap-identity", "caps satisfy L^2 = A(4 pi a - A)", {"seed": seed, **ci}, {"max_scaled_error": worst}, ci["tol"], worst <= ci["tol"])

    pi_ = lc["profile_identity"]
    res = {}
    for a in pi_["a_grid"]:
        t = np.linspace(0.0, 4.0 * math.pi * a, pi_["n"] + 2)[1:-1]
        res[f"{a:g}"] = profile_ode_identity(a, t)
    rep.add(
        "lemma.profile-identity",
        "cap profile satisfies L L' = 2 pi a - t",
        pi_,
        {"max_residual": res},
        pi_["tol"],
        max(res.values()) <= pi_["tol"],
    )

    sr = lc["sphere_reduction"]
    u = np.linspace(-0.5 * math.pi, 0.5 * math.pi, sr["n"])
    g_err = max(abs(profile_g(1.0, float(x)) - math.sin(x)) for x in u)
    area_err = abs(total_area(1.0) - 4.0 * math.pi)
    rep.add(
        "lemma.sphere-reduction",
        "S_1 is the round sphere",
        sr,
        {"max_profile_error": g_err, "area_error": area_err},
        sr["tol"],
        g_err <= sr["tol"] and area_err <= 1e-10,
    )
    return rep


SUITES = {
    "iso": run_theorem_iso_suite,
    "faber-krahn": run_faber_krahn_suite,
    "lemma": run_lemma_suite,
}


def run_all(seed: int, config: dict | None = None) -> Report:
    cfg = config or load_config()
    rep = Report("all", seed, config_version=cfg["config_version"])
    for name in sorted(SUITES):
        try:
            rep.extend(SUITES[name](seed, cfg))
        except SpindleKitError as exc:  # recorded, not raised
            rep.add(f"{name}.error", "suite execution", {"suite": name}, {"error": repr(exc)}, 0.0, False)
    return rep
