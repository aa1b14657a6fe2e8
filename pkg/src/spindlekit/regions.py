"""Regions on the unit sphere cut out by finitely many circles.

A region is the intersection of constraints ``n . x >= t``: ``t = 0`` is a
great-circle half-space, ``t != 0`` a spherical cap of angular radius
``arccos(t)`` around ``n``.  Boundary arcs carry the tag of the constraint
they lie on, which is how Dirichlet and Neumann parts are told apart.
Areas are exact, by Gauss-Bonnet over the boundary arcs.
"""
from __future__ import annotations

from dataclasses import dataclass, field
import math

import numpy as np

from .errors import BadRegionSpec
from .sphere_geom import Lune, SphericalPolygon, unit_vec

__all__ = [
    "Constraint",
    "Arc",
    "Region",
    "region_from_W",
    "build_region",
    "parse_polygon",
]

TWO_PI = 2.0 * math.pi
ON_TOL = 1e-9


@dataclass(frozen=True)
class Constraint:
    normal: np.ndarray
    offset: float = 0.0
    tag: str = "neumann"
    name: str = ""

    def __post_init__(self):
        n = np.asarray(self.normal, dtype=float)
        n = n / np.linalg.norm(n)
        object.__setattr__(self, "normal", n)
        if not (-1.0 < self.offset < 1.0):
            raise BadRegionSpec(f"constraint offset {self.offset} must lie in (-1, 1)")
        if self.tag not in ("neumann", "dirichlet"):
            raise BadRegionSpec(f"unknown boundary tag {self.tag!r}")

    @property
    def radius(self) -> float:
        """Angular radius of the circle ``n . x = t``."""
        return math.acos(self.offset)

    @property
    def ring_radius(self) -> float:
        return math.sqrt(1.0 - self.offset**2)

    @property
    def geodesic_curvature(self) -> float:
        return self.offset / self.ring_radius

    def frame(self) -> tuple[np.ndarray, np.ndarray]:
        n = self.normal
        helper = np.array([1.0, 0.0, 0.0]) if abs(n[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
        e1 = np.cross(helper, n)
        e1 /= np.linalg.norm(e1)
        e2 = np.cross(n, e1)
        return e1, e2

    def point(self, phi) -> np.ndarray:
        e1, e2 = self.frame()
        phi = np.asarray(phi, dtype=float)
        return (
            self.offset * self.normal
            + self.ring_radius * (np.multiply.outer(np.cos(phi), e1) + np.multiply.outer(np.sin(phi), e2))
        )

    def tangent(self, phi) -> np.ndarray:
        e1, e2 = self.frame()
        return -np.sin(phi) * e1 + np.cos(phi) * e2

    def flipped(self) -> "Constraint":
        return Constraint(-self.normal, -self.offset, self.tag, self.name)

    def margin(self, x) -> np.ndarray:
        return np.asarray(x) @ self.normal - self.offset

    def same_circle(self, other: "Constraint") -> bool:
        return bool(np.allclose(self.normal, other.normal, atol=1e-12) and abs(self.offset - other.offset) < 1e-12)


@dataclass(frozen=True)
class Arc:
    """Counterclockwise arc ``phi0 -> phi1`` of constraint ``index``; interior on the left."""

    index: int
    phi0: float
    phi1: float
    full: bool = False


def _interval_on_circle(c: Constraint, d: Constraint):
    """Parameter set on circle ``c`` where constraint ``d`` holds, as a list of intervals."""
    e1, e2 = c.frame()
    A = c.offset * float(c.normal @ d.normal)
    B = c.ring_radius * float(e1 @ d.normal)
    C = c.ring_radius * float(e2 @ d.normal)
    R = math.hypot(B, C)
    if R < 1e-14:
        return [(0.0, TWO_PI)] if A >= d.offset - 1e-14 else []
    kappa = (d.offset - A) / R
    if kappa <= -1.0:
        return [(0.0, TWO_PI)]
    if kappa >= 1.0:
        return []
    psi = math.atan2(C, B)
    half = math.acos(kappa)
    lo = (psi - half) % TWO_PI
    hi = lo + 2.0 * half
    if hi <= TWO_PI:
        return [(lo, hi)]
    return [(lo, TWO_PI), (0.0, hi - TWO_PI)]


def _intersect(a, b):
    out = []
    for s0, e0 in a:
        for s1, e1 in b:
            s, e = max(s0, s1), min(e0, e1)
            if e > s + 1e-14:
                out.append((s, e))
    return sorted(out)


@dataclass
class Region:
    constraints: list
    label: str = ""
    _arcs: list | None = field(default=None, repr=False)

    def __post_init__(self):
        uniq = []
        for c in self.constraints:
            if not any(c.same_circle(u) for u in uniq):
                uniq.append(c)
        self.constraints = uniq
        if not uniq:
            raise BadRegionSpec("a region needs at least one constraint")

    def contains(self, x, tol: float = 0.0) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        ok = np.ones(x.shape[:-1], dtype=bool)
        for c in self.constraints:
            ok &= c.margin(x) >= -tol
        return ok

    def arcs(self) -> list:
        if self._arcs is not None:
            return self._arcs
        arcs = []
        for i, c in enumerate(self.constraints):
            ivals = [(0.0, TWO_PI)]
            for j, d in enumerate(self.constraints):
                if j != i:
                    ivals = _intersect(ivals, _interval_on_circle(c, d))
            if not ivals:
                continue
            if len(ivals) == 1 and ivals[0][0] <= 1e-14 and ivals[0][1] >= TWO_PI - 1e-14:
                arcs.append(Arc(i, 0.0, TWO_PI, full=True))
                continue
            # merge the piece ending at 2*pi with the one starting at 0
            if len(ivals) > 1 and ivals[0][0] <= 1e-14 and ivals[-1][1] >= TWO_PI - 1e-14:
                first = ivals.pop(0)
                last = ivals.pop()
                ivals.append((last[0], first[1] + TWO_PI))
            for s, e in ivals:
                arcs.append(Arc(i, s, e))
        if not arcs:
            raise BadRegionSpec("region is empty or has no boundary")
        self._arcs = arcs
        return arcs

    def arc_length(self, arc: Arc) -> float:
        return self.constraints[arc.index].ring_radius * (arc.phi1 - arc.phi0)

    def boundary_length(self, tag: str | None = None) -> float:
        return sum(
            self.arc_length(a)
            for a in self.arcs()
            if tag is None or self.constraints[a.index].tag == tag
        )

    def _loops(self):
        arcs = self.arcs()
        open_arcs = [k for k, a in enumerate(arcs) if not a.full]
        n_loops = sum(1 for a in arcs if a.full)
        corners = []
        starts = {k: self.constraints[arcs[k].index].point(arcs[k].phi0) for k in open_arcs}
        seen = set()
        for k in open_arcs:
            if k in seen:
                continue
            n_loops += 1
            cur = k
            while cur not in seen:
                seen.add(cur)
                a = arcs[cur]
                end = self.constraints[a.index].point(a.phi1)
                nxt = min(open_arcs, key=lambda m: np.linalg.norm(starts[m] - end))
                if np.linalg.norm(starts[nxt] - end) > 1e-7:
                    raise BadRegionSpec("boundary arcs do not close up")
                corners.append((cur, nxt, end))
                cur = nxt
        return n_loops, corners

    def euler_characteristic(self) -> int:
        n_loops, _ = self._loops()
        return 2 - n_loops

    def corner_angles(self) -> list:
        """Interior angles at the corners between consecutive boundary arcs."""
        arcs = self.arcs()
        _, corners = self._loops()
        out = []
        for i, j, x in corners:
            ai, aj = arcs[i], arcs[j]
            t_in = self.constraints[ai.index].tangent(ai.phi1)
            t_out = self.constraints[aj.index].tangent(aj.phi0)
            turn = math.atan2(float(x @ np.cross(t_in, t_out)), float(t_in @ t_out))
            out.append((x, math.pi - turn))
        return out

    def area(self) -> float:
        """Area by Gauss-Bonnet: ``2 pi chi - sum(k_g * len) - sum(turning angles)``."""
        chi = self.euler_characteristic()
        curv = sum(self.constraints[a.index].geodesic_curvature * self.arc_length(a) for a in self.arcs())
        turning = sum(math.pi - ang for _, ang in self.corner_angles())
        return 2.0 * math.pi * chi - curv - turning

    def sample_boundary(self, spacing: float):
        """Points along every arc at spacing at most ``spacing``.

        Returns ``(points, arc_id, chains)`` where ``chains`` lists, per arc,
        the indices of its points in order (so consecutive entries are
        boundary edges).  Corner points are shared between arcs.
        """
        pts: list = []
        chains = []
        arc_ids: list = []

        def index_of(x, arc_k):
            for m, p in enumerate(pts):
                if np.linalg.norm(p - x) < 1e-9:
                    return m
            pts.append(x)
            arc_ids.append(arc_k)
            return len(pts) - 1

        for k, a in enumerate(self.arcs()):
            c = self.constraints[a.index]
            length = self.arc_length(a)
            n_seg = max(3 if a.full else 1, int(math.ceil(length / spacing - 1e-9)))
            phis = np.linspace(a.phi0, a.phi1, n_seg + 1)
            xs = c.point(phis)
            chain = []
            for m, x in enumerate(xs):
                if a.full and m == n_seg:
                    chain.append(chain[0])
                    continue
                if m == 0 or m == n_seg:
                    chain.append(index_of(x, k))
                else:
                    pts.append(x)
                    arc_ids.append(k)
                    chain.append(len(pts) - 1)
            chains.append(chain)
        return np.array(pts), np.array(arc_ids), chains


def parse_polygon(obj):
    """Polygon or lune from its JSON form."""
    if isinstance(obj, (SphericalPolygon, Lune)):
        return obj
    if "lune" in obj:
        return Lune(float(obj["lune"]["a"]))
    if "vertices" in obj:
        return SphericalPolygon(np.asarray(obj["vertices"], dtype=float))
    raise BadRegionSpec("polygon JSON needs 'vertices' or 'lune'")


def region_from_W(W, tag: str = "neumann") -> list:
    return [Constraint(n, 0.0, tag, f"W.{i}") for i, n in enumerate(W.edge_normals())]


def _v_constraints(W, spec: dict) -> list:
    kind = spec.get("kind")
    if kind == "latitude-cap":
        if "tip" in spec:
            tip = unit_vec(spec["tip"])
        elif isinstance(W, Lune):
            tip = W.tip
        else:
            tip = W.vertices[int(spec.get("vertex", 0))]
        return [Constraint(tip, math.sin(float(spec["b"])), "dirichlet", "V.0")]
    if kind == "geodesic-disc":
        return [Constraint(unit_vec(spec["center"]), math.cos(float(spec["radius"])), "dirichlet", "V.0")]
    if kind == "halfspace":
        return [Constraint(spec["normal"], float(spec.get("offset", 0.0)), "dirichlet", "V.0")]
    if kind == "polyline":
        p = unit_vec(spec["points"])
        out = []
        for i in range(len(p) - 1):
            out.append(Constraint(np.cross(p[i], p[i + 1]), 0.0, "dirichlet", f"V.{i}"))
        return out
    raise BadRegionSpec(f"unknown V kind {kind!r}")


def build_region(W, V: dict | None = None, dirichlet=None, neumann=None) -> Region:
    """Region ``V`` inside ``W``: ``W`` edges are Neumann, the cut is Dirichlet.

    ``V["complement"] = True`` gives ``W \\ V`` for single-constraint cuts.
    ``dirichlet`` / ``neumann`` override tags by constraint name.
    """
    W = parse_polygon(W)
    cons = region_from_W(W)
    if V is not None:
        vc = _v_constraints(W, V)
        if V.get("complement"):
            if len(vc) != 1:
                raise BadRegionSpec("complement is only defined for single-curve cuts")
            vc = [vc[0].flipped()]
        cons += vc
    for names, tag in ((dirichlet, "dirichlet"), (neumann, "neumann")):
        for nm in names or ():
            hits = [k for k, c in enumerate(cons) if c.name == nm]
            if not hits:
                raise BadRegionSpec(f"no boundary curve named {nm!r}")
            for k in hits:
                c = cons[k]
                cons[k] = Constraint(c.normal, c.offset, tag, c.name)
    if V is not None and V.get("kind") == "geodesic-disc" and not V.get("clip", False):
        disc = _v_constraints(W, V)[0]
        ring = disc.point(np.linspace(0.0, TWO_PI, 721))
        if not np.all(W.contains(ring, tol=1e-12)):
            raise BadRegionSpec("V is not contained in W (pass clip=true to intersect)")
    region = Region(cons, label=V.get("kind", "") if V else "W")
    try:
        region.arcs()
    except BadRegionSpec as exc:
        raise BadRegionSpec(f"V is not contained in W: {exc}") from None
    return region
