"""Slice Cauchy domains, their boundaries in the upper half-plane, and quadrature.

Every domain is axially symmetric, so its trace on a slice C_I is symmetric
about the real axis.  Only the part of the boundary in the closed upper
half-plane is stored.  The lower part is the mirror image traversed
backwards: a node ``z`` with tangent weight ``dz`` has the partner
``conj(z)`` with weight ``-conj(dz)``.

Boundary pieces are grouped into loops.  A loop is closed once joined with
its mirror image (a semicircle on the real axis, a rectangle's three upper
sides) or closed on its own (a circle strictly above the axis).
Orientation is not trusted to bookkeeping.  Every loop is probed with the
winding-number sum at a reference point and reversed if the sign is wrong.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
import math

import numpy as np

from .errors import ConstructionError
from .quat import UNIT_I, Quaternion, embed_complex, sphere_of
from .regions import Annulus, Disk, Exterior, Rect, Region, Tube, gap

DEFAULT_NODES = 256
MIN_NODES = 16
PANEL_ORDER = 16
ORIENTATION_TOL = 1e-6


def _gauss_panels(n, min_panels=1):
    """Composite Gauss-Legendre nodes and weights on ``[0, 1]`` with about ``n`` nodes."""
    panels = max(1, min_panels, n // PANEL_ORDER)
    x, w = np.polynomial.legendre.leggauss(PANEL_ORDER)
    x = 0.5 * (x + 1.0)
    w = 0.5 * w
    edges = np.linspace(0.0, 1.0, panels + 1)
    h = np.diff(edges)
    t = (edges[:-1, None] + h[:, None] * x[None, :]).ravel()
    wt = (h[:, None] * w[None, :]).ravel()
    return t, wt


@dataclass(frozen=True)
class Curve:
    """A boundary piece in the closed upper half-plane, as a complex path.

    ``kind`` is ``circle`` (closed, periodic), ``arc`` (a piece of the circle
    ``center + radius e^{i theta}``, ``theta`` from ``theta0`` to ``theta1``)
    or ``segment`` (``start`` to ``end``).  ``sign = -1`` reverses the
    traversal.
    """

    kind: str
    center: complex = 0j
    radius: float = 0.0
    theta0: float = 0.0
    theta1: float = 0.0
    start: complex = 0j
    end: complex = 0j
    sign: int = 1

    def point(self, t):
        t = np.asarray(t, float)
        if self.sign < 0:
            t = 1.0 - t
        if self.kind == "segment":
            return self.start + (self.end - self.start) * t
        th = self.theta0 + (self.theta1 - self.theta0) * t
        return self.center + self.radius * np.exp(1j * th)

    def derivative(self, t):
        t = np.asarray(t, float)
        tt = 1.0 - t if self.sign < 0 else t
        if self.kind == "segment":
            d = (self.end - self.start) * np.ones_like(tt)
        else:
            dth = self.theta1 - self.theta0
            d = 1j * dth * self.radius * np.exp(1j * (self.theta0 + dth * tt))
        return self.sign * d

    @property
    def closed(self):
        return self.kind == "circle"

    def _is_half_circle(self):
        return (
            self.kind == "arc"
            and self.center.imag == 0.0
            and {self.theta0, self.theta1} == {0.0, math.pi}
        )

    def rule(self, n):
        """Nodes ``z`` and oriented tangent weights ``dz`` for ``n`` nodes.

        Circles get the periodic trapezoid rule.  Half-circles resting on the
        real axis get the trapezoid rule with halved end weights, which
        together with the mirror image is the periodic rule on the full
        circle.  Everything else gets composite Gauss-Legendre.
        """
        if self.kind == "circle":
            t = np.arange(n) / n
            return self.point(t), self.derivative(t) / n
        if self._is_half_circle():
            t = np.arange(n + 1) / n
            w = np.full(n + 1, 1.0 / n)
            w[[0, -1]] *= 0.5
            return self.point(t), self.derivative(t) * w
        t, w = _gauss_panels(n, self._min_panels())
        return self.point(t), self.derivative(t) * w

    def _min_panels(self):
        # a horizontal segment at height h sees real-axis singularities at
        # distance h; panels no wider than 2h keep Gauss-Legendre accurate
        if self.kind == "segment" and self.start.imag == self.end.imag > 0:
            return math.ceil(abs(self.end - self.start) / (2.0 * self.start.imag))
        return 1

    def reversed(self):
        return replace(self, sign=-self.sign)

    def describe(self):
        d = {"kind": self.kind, "orientation": self.sign}
        if self.kind == "segment":
            d["start"] = [self.start.real, self.start.imag]
            d["end"] = [self.end.real, self.end.imag]
        else:
            d["center"] = [self.center.real, self.center.imag]
            d["radius"] = self.radius
            if self.kind == "arc":
                d["theta"] = [self.theta0, self.theta1]
        return d


@dataclass(frozen=True)
class Loop:
    """Curves forming one boundary cycle (with their mirror images if open).

    ``winding`` is the required winding number around ``ref``.
    """

    curves: tuple
    ref: complex
    winding: int

    def rule(self, n):
        parts = [c.rule(n) for c in self.curves]
        return np.concatenate([p[0] for p in parts]), np.concatenate([p[1] for p in parts])

    def reversed(self):
        return Loop(tuple(c.reversed() for c in self.curves), self.ref, self.winding)


def _reflect(z, dz):
    return np.concatenate([z, np.conj(z)]), np.concatenate([dz, -np.conj(dz)])


def winding_number(z, dz, p):
    """``(1 / 2 pi i) sum dz / (z - p)`` for a full (reflected) rule."""
    return complex(np.sum(dz / (z - p)) / (2j * math.pi))


def _loops_for(region):
    if isinstance(region, Disk):
        return [_disk_loop(region.c0, region.c1, region.r, +1)]
    if isinstance(region, Annulus):
        return [
            _disk_loop(region.c0, region.c1, region.r_out, +1),
            _disk_loop(region.c0, region.c1, region.r_in, -1),
        ]
    if isinstance(region, Rect):
        a, b, h = region.x0_min, region.x0_max, region.x1_max
        curves = (
            Curve("segment", start=complex(b, 0.0), end=complex(b, h)),
            Curve("segment", start=complex(b, h), end=complex(a, h)),
            Curve("segment", start=complex(a, h), end=complex(a, 0.0)),
        )
        return [Loop(curves, complex(0.5 * (a + b), 0.0), 1)]
    if isinstance(region, Tube):
        h, R = region.height, region.radius
        xr = math.sqrt(R * R - h * h)
        th = math.asin(h / R)
        curves = (
            Curve("segment", start=complex(-xr, h), end=complex(xr, h)),
            Curve("arc", center=0j, radius=R, theta0=th, theta1=math.pi - th),
        )
        return [Loop(curves, complex(0.0, 0.5 * (h + R)), -1)]
    if isinstance(region, Exterior):
        return [_disk_loop(c0, c1, r, -1) for c0, c1, r in region.holes]
    raise ConstructionError(f"no boundary construction for {type(region).__name__}")


def _disk_loop(c0, c1, r, winding):
    if c1 == 0.0:
        curve = Curve("arc", center=complex(c0, 0.0), radius=r, theta0=0.0, theta1=math.pi)
    else:
        curve = Curve("circle", center=complex(c0, c1), radius=r, theta0=0.0, theta1=2 * math.pi)
    return Loop((curve,), complex(c0, c1), winding)


def _orient(loop, n=64):
    z, dz = _reflect(*loop.rule(n))
    w = winding_number(z, dz, loop.ref).real
    if abs(w - loop.winding) < 1e-3:
        return loop
    if abs(w + loop.winding) < 1e-3:
        return loop.reversed()
    raise ConstructionError(f"boundary loop has winding {w:.4g} around its reference point")


@dataclass(frozen=True)
class DomainComponent:
    region: Region
    loops: tuple


@dataclass(frozen=True)
class QuadratureRule:
    """Upper-half-plane nodes ``z`` and tangent weights ``dz`` on the slice C_unit.

    ``full()`` appends the mirror image.  As quaternions the nodes are
    ``embed(z)`` and the ``ds_I`` weights ``embed(-i dz)``.
    """

    z: np.ndarray
    dz: np.ndarray
    unit: object = UNIT_I
    lower: bool = False

    def full(self):
        if self.lower:
            return self
        z, dz = _reflect(self.z, self.dz)
        return QuadratureRule(z, dz, self.unit, True)

    @property
    def nodes(self):
        return embed_complex(self.z, self.unit)

    @property
    def weights(self):
        return embed_complex(-1j * self.dz, self.unit)

    def __len__(self):
        return len(self.z)


@dataclass(frozen=True)
class SliceCauchyDomain:
    """Disjoint axially symmetric components with oriented upper boundaries."""

    components: tuple
    truncation: float | None = None
    meta: dict = field(default_factory=dict, compare=False)

    @classmethod
    def from_regions(cls, regions, check=True):
        comps = []
        for r in regions:
            loops = tuple(_orient(lp) for lp in _loops_for(r))
            comps.append(DomainComponent(r, loops))
        trunc = None
        for r in regions:
            if isinstance(r, Tube):
                trunc = r.radius
        dom = cls(tuple(comps), trunc)
        if check:
            dom._check_disjoint()
        return dom

    @property
    def regions(self):
        return tuple(c.region for c in self.components)

    @property
    def bounded(self):
        return all(c.region.bounded for c in self.components)

    @property
    def unbounded(self):
        return not self.bounded

    def _check_disjoint(self):
        rs = self.regions
        for i in range(len(rs)):
            for j in range(i + 1, len(rs)):
                try:
                    g = gap(rs[i], rs[j])
                except TypeError:
                    g = None
                if g is not None:
                    if g <= 0:
                        raise ConstructionError(f"components {i} and {j} are not disjoint")
                    continue
                rng = np.random.default_rng(7)
                pts = rs[i].sample(256, rng, truncation=50.0)
                if np.any(rs[j].contains(pts[:, 0], pts[:, 1])):
                    raise ConstructionError(f"components {i} and {j} overlap")

    def component_of(self, x0, x1, tol=0.0):
        for k, r in enumerate(self.regions):
            if bool(r.contains(x0, x1, tol=tol)):
                return k
        return -1

    def contains(self, x, tol=0.0):
        sp = sphere_of(x) if not hasattr(x, "s1") else x
        return self.component_of(sp.s0, sp.s1, tol) >= 0

    def quadrature(self, unit=UNIT_I, nodes_per_curve=DEFAULT_NODES, components=None):
        if nodes_per_curve < MIN_NODES:
            raise ValueError(f"nodes_per_curve must be at least {MIN_NODES}")
        zs, dzs = [], []
        for k, comp in enumerate(self.components):
            if components is not None and k not in components:
                continue
            for lp in comp.loops:
                z, dz = lp.rule(nodes_per_curve)
                zs.append(z)
                dzs.append(dz)
        if not zs:
            return QuadratureRule(np.zeros(0, complex), np.zeros(0, complex), unit)
        return QuadratureRule(np.concatenate(zs), np.concatenate(dzs), unit)

    def probes(self):
        """One interior ``(x0, x1)`` point per component."""
        return [c.region.probe() for c in self.components]

    def orientation_check(self, unit=UNIT_I, nodes_per_curve=DEFAULT_NODES):
        """Cauchy reproduction of the constant 1 at each component probe.

        Returns the values ``[unbounded] + (1/2 pi) sum w_k (s_k - x_I)^{-1}``,
        which should all be 1.
        """
        rule = self.quadrature(unit, nodes_per_curve).full()
        extra = 0.0 if self.bounded else 1.0
        out = []
        for x0, x1 in self.probes():
            p = complex(x0, x1)
            out.append(extra + (np.sum(-1j * rule.dz / (rule.z - p)) / (2 * math.pi)).real)
        return out

    def describe(self):
        comps = []
        for c in self.components:
            comps.append(
                {
                    "region": c.region.to_dict(),
                    "loops": [
                        {"winding": lp.winding, "curves": [cv.describe() for cv in lp.curves]}
                        for lp in c.loops
                    ],
                }
            )
        d = {"bounded": self.bounded, "components": comps}
        if self.truncation is not None:
            d["truncation"] = self.truncation
        d.update(self.meta)
        return d


def quadrature(domain, unit=UNIT_I, nodes_per_curve=DEFAULT_NODES):
    return domain.quadrature(unit, nodes_per_curve)


def contains(domain, x, tol=0.0):
    return domain.contains(Quaternion.coerce(x), tol)


# ---------------------------------------------------------------------------
# enclosing a spectrum
# ---------------------------------------------------------------------------

def _points_shape(pts, rho):
    """Smallest convenient disk holding ``pts`` with margin ``rho``."""
    pts = np.asarray(pts, float)
    c0 = 0.5 * (pts[:, 0].min() + pts[:, 0].max())
    c1 = 0.5 * (pts[:, 1].min() + pts[:, 1].max())
    r = float(np.max(np.hypot(pts[:, 0] - c0, pts[:, 1] - c1))) + rho
    if c1 > r * (1 + 1e-9):
        return Disk(float(c0), float(c1), r)
    r = float(np.max(np.hypot(pts[:, 0] - c0, pts[:, 1]))) + rho
    return Disk(float(c0), 0.0, r)


def _min_separation(points, intervals):
    d = math.inf
    for i in range(len(points)):
        for j in range(i + 1, len(points)):
            d = min(d, math.hypot(points[i][0] - points[j][0], points[i][1] - points[j][1]))
        for a, b in intervals:
            x = min(max(points[i][0], a), b)
            d = min(d, math.hypot(points[i][0] - x, points[i][1]))
    for i in range(len(intervals)):
        for j in range(i + 1, len(intervals)):
            (a1, b1), (a2, b2) = intervals[i], intervals[j]
            d = min(d, max(a2 - b1, a1 - b2, 0.0))
    return d


def _point_gap(shape, p):
    """Distance from the point ``p`` to the closure of ``shape`` (negative inside)."""
    if isinstance(shape, Disk):
        return math.hypot(p[0] - shape.c0, p[1] - shape.c1) - shape.r
    if isinstance(shape, Rect):
        a, b, h = shape.bbox(0.0)
        dx = max(a - p[0], 0.0, p[0] - b)
        dy = max(abs(p[1]) - h, 0.0)
        d = math.hypot(dx, dy)
        return d if d > 0 else -1.0
    if isinstance(shape, Tube):
        return -1.0 if shape.contains(p[0], p[1]) else min(p[1] - shape.height, shape.radius - math.hypot(*p))
    raise TypeError(type(shape).__name__)


def enclose(spec, clearance, avoid=None, truncation=None):
    """Slice Cauchy domain around an S-spectrum.

    Each sphere is surrounded by a margin ``rho = min(clearance, 0.45 d)``
    where ``d`` is the smallest distance between distinct spectral pieces,
    so neighbouring components never touch.  Clusters whose disks would meet
    are merged.  Real intervals get rectangles.  An unbounded spectrum (or
    one containing infinity) gets a tube of height ``rho`` around the real
    axis joined with the outside of a ball of radius ``L``, with
    ``L = max(10, 5 max|Re|)`` unless ``truncation`` is given.

    ``avoid`` is a region (or a sequence of regions) that must stay outside
    the domain, e.g. small disks around the singularities of the function
    to be applied.
    """
    if clearance <= 0:
        raise ConstructionError("clearance must be positive")
    if spec.is_empty:
        raise ConstructionError("nothing to enclose: the spectrum is empty")
    points = [(s.s0, s.s1) for s in spec.spheres]
    intervals = list(spec.intervals)
    unbounded = spec.includes_infinity or spec.unbounded_along_real_axis
    finite_iv = [(a, b) for a, b in intervals if math.isfinite(a) and math.isfinite(b)]

    if avoid is None:
        avoid = ()
    elif isinstance(avoid, Region):
        avoid = (avoid,)
    for av in avoid:
        for p in points:
            if bool(av.contains(p[0], p[1], tol=2 * clearance)):
                raise ConstructionError(f"sphere {p} is within 2*clearance of the avoided region")
        for a, b in finite_iv:
            for x in np.linspace(a, b, 33):
                if bool(av.contains(x, 0.0, tol=2 * clearance)):
                    raise ConstructionError(f"interval ({a}, {b}) is within 2*clearance of the avoided region")

    d_sep = _min_separation(points, finite_iv)
    rho = clearance if not math.isfinite(d_sep) else min(clearance, 0.45 * d_sep)
    if rho <= 0:
        raise ConstructionError("spectral pieces coincide")

    tube = None
    if unbounded:
        L = truncation if truncation is not None else max(10.0, 5.0 * spec.max_abs_real())
        L = max(L, max((math.hypot(*p) for p in points), default=0.0) + 4 * clearance)
        height = rho
        while True:
            near = [p for p in points if p[1] < height + 2 * rho]
            new_h = max([height] + [p[1] + rho for p in near])
            if new_h == height:
                break
            height = new_h
        tube = Tube(float(height), float(L))
        points = [p for p in points if not bool(tube.contains(p[0], p[1], tol=rho))]
        finite_iv = []

    # clusters: lists of point indices plus interval indices
    clusters = [([i], []) for i in range(len(points))] + [([], [j]) for j in range(len(finite_iv))]

    def shape_of(cl):
        pi, ii = cl
        if ii:
            xs = [points[i][0] for i in pi] + [v for j in ii for v in finite_iv[j]]
            hs = [points[i][1] for i in pi] + [0.0]
            return Rect(min(xs) - rho, max(xs) + rho, max(hs) + rho)
        return _points_shape([points[i] for i in pi], rho)

    while True:
        shapes = [shape_of(c) for c in clusters]
        merge = None
        for i in range(len(clusters)):
            for j in range(i + 1, len(clusters)):
                if gap(shapes[i], shapes[j]) <= 0:
                    merge = (i, j)
                    break
            if merge:
                break
            for k, p in enumerate(points):
                if k not in clusters[i][0] and _point_gap(shapes[i], p) < 0.5 * rho:
                    owner = next(m for m, c in enumerate(clusters) if k in c[0])
                    merge = (min(i, owner), max(i, owner))
                    break
            if merge:
                break
        if merge is None:
            break
        i, j = merge
        a, b = clusters[i], clusters[j]
        clusters[i] = (a[0] + b[0], a[1] + b[1])
        del clusters[j]

    regions = list(shapes)
    if tube is not None:
        for s in regions:
            if gap(tube, s) <= 0:
                raise ConstructionError("a spectral component meets the tube; increase clearance or truncation")
        regions.append(tube)

    for av in avoid:
        for s in regions:
            try:
                g = gap(s, av)
            except TypeError:
                continue
            if g <= 0:
                raise ConstructionError("the enclosing domain meets the avoided region")

    dom = SliceCauchyDomain.from_regions(regions, check=False)
    return replace(dom, meta={"clearance": clearance, "margin": rho})
