"""Axially symmetric regions described in the half-plane ``(x0, x1)``, ``x1 >= 0``.

A point ``x = x0 + I x1`` belongs to the region for every imaginary unit
``I`` at once, so a region is really a set of spheres.  Inside one slice
C_I it shows up as the half-plane picture together with its mirror image in
the real axis.  ``contains`` therefore always works with ``|x1|``.

Shapes whose mirror image would overlap them (a disk centred at height
``0 < c1 < r``) are rejected: their trace in C_I is not a disk.
"""

from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np

BOUNDARY_TOL = 1e-9


class Region:
    """Base class; subclasses are frozen dataclasses."""

    bounded = True

    def contains(self, x0, x1, tol=0.0):
        raise NotImplementedError

    def bbox(self, truncation):
        """``(x0_min, x0_max, x1_max)`` box holding the region (clipped at ``truncation``)."""
        raise NotImplementedError

    def probe(self):
        """A point well inside the region."""
        raise NotImplementedError

    def to_dict(self):
        raise NotImplementedError

    def sample(self, n, rng, truncation=20.0, margin=0.0):
        """``n`` points of the region drawn by rejection from its bounding box.

        ``margin`` keeps the points at least that far from the boundary as
        judged by ``contains(..., tol=-margin)``.
        """
        a, b, h = self.bbox(truncation)
        out = np.empty((0, 2))
        for _ in range(200):
            pts = np.column_stack([rng.uniform(a, b, 4 * n), rng.uniform(0.0, h, 4 * n)])
            keep = self.contains(pts[:, 0], pts[:, 1], tol=-margin)
            out = np.vstack([out, pts[keep]])
            if len(out) >= n:
                return out[:n]
        raise ValueError(f"could not sample {n} points from {self}")


def _h(x0, x1, c0, c1):
    return np.hypot(np.asarray(x0, float) - c0, np.abs(np.asarray(x1, float)) - c1)


@dataclass(frozen=True)
class Disk(Region):
    """Disk of radius ``r`` centred at ``(c0, c1)``; ``c1 == 0`` or ``c1 > r``."""

    c0: float
    c1: float
    r: float

    def __post_init__(self):
        if not self.r > 0:
            raise ValueError("disk radius must be positive")
        if self.c1 < 0 or (0 < self.c1 <= self.r):
            raise ValueError(
                f"disk centred at height {self.c1} with radius {self.r} is not axially representable"
            )

    def contains(self, x0, x1, tol=0.0):
        return _h(x0, x1, self.c0, self.c1) < self.r + tol

    def bbox(self, truncation):
        return (self.c0 - self.r, self.c0 + self.r, self.c1 + self.r)

    def probe(self):
        return (self.c0, self.c1)

    def to_dict(self):
        return {"type": "disk", "center": [self.c0, self.c1], "radius": self.r}


@dataclass(frozen=True)
class Annulus(Region):
    """Points at distance in ``(r_in, r_out)`` from ``(c0, c1)``; ``c1 == 0`` or ``c1 > r_out``."""

    c0: float
    c1: float
    r_in: float
    r_out: float

    def __post_init__(self):
        if not 0 < self.r_in < self.r_out:
            raise ValueError("annulus needs 0 < r_in < r_out")
        if self.c1 < 0 or (0 < self.c1 <= self.r_out):
            raise ValueError("annulus is not axially representable")

    def contains(self, x0, x1, tol=0.0):
        d = _h(x0, x1, self.c0, self.c1)
        return (d > self.r_in - tol) & (d < self.r_out + tol)

    def bbox(self, truncation):
        return (self.c0 - self.r_out, self.c0 + self.r_out, self.c1 + self.r_out)

    def probe(self):
        return (self.c0, self.c1 + 0.5 * (self.r_in + self.r_out))

    def to_dict(self):
        return {"type": "annulus", "center": [self.c0, self.c1], "inner": self.r_in, "outer": self.r_out}


@dataclass(frozen=True)
class Rect(Region):
    """``x0_min < x0 < x0_max`` and ``|x1| < x1_max``; straddles the real axis."""

    x0_min: float
    x0_max: float
    x1_max: float

    def __post_init__(self):
        if not (self.x0_min < self.x0_max and self.x1_max > 0):
            raise ValueError("degenerate rectangle")

    def contains(self, x0, x1, tol=0.0):
        x0 = np.asarray(x0, float)
        x1 = np.abs(np.asarray(x1, float))
        return (x0 > self.x0_min - tol) & (x0 < self.x0_max + tol) & (x1 < self.x1_max + tol)

    def bbox(self, truncation):
        return (self.x0_min, self.x0_max, self.x1_max)

    def probe(self):
        return (0.5 * (self.x0_min + self.x0_max), 0.0)

    def to_dict(self):
        return {"type": "rect", "x0": [self.x0_min, self.x0_max], "x1_max": self.x1_max}


@dataclass(frozen=True)
class Tube(Region):
    """Neighbourhood ``|x1| < height`` of the real axis joined with ``|x| > radius``.

    The outer part makes this a neighbourhood of infinity, so the boundary
    in the upper half-plane is the closed loop formed by the segment at
    height ``height`` and the arc of radius ``radius`` above it.
    """

    height: float
    radius: float
    bounded = False

    def __post_init__(self):
        if not 0 < self.height < self.radius:
            raise ValueError("tube needs 0 < height < radius")

    def contains(self, x0, x1, tol=0.0):
        x0 = np.asarray(x0, float)
        x1 = np.abs(np.asarray(x1, float))
        return (x1 < self.height + tol) | (np.hypot(x0, x1) > self.radius - tol)

    def bbox(self, truncation):
        return (-self.radius, self.radius, self.height)

    def probe(self):
        return (0.0, 0.0)

    def to_dict(self):
        return {"type": "tube", "height": self.height, "radius": self.radius}


@dataclass(frozen=True)
class Exterior(Region):
    """Everything outside finitely many ``holes`` ``(c0, c1, r)``; contains infinity.

    With no holes this is the whole space.
    """

    holes: tuple = ()
    bounded = False

    def __post_init__(self):
        holes = tuple((float(c0), float(c1), float(r)) for c0, c1, r in self.holes)
        for c0, c1, r in holes:
            Disk(c0, c1, r)
        object.__setattr__(self, "holes", holes)

    def contains(self, x0, x1, tol=0.0):
        out = np.ones(np.broadcast(np.asarray(x0), np.asarray(x1)).shape, dtype=bool)
        for c0, c1, r in self.holes:
            out &= _h(x0, x1, c0, c1) > r - tol
        return out

    def bbox(self, truncation):
        return (-truncation, truncation, truncation)

    def probe(self):
        far = 1.0 + max((abs(c0) + c1 + r for c0, c1, r in self.holes), default=0.0)
        return (2.0 * far, 0.0)

    def to_dict(self):
        return {"type": "exterior", "holes": [list(h) for h in self.holes]}


@dataclass(frozen=True)
class Intersection(Region):
    """Points lying in both regions."""

    a: Region
    b: Region

    @property
    def bounded(self):
        return self.a.bounded or self.b.bounded

    def contains(self, x0, x1, tol=0.0):
        return self.a.contains(x0, x1, tol) & self.b.contains(x0, x1, tol)

    def bbox(self, truncation):
        return (self.a if self.a.bounded or not self.b.bounded else self.b).bbox(truncation)

    def probe(self):
        for p in (self.a.probe(), self.b.probe()):
            if self.contains(*p):
                return p
        return tuple(self.sample(1, np.random.default_rng(0))[0])

    def to_dict(self):
        return {"type": "intersection", "a": self.a.to_dict(), "b": self.b.to_dict()}


def region_from_dict(d):
    kind = d.get("type")
    if kind == "disk":
        c = d.get("center", [0.0, 0.0])
        return Disk(float(c[0]), float(c[1]), float(d["radius"]))
    if kind == "annulus":
        c = d.get("center", [0.0, 0.0])
        return Annulus(float(c[0]), float(c[1]), float(d["inner"]), float(d["outer"]))
    if kind == "rect":
        x0 = d["x0"]
        return Rect(float(x0[0]), float(x0[1]), float(d["x1_max"]))
    if kind == "tube":
        return Tube(float(d["height"]), float(d["radius"]))
    if kind == "exterior":
        return Exterior(tuple(tuple(h) for h in d.get("holes", ())))
    if kind == "intersection":
        return Intersection(region_from_dict(d["a"]), region_from_dict(d["b"]))
    raise ValueError(f"unknown region type {kind!r}")


# ---------------------------------------------------------------------------
# separation between the shapes produced by contour construction
# ---------------------------------------------------------------------------

def _box_point_distance(box, p):
    a, b, h = box
    dx = max(a - p[0], 0.0, p[0] - b)
    dy = max(abs(p[1]) - h, 0.0)
    return math.hypot(dx, dy)


def gap(r1, r2):
    """Distance between the closures of two regions (negative or zero if they meet).

    Mirror images are taken into account.  Supported for disks, rectangles
    and tubes; other pairs raise ``TypeError``.
    """
    if isinstance(r2, Tube) and not isinstance(r1, Tube):
        r1, r2 = r2, r1
    if isinstance(r1, Tube):
        if isinstance(r2, Disk) and r2.c1 > 0:
            return min(r2.c1 - r2.r - r1.height, r1.radius - math.hypot(r2.c0, r2.c1) - r2.r)
        if isinstance(r2, (Tube, Disk, Rect)):
            return -1.0
    if isinstance(r1, Disk) and isinstance(r2, Disk):
        d = math.hypot(r1.c0 - r2.c0, r1.c1 - r2.c1)
        dm = math.hypot(r1.c0 - r2.c0, r1.c1 + r2.c1)
        return min(d, dm) - r1.r - r2.r
    if isinstance(r1, Rect) and isinstance(r2, Disk):
        r1, r2 = r2, r1
    if isinstance(r1, Disk) and isinstance(r2, Rect):
        box = r2.bbox(0.0)
        return _box_point_distance(box, (r1.c0, r1.c1)) - r1.r
    if isinstance(r1, Rect) and isinstance(r2, Rect):
        dx = max(r1.x0_min - r2.x0_max, r2.x0_min - r1.x0_max, 0.0)
        return dx if dx > 0 else -1.0
    raise TypeError(f"gap not supported between {type(r1).__name__} and {type(r2).__name__}")
