"""Slice hyperholomorphic functions represented by their stem functions.

A left slice function is ``f(x) = alpha(x0, x1) + I_x beta(x0, x1)`` and a
right one ``alpha + beta I_x``.  Stems are only ever evaluated for
``x1 >= 0``; the even/odd extension to ``x1 < 0`` is implicit.  A function may
consist of several components, each a region with its own pair of stems, which
is how locally constant functions and characteristic functions of spectral
sets are expressed.

Stem callables take two broadcastable real arrays ``(x0, x1)`` and return
either a real array (a real-valued stem) or a quaternion array with a
trailing axis of length 4.
"""

from __future__ import annotations

from dataclasses import dataclass
import enum
import math
from typing import Callable

import numpy as np
from scipy.stats import qmc

from .errors import DomainError, NotSplittableError, PreconditionError, SingularityError
from .quat import (
    Quaternion,
    UNIT_I,
    as_qarray,
    embed_complex,
    imaginary_unit_of,
    qabs,
    qabs2,
    qconj,
    qinv,
    qmul,
    qvec_norm,
    real_to_q,
)
from .regions import BOUNDARY_TOL, Disk, Exterior, Intersection, Region

INTRINSIC_TOL = 1e-10
INTRINSIC_SAMPLES = 200


class Chirality(str, enum.Enum):
    LEFT = "left"
    RIGHT = "right"
    INTRINSIC = "intrinsic"


@dataclass(frozen=True)
class StemComponent:
    region: Region
    alpha: Callable
    beta: Callable


def _lift(value, shape):
    """Broadcast a stem value (real or quaternion) to ``shape + (4,)``."""
    v = np.asarray(value, dtype=float)
    if v.shape != shape and v.shape[-1:] == (4,):
        return np.broadcast_to(v, shape + (4,))
    return np.broadcast_to(real_to_q(v), shape + (4,))


class SliceFunction:
    """Piecewise slice function with stems per component.

    Parameters
    ----------
    components : sequence of StemComponent
        Checked in order; the first region containing a point wins.
    chirality : Chirality
        Which side ``I_x`` multiplies ``beta`` on.  Intrinsic functions have
        real stems, so the side does not matter for them.
    value_at_infinity : quaternion-like, optional
        Required as soon as one region is unbounded.
    """

    def __init__(self, components, chirality=Chirality.LEFT, value_at_infinity=None, name="f"):
        self.components = tuple(components)
        if not self.components:
            raise ValueError("a slice function needs at least one component")
        self.chirality = Chirality(chirality)
        self.value_at_infinity = None if value_at_infinity is None else Quaternion.coerce(value_at_infinity)
        self.name = name
        if self.unbounded and self.value_at_infinity is None:
            raise PreconditionError(f"{name}: value_at_infinity is required on unbounded regions")

    @property
    def regions(self):
        return tuple(c.region for c in self.components)

    @property
    def unbounded(self):
        return any(not c.region.bounded for c in self.components)

    def with_chirality(self, chirality):
        return SliceFunction(self.components, chirality, self.value_at_infinity, self.name)

    # -- evaluation --------------------------------------------------------

    def component_index(self, x0, x1, tol=BOUNDARY_TOL):
        """Index of the first component containing each point, ``-1`` if none."""
        x0 = np.asarray(x0, float)
        x1 = np.abs(np.asarray(x1, float))
        idx = np.full(np.broadcast(x0, x1).shape, -1)
        for k in range(len(self.components) - 1, -1, -1):
            idx = np.where(self.components[k].region.contains(x0, x1, tol=tol), k, idx)
        return idx

    def stems(self, x0, x1, tol=BOUNDARY_TOL):
        """Quaternion arrays ``(alpha, beta)`` at the points ``(x0, |x1|)``."""
        x0, x1 = np.broadcast_arrays(np.asarray(x0, float), np.abs(np.asarray(x1, float)))
        shape = x0.shape
        idx = self.component_index(x0, x1, tol)
        if np.any(idx < 0):
            bad = np.argwhere(idx < 0)[0]
            raise DomainError(
                f"{self.name}: point ({x0[tuple(bad)]:.6g}, {x1[tuple(bad)]:.6g}) lies outside every region"
            )
        alpha = np.zeros(shape + (4,))
        beta = np.zeros(shape + (4,))
        for k, comp in enumerate(self.components):
            m = idx == k
            if not np.any(m):
                continue
            a = comp.alpha(x0[m], x1[m])
            b = comp.beta(x0[m], x1[m])
            alpha[m] = _lift(a, (int(m.sum()),))
            beta[m] = _lift(b, (int(m.sum()),))
        return alpha, beta

    def evaluate(self, x):
        """Evaluate on a quaternion array ``(..., 4)``."""
        x = as_qarray(x)
        x0 = x[..., 0]
        x1 = qvec_norm(x)
        alpha, beta = self.stems(x0, x1)
        ix = np.zeros(x.shape)
        ix[..., 1:] = imaginary_unit_of(x)
        if self.chirality is Chirality.RIGHT:
            return alpha + qmul(beta, ix)
        return alpha + qmul(ix, beta)

    def __call__(self, x):
        return Quaternion.from_array(self.evaluate(Quaternion.coerce(x).array))

    def on_slice(self, z, unit=UNIT_I):
        """Values at complex points ``z`` of the slice C_unit."""
        return self.evaluate(embed_complex(z, unit))

    def is_bilateral(self, samples=64, tol=INTRINSIC_TOL):
        """True if ``beta`` is real on samples, i.e. left and right evaluation agree."""
        pts = _sample_points(self, samples)
        _, beta = self.stems(pts[:, 0], pts[:, 1])
        return float(np.max(qvec_norm(beta), initial=0.0)) <= tol

    def __repr__(self):
        return f"SliceFunction({self.name!r}, {self.chirality.value}, {len(self.components)} component(s))"


# ---------------------------------------------------------------------------
# sampling helpers
# ---------------------------------------------------------------------------

def _sample_points(f, n, seed=0, truncation=10.0):
    """Quasi-random ``(x0, x1)`` points spread over all components of ``f``."""
    sampler = qmc.Halton(d=2, scramble=True, seed=seed)
    per = max(1, math.ceil(n / len(f.components)))
    out = []
    for comp in f.components:
        a, b, h = comp.region.bbox(truncation)
        got = np.empty((0, 2))
        for _ in range(200):
            u = sampler.random(8 * per)
            pts = np.column_stack([a + (b - a) * u[:, 0], h * u[:, 1]])
            keep = comp.region.contains(pts[:, 0], pts[:, 1], tol=-1e-6)
            got = np.vstack([got, pts[keep]])
            if len(got) >= per:
                break
        out.append(got[:per])
    pts = np.vstack(out)
    return pts[:n]


# ---------------------------------------------------------------------------
# kernels
# ---------------------------------------------------------------------------

def _kernel_quadratic(s, x):
    s = as_qarray(s)
    x = as_qarray(x)
    q = qmul(x, x) - 2.0 * s[..., 0:1] * x
    q = q + real_to_q(qabs2(s))
    return q


def cauchy_kernel_left(s, x, tol=1e-12):
    """``S_L^{-1}(s, x) = -(x^2 - 2 Re(s) x + |s|^2)^{-1} (x - conj(s))``."""
    scalar = isinstance(s, Quaternion) and isinstance(x, Quaternion)
    q = _kernel_quadratic(s, x)
    if np.any(qabs(q) < tol):
        raise SingularityError("x lies on the sphere of s")
    out = -qmul(qinv(q), as_qarray(x) - qconj(as_qarray(s)))
    return Quaternion.from_array(out) if scalar else out


def cauchy_kernel_right(s, x, tol=1e-12):
    """``S_R^{-1}(s, x) = -(x - conj(s)) (x^2 - 2 Re(s) x + |s|^2)^{-1}``."""
    scalar = isinstance(s, Quaternion) and isinstance(x, Quaternion)
    q = _kernel_quadratic(s, x)
    if np.any(qabs(q) < tol):
        raise SingularityError("x lies on the sphere of s")
    out = -qmul(as_qarray(x) - qconj(as_qarray(s)), qinv(q))
    return Quaternion.from_array(out) if scalar else out


# ---------------------------------------------------------------------------
# constructors
# ---------------------------------------------------------------------------

WHOLE_SPACE = Exterior(())


def from_complex(h, regions=(WHOLE_SPACE,), value_at_infinity=None, name="f"):
    """Intrinsic function whose restriction to every slice is the complex map ``h``.

    ``h`` must be real on the real axis (``h(conj z) = conj h(z)``); the stems
    are ``Re h(x0 + i x1)`` and ``Im h(x0 + i x1)``.
    """

    def alpha(x0, x1):
        return np.real(h(x0 + 1j * x1))

    def beta(x0, x1):
        return np.imag(h(x0 + 1j * x1))

    comps = [StemComponent(r, alpha, beta) for r in regions]
    return SliceFunction(comps, Chirality.INTRINSIC, value_at_infinity, name)


@dataclass(frozen=True)
class IntrinsicPolynomial:
    """``P(s) = a_0 + a_1 s + ... + a_m s^m`` with real coefficients."""

    coeffs: tuple

    def __post_init__(self):
        c = tuple(float(a) for a in self.coeffs)
        if not c:
            c = (0.0,)
        object.__setattr__(self, "coeffs", c)

    @property
    def degree(self):
        nz = [k for k, a in enumerate(self.coeffs) if a != 0.0]
        return nz[-1] if nz else 0

    def __call__(self, z):
        """Horner evaluation on complex numbers, arrays or Quaternions."""
        if isinstance(z, Quaternion):
            out = Quaternion(0.0)
            for a in reversed(self.coeffs):
                out = out * z + a
            return out
        out = np.zeros_like(np.asarray(z, dtype=complex))
        for a in reversed(self.coeffs):
            out = out * z + a
        return out

    def __mul__(self, other):
        return IntrinsicPolynomial(tuple(np.polynomial.polynomial.polymul(self.coeffs, other.coeffs)))

    def to_slice_function(self, radius=1e3):
        name = "P(s)=" + " + ".join(f"{a:g}*s^{k}" for k, a in enumerate(self.coeffs) if a)
        return from_complex(self, (Disk(0.0, 0.0, radius),), None, name or "0")


def polynomial(coeffs, radius=1e3):
    """Intrinsic polynomial (coefficients in increasing degree) on a large ball."""
    return IntrinsicPolynomial(tuple(coeffs)).to_slice_function(radius)


def rational(numerator, denominator, pole_radius=1e-6, name=None):
    """Intrinsic rational function ``N(s)/D(s)`` with real coefficients.

    The domain is the whole space minus small balls around the spheres of
    the zeros of ``D``.  ``deg N <= deg D`` is required so that the value at
    infinity is finite.
    """
    num = IntrinsicPolynomial(tuple(numerator))
    den = IntrinsicPolynomial(tuple(denominator))
    if num.degree > den.degree:
        raise PreconditionError("rational functions need deg N <= deg D for a finite value at infinity")
    if num.degree < den.degree:
        f_inf = 0.0
    else:
        f_inf = num.coeffs[num.degree] / den.coeffs[den.degree]
    roots = np.roots(list(reversed(den.coeffs[: den.degree + 1]))) if den.degree > 0 else np.array([])
    holes = []
    for z in roots:
        c1 = abs(z.imag)
        if c1 <= pole_radius:
            hole = (float(z.real), 0.0, pole_radius)
        else:
            hole = (float(z.real), c1, min(pole_radius, 0.5 * c1))
        if hole not in holes:
            holes.append(hole)
    region = Exterior(tuple(holes))

    def h(z):
        return num(z) / den(z)

    return from_complex(h, (region,), f_inf, name or f"N/D N={num.coeffs} D={den.coeffs}")


def resolvent_function(a, pole_radius=1e-6):
    """``(s - a)^{-1}`` for real ``a``."""
    return rational((1.0,), (-float(a), 1.0), pole_radius, name=f"(s-{a:g})^-1")


def exp_function(radius=50.0):
    return from_complex(np.exp, (Disk(0.0, 0.0, radius),), None, "exp")


def constant(value, regions=(WHOLE_SPACE,), chirality=Chirality.LEFT):
    """Constant function; intrinsic when ``value`` is real."""
    q = Quaternion.coerce(value)
    arr = q.array
    comps = [StemComponent(r, (lambda x0, x1, a=arr: a), (lambda x0, x1: 0.0)) for r in regions]
    chir = Chirality.INTRINSIC if not np.any(arr[1:]) else Chirality(chirality)
    unbounded = any(not r.bounded for r in regions)
    return SliceFunction(comps, chir, q if unbounded else None, f"const{q.as_tuple()}")


def locally_constant(regions, values, chirality=Chirality.LEFT, value_at_infinity=None):
    """Function equal to ``values[k]`` on ``regions[k]``."""
    comps = []
    arrs = [Quaternion.coerce(v).array for v in values]
    for r, a in zip(regions, arrs):
        comps.append(StemComponent(r, (lambda x0, x1, a=a: a), (lambda x0, x1: 0.0)))
    real = not any(np.any(a[1:]) for a in arrs)
    chir = Chirality.INTRINSIC if real else Chirality(chirality)
    if value_at_infinity is None:
        for r, a in zip(regions, arrs):
            if not r.bounded:
                value_at_infinity = Quaternion.from_array(a)
                break
    return SliceFunction(comps, chir, value_at_infinity, "locally-constant")


def char_function(domain, selected):
    """Characteristic function of the selected components of a slice Cauchy domain.

    ``selected`` holds component indices.  The result is intrinsic, equal to
    1 on the selected components and 0 on the others.  Its value at infinity
    is 1 exactly when an unbounded component is selected, or when every
    component of a bounded domain is selected.
    """
    regions = domain.regions
    selected = sorted(set(int(k) for k in selected))
    if any(k < 0 or k >= len(regions) for k in selected):
        raise PreconditionError(f"component index out of range: {selected}")
    _check_disjoint(regions)
    values = [1.0 if k in selected else 0.0 for k in range(len(regions))]
    if any(not r.bounded for r in regions):
        f_inf = max(v for r, v in zip(regions, values) if not r.bounded)
    else:
        f_inf = 1.0 if len(selected) == len(regions) else 0.0
    f = locally_constant(regions, values, value_at_infinity=f_inf)
    f.name = f"chi{tuple(selected)}"
    return f


def _check_disjoint(regions, n=128):
    rng = np.random.default_rng(12345)
    for i, r in enumerate(regions):
        pts = r.sample(n, rng)
        for j, other in enumerate(regions):
            if i != j and np.any(other.contains(pts[:, 0], pts[:, 1])):
                raise DomainError(f"regions {i} and {j} overlap")


def piecewise(pieces, chirality=None, value_at_infinity=None):
    """Glue ``(region, SliceFunction)`` pieces into one function."""
    comps = []
    chirs = set()
    for region, g in pieces:
        chirs.add(g.chirality)

        def alpha(x0, x1, g=g):
            return g.stems(x0, x1)[0]

        def beta(x0, x1, g=g):
            return g.stems(x0, x1)[1]

        comps.append(StemComponent(region, alpha, beta))
        if value_at_infinity is None and not region.bounded:
            value_at_infinity = g.value_at_infinity
    if chirality is None:
        if chirs == {Chirality.INTRINSIC}:
            chirality = Chirality.INTRINSIC
        elif Chirality.RIGHT in chirs and Chirality.LEFT not in chirs:
            chirality = Chirality.RIGHT
        else:
            chirality = Chirality.LEFT
    return SliceFunction(comps, chirality, value_at_infinity, "piecewise")


def product(f, g):
    """Slice product of ``f`` and ``g`` where at least one factor is intrinsic.

    The stems combine like complex numbers.  With ``f`` intrinsic the result
    is ``f g`` pointwise when ``g`` is left and ``g f`` when ``g`` is right:
    ``(a_f a_g - b_f b_g, a_f b_g + b_f a_g)``.
    """
    if f.chirality is not Chirality.INTRINSIC and g.chirality is not Chirality.INTRINSIC:
        raise PreconditionError("one factor of a slice product must be intrinsic")
    if f.chirality is Chirality.INTRINSIC:
        chir = g.chirality
    else:
        chir = f.chirality
    comps = []
    for cf in f.components:
        for cg in g.components:
            region = Intersection(cf.region, cg.region)

            def alpha(x0, x1):
                af, bf = f.stems(x0, x1)
                ag, bg = g.stems(x0, x1)
                return qmul(af, ag) - qmul(bf, bg)

            def beta(x0, x1):
                af, bf = f.stems(x0, x1)
                ag, bg = g.stems(x0, x1)
                return qmul(af, bg) + qmul(bf, ag)

            comps.append(StemComponent(region, alpha, beta))
    f_inf = None
    if f.value_at_infinity is not None and g.value_at_infinity is not None:
        f_inf = f.value_at_infinity * g.value_at_infinity
    return SliceFunction(comps, chir, f_inf, f"({f.name})*({g.name})")


def extend_from_slice(h, unit=UNIT_I, regions=(WHOLE_SPACE,), chirality=Chirality.LEFT,
                      value_at_infinity=None, name="ext(h)", probes=32):
    """Slice extension of a function given on the slice C_unit.

    ``h`` maps complex arrays (points ``x0 + unit x1``) to quaternion arrays
    ``(..., 4)`` or to complex arrays (read as values in C_unit).  The stems
    come from the representation formula::

        alpha = (h(z) + h(conj z)) / 2
        beta  = unit^{-1} (h(z) - h(conj z)) / 2     (left)
        beta  = (h(z) - h(conj z)) unit^{-1} / 2     (right)
    """
    chirality = Chirality(chirality)
    uq = np.zeros(4)
    uq[1:] = unit.vector
    u_inv = -uq

    def hq(z):
        v = h(z)
        v = np.asarray(v)
        if np.iscomplexobj(v) or v.shape[-1:] != (4,) or v.shape == np.shape(z):
            return embed_complex(v, unit)
        return v

    def alpha(x0, x1):
        z = x0 + 1j * x1
        return 0.5 * (hq(z) + hq(np.conj(z)))

    def beta(x0, x1):
        z = x0 + 1j * x1
        d = 0.5 * (hq(z) - hq(np.conj(z)))
        if chirality is Chirality.RIGHT:
            return qmul(d, u_inv)
        return qmul(u_inv, d)

    comps = [StemComponent(r, alpha, beta) for r in regions]
    f = SliceFunction(comps, chirality, value_at_infinity, name)

    # h must be defined on the mirror image of every probe point
    pts = _sample_points(f, probes)
    z = pts[:, 0] + 1j * pts[:, 1]
    for w in (z, np.conj(z)):
        try:
            vals = hq(w)
        except (DomainError, ValueError, ZeroDivisionError, FloatingPointError) as exc:
            raise DomainError(f"{name}: samples are not symmetric about the real axis ({exc})") from exc
        if not np.all(np.isfinite(vals)):
            raise DomainError(f"{name}: samples are not symmetric about the real axis")
    return f


def compose(g, f, unit=UNIT_I):
    """``g o f`` for intrinsic ``f``; keeps the chirality of ``g``."""
    if f.chirality is not Chirality.INTRINSIC:
        raise PreconditionError("the inner function of a composition must be intrinsic")

    def h(z):
        return g.evaluate(f.on_slice(z, unit))

    f_inf = None
    if f.unbounded:
        f_inf = g(f.value_at_infinity)
    return extend_from_slice(h, unit, f.regions, g.chirality, f_inf, f"({g.name})o({f.name})")


# ---------------------------------------------------------------------------
# structural checks
# ---------------------------------------------------------------------------

def is_intrinsic(f, samples=INTRINSIC_SAMPLES, tol=INTRINSIC_TOL, seed=0):
    """Check ``f(conj x) = conj f(x)`` and real stems on quasi-random samples.

    Returns ``(ok, worst_deviation)``.
    """
    pts = _sample_points(f, samples, seed=seed)
    alpha, beta = f.stems(pts[:, 0], pts[:, 1])
    worst = float(max(np.max(qvec_norm(alpha), initial=0.0), np.max(qvec_norm(beta), initial=0.0)))
    rng = np.random.default_rng(seed)
    units = rng.standard_normal((len(pts), 3))
    units /= np.linalg.norm(units, axis=1, keepdims=True)
    x = np.zeros((len(pts), 4))
    x[:, 0] = pts[:, 0]
    x[:, 1:] = pts[:, 1:2] * units
    dev = f.evaluate(qconj(x)) - qconj(f.evaluate(x))
    worst = max(worst, float(np.max(qabs(dev), initial=0.0)))
    return worst <= tol, worst


def cr_residual(f, samples=64, step=1e-5, seed=1):
    """Largest Cauchy-Riemann defect of the stems, by central differences.

    The defect at each point is scaled by ``1 + |alpha| + |beta|`` so that
    fast-growing functions are judged by relative accuracy.

    Sample points are kept at least ``2 * step`` away from region boundaries
    and from the real axis.
    """
    pts = _sample_points(f, 4 * samples, seed=seed)
    pts = pts[pts[:, 1] > 4 * step]
    idx = f.component_index(pts[:, 0], pts[:, 1], tol=0.0)
    ok = np.ones(len(pts), dtype=bool)
    for dx, dy in ((step, 0), (-step, 0), (0, step), (0, -step)):
        ok &= f.component_index(pts[:, 0] + 2 * dx, pts[:, 1] + 2 * dy, tol=0.0) == idx
    pts = pts[ok][:samples]
    x0, x1 = pts[:, 0], pts[:, 1]
    ap, bp = f.stems(x0 + step, x1)
    am, bm = f.stems(x0 - step, x1)
    a_up, b_up = f.stems(x0, x1 + step)
    a_dn, b_dn = f.stems(x0, x1 - step)
    da0 = (ap - am) / (2 * step)
    db0 = (bp - bm) / (2 * step)
    da1 = (a_up - a_dn) / (2 * step)
    db1 = (b_up - b_dn) / (2 * step)
    a, b = f.stems(x0, x1)
    scale = 1.0 + qabs(a) + qabs(b)
    r1 = qabs(da0 - db1) / scale
    r2 = qabs(db0 + da1) / scale
    return float(max(np.max(r1, initial=0.0), np.max(r2, initial=0.0)))


def split_left_right(f, samples=64, tol=INTRINSIC_TOL):
    """Split a left-and-right slice hyperholomorphic ``f`` as ``c + f_tilde``.

    ``c`` is locally constant (the vector part of ``alpha``) and ``f_tilde``
    intrinsic (the real part of ``alpha`` together with ``beta``).
    """
    pts = _sample_points(f, samples)
    _, beta = f.stems(pts[:, 0], pts[:, 1])
    worst = float(np.max(qvec_norm(beta), initial=0.0))
    if worst > tol:
        raise NotSplittableError(f"beta is not real (deviation {worst:.3g})")

    c_comps, t_comps = [], []
    for comp in f.components:
        def c_alpha(x0, x1, comp=comp):
            a = _lift(comp.alpha(x0, x1), np.broadcast(x0, x1).shape)
            out = np.array(a)
            out[..., 0] = 0.0
            return out

        def t_alpha(x0, x1, comp=comp):
            return _lift(comp.alpha(x0, x1), np.broadcast(x0, x1).shape)[..., 0]

        def t_beta(x0, x1, comp=comp):
            return _lift(comp.beta(x0, x1), np.broadcast(x0, x1).shape)[..., 0]

        c_comps.append(StemComponent(comp.region, c_alpha, lambda x0, x1: 0.0))
        t_comps.append(StemComponent(comp.region, t_alpha, t_beta))

    c_inf = t_inf = None
    if f.value_at_infinity is not None:
        c_inf = f.value_at_infinity.vector
        t_inf = Quaternion(f.value_at_infinity.real)
    c = SliceFunction(c_comps, Chirality.LEFT, c_inf, f"c[{f.name}]")
    t = SliceFunction(t_comps, Chirality.INTRINSIC, t_inf, f"tilde[{f.name}]")
    return c, t
