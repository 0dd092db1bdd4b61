"""The S-functional calculus: ``f(T)`` from Cauchy integrals over slice boundaries.

For a left slice function::

    f(T) = f(inf) Id + 1/(2 pi) int S_L^{-1}(s, T) ds_I f(s)

and for a right one::

    f(T) = f(inf) Id + 1/(2 pi) int f(s) ds_I S_R^{-1}(s, T)

where ``ds_I = -I ds`` and the ``f(inf)`` term appears only for unbounded
domains.  The integral runs over the full boundary in C_I, assembled from
the upper half and its mirror image.

For intrinsic ``f`` the mirror pairs combine into real numbers, so only the
upper half is needed::

    1/(2 pi) sum_k  a_k Q_k^{-1} - b_k T Q_k^{-1}
    a_k = 2 Re(f(z_k) (-i) dz_k conj(z_k)),   b_k = 2 Re(f(z_k) (-i) dz_k)

which is evaluated on the complex adjoint and serves as an independent
route to the same operator.

Every result is computed with ``N`` and ``2N`` nodes per curve; the
max-norm difference is reported as the estimated quadrature error and the
``N``-node value is returned.
"""

from __future__ import annotations

from dataclasses import dataclass, field
import math

import numpy as np

from .contour import DEFAULT_NODES, enclose
from .errors import ConstructionError, PreconditionError, SFCalcError
from .qlinalg import (
    DiagonalOperator,
    QMatrix,
    SSpectrum,
    from_adjoint_array,
    merge_spheres,
    pseudo_resolvent_adjoint,
    qmatmul,
    s_resolvent_left,
    s_resolvent_right,
    s_spectrum,
)
from .quat import (
    UNIT_I,
    ImaginaryUnit,
    Quaternion,
    Sphere,
    qabs,
    qconj,
    qinv,
    qmul,
    sphere_of,
)
from .regions import Disk
from . import slicefn as sf
from .slicefn import Chirality

VERIFY_FLOOR = 1e-9


@dataclass
class CalcResult:
    """An operator (``QMatrix`` or ``(m, 4)`` symbol array) plus diagnostics."""

    operator: object
    diagnostics: dict = field(default_factory=dict)

    @property
    def estimated_error(self):
        return self.diagnostics["estimated_error"]

    @property
    def tolerance(self):
        return verification_tolerance(self)


def verification_tolerance(*results):
    """``max(1e-9, 10 x largest estimated error)`` over the given results."""
    errs = [r.diagnostics.get("estimated_error", 0.0) for r in results]
    return max(VERIFY_FLOOR, 10.0 * max(errs, default=0.0))


# ---------------------------------------------------------------------------
# preconditions
# ---------------------------------------------------------------------------

def check_enclosed(spec, domain):
    """Raise ``PreconditionError`` unless every spectral piece lies inside ``domain``."""
    for s in spec.spheres:
        if not domain.contains(s):
            raise PreconditionError(f"spectral sphere ({s.s0:.6g}, {s.s1:.6g}) is not enclosed by the domain")
    for a, b in spec.intervals:
        lo = a if math.isfinite(a) else -(domain.truncation or 0.0) - 1.0
        hi = b if math.isfinite(b) else (domain.truncation or 0.0) + 1.0
        for x in np.linspace(lo, hi, 201):
            if not domain.contains(Sphere(float(x), 0.0)):
                raise PreconditionError(f"spectral point {x:.6g} of the interval ({a}, {b}) is not enclosed")
    if (spec.includes_infinity or spec.unbounded_along_real_axis) and domain.bounded:
        raise PreconditionError("the spectrum contains infinity but the domain is bounded")


def _check_function(f, domain, allowed):
    if f.chirality not in allowed and not f.is_bilateral():
        raise PreconditionError(f"{f.name} has chirality {f.chirality.value}; expected one of {[a.value for a in allowed]}")
    if domain.unbounded and f.value_at_infinity is None:
        raise PreconditionError(f"{f.name} needs a value at infinity on an unbounded domain")


def _infinity_term(f, domain):
    if domain.bounded:
        return None
    return f.value_at_infinity.array


# ---------------------------------------------------------------------------
# quadrature sums
# ---------------------------------------------------------------------------

def _resolvent_nodes(T, rule):
    """Pseudo-resolvents (quaternion arrays) at the full rule; mirror nodes share them."""
    c = T.adjoint()
    z = rule.z
    X = from_adjoint_array(pseudo_resolvent_adjoint(c, z.real, np.abs(z) ** 2))
    return np.concatenate([X, X], axis=0)


def _left_sum(f, T, rule):
    full = rule.full()
    s = full.nodes
    X = _resolvent_nodes(T, rule)
    SL = qmul(X, qconj(s)[:, None, None, :]) - qmatmul(T.entries[None], X)
    g = qmul(full.weights, f.evaluate(s))
    return np.sum(qmul(SL, g[:, None, None, :]), axis=0) / (2 * math.pi)


def _right_sum(f, T, rule):
    full = rule.full()
    s = full.nodes
    X = _resolvent_nodes(T, rule)
    SR = qmul(qconj(s)[:, None, None, :], X) - qmatmul(T.entries[None], X)
    g = qmul(f.evaluate(s), full.weights)
    return np.sum(qmul(g[:, None, None, :], SR), axis=0) / (2 * math.pi)


def _fold_coefficients(f, rule):
    """Real weights ``a_k, b_k`` of the folded intrinsic sum on upper nodes."""
    z = rule.z
    alpha, beta = f.stems(z.real, z.imag)
    fz = alpha[..., 0] + 1j * beta[..., 0]
    m = fz * (-1j) * rule.dz
    a = 2.0 * np.real(m * np.conj(z))
    b = 2.0 * np.real(m)
    return a, b


def _intrinsic_sum(f, T, rule):
    c = T.adjoint()
    z = rule.z
    X = pseudo_resolvent_adjoint(c, z.real, np.abs(z) ** 2)
    a, b = _fold_coefficients(f, rule)
    S = np.tensordot(a, X, axes=1) - c @ np.tensordot(b, X, axes=1)
    return from_adjoint_array(S / (2 * math.pi))


def _diag_resolvents(symbols, z):
    """``(q^2 - 2 Re(s) q + |s|^2)^{-1}`` for all nodes and symbols, ``(K, m, 4)``."""
    q = symbols[None, :, :]
    quad = qmul(q, q) - 2.0 * z.real[:, None, None] * q
    quad[..., 0] += (np.abs(z) ** 2)[:, None]
    if np.any(qabs(quad) < 1e-12):
        raise PreconditionError("a quadrature node lies on the sphere of a symbol")
    return qinv(quad)


def _diag_intrinsic_sum(f, D, rule):
    X = _diag_resolvents(D.symbols, rule.z)
    a, b = _fold_coefficients(f, rule)
    q = D.symbols[None]
    S = np.tensordot(a, X, axes=1) - np.tensordot(b, qmul(q, X), axes=1)
    return S / (2 * math.pi)


def _run(summer, f, T, domain, unit, nodes, kind):
    finf = _infinity_term(f, domain)
    vals = []
    for n in (nodes, 2 * nodes):
        rule = domain.quadrature(unit, n)
        v = summer(f, T, rule)
        if finf is not None:
            if isinstance(T, DiagonalOperator):
                v = v + finf[None, :]
            else:
                v = v.copy()
                idx = np.arange(T.n)
                v[idx, idx] += finf
        vals.append(v)
    err = float(np.max(qabs(vals[0] - vals[1]), initial=0.0))
    op = vals[0] if isinstance(T, DiagonalOperator) else QMatrix(vals[0])
    diag = {
        "method": kind,
        "nodes_per_curve": nodes,
        "quadrature_nodes": len(domain.quadrature(unit, nodes).full()),
        "estimated_error": err,
        "unit": [float(v) for v in unit.vector],
        "domain": domain.describe(),
        "function": f.name,
    }
    return CalcResult(op, diag)


def _unit(unit):
    if unit is None:
        return UNIT_I
    if isinstance(unit, ImaginaryUnit):
        return unit
    return ImaginaryUnit.from_vector(Quaternion.coerce(unit).array[1:])


# ---------------------------------------------------------------------------
# public calculus
# ---------------------------------------------------------------------------

def apply_left(f, T, domain, unit=None, nodes=DEFAULT_NODES):
    """``f(T)`` for left slice hyperholomorphic (or intrinsic) ``f``."""
    if isinstance(T, DiagonalOperator):
        raise PreconditionError("diagonal operators only support intrinsic application")
    T = QMatrix.coerce(T)
    _check_function(f, domain, (Chirality.LEFT, Chirality.INTRINSIC))
    check_enclosed(s_spectrum(T), domain)
    return _run(_left_sum, f, T, domain, _unit(unit), nodes, "left")


def apply_right(f, T, domain, unit=None, nodes=DEFAULT_NODES):
    """``f(T)`` for right slice hyperholomorphic (or intrinsic) ``f``."""
    if isinstance(T, DiagonalOperator):
        raise PreconditionError("diagonal operators only support intrinsic application")
    T = QMatrix.coerce(T)
    _check_function(f, domain, (Chirality.RIGHT, Chirality.INTRINSIC))
    check_enclosed(s_spectrum(T), domain)
    return _run(_right_sum, f, T, domain, _unit(unit), nodes, "right")


def apply_intrinsic(f, T, domain, unit=None, nodes=DEFAULT_NODES, check=True):
    """``f(T)`` for intrinsic ``f`` through the folded upper-half-plane sum.

    For matrices the result is compared against :func:`apply_left` and
    :func:`apply_right` when ``check`` is set; a disagreement beyond the
    verification tolerance raises ``SFCalcError``.  For a
    :class:`DiagonalOperator` the sum is taken symbol by symbol and the
    result is an ``(m, 4)`` array.
    """
    _check_function(f, domain, (Chirality.INTRINSIC,))
    unit = _unit(unit)
    if isinstance(T, DiagonalOperator):
        check_enclosed(T.closure, domain)
        return _run(_diag_intrinsic_sum, f, T, domain, unit, nodes, "intrinsic-diagonal")
    T = QMatrix.coerce(T)
    check_enclosed(s_spectrum(T), domain)
    res = _run(_intrinsic_sum, f, T, domain, unit, nodes, "intrinsic")
    if check:
        left = _run(_left_sum, f, T, domain, unit, nodes, "left")
        right = _run(_right_sum, f, T, domain, unit, nodes, "right")
        tol = verification_tolerance(res, left, right)
        dl = res.operator.distance(left.operator)
        dr = res.operator.distance(right.operator)
        res.diagnostics["agreement_left"] = dl
        res.diagnostics["agreement_right"] = dr
        if max(dl, dr) > tol:
            raise SFCalcError(
                f"folded intrinsic sum disagrees with the left/right integrals ({max(dl, dr):.3g} > {tol:.3g})"
            )
    return res


def poly_apply(P, T):
    """``P(T)`` by Horner's scheme with quaternionic matrix products."""
    T = QMatrix.coerce(T)
    coeffs = P.coeffs if isinstance(P, sf.IntrinsicPolynomial) else tuple(P)
    eye = QMatrix.identity(T.n)
    out = QMatrix.zeros(T.n)
    for a in reversed(coeffs):
        out = out @ T + eye * float(a)
    return out


# ---------------------------------------------------------------------------
# spectral sets
# ---------------------------------------------------------------------------

def _match_spheres(spec, selected, tol=1e-6):
    chosen = []
    for s in selected:
        s = s if isinstance(s, Sphere) else Sphere(*s)
        hit = [t for t in spec.spheres if t.distance(s) <= tol]
        if not hit:
            raise PreconditionError(f"sphere {s} is not part of the spectrum")
        chosen.append(hit[0])
    return set(chosen)


def spectral_projection(T, selected, clearance=0.5, unit=None, nodes=DEFAULT_NODES, domain=None):
    """``E_sigma = chi_sigma(T)`` for a set of spectral spheres.

    Without an explicit ``domain`` one is built by :func:`enclose`; the
    selected spheres must be at least ``2 clearance`` away from the others.
    """
    T = QMatrix.coerce(T)
    spec = s_spectrum(T)
    chosen = _match_spheres(spec, selected)
    rest = [s for s in spec.spheres if s not in chosen]
    for s in chosen:
        for t in rest:
            if s.distance(t) < 2 * clearance - 1e-9:
                raise ConstructionError(
                    f"spheres {s} and {t} are closer than 2*clearance; the spectral set is not separated"
                )
    if domain is None:
        domain = enclose(spec, clearance)
    picked = []
    for k in range(len(domain.components)):
        inside = [s for s in spec.spheres if domain.component_of(s.s0, s.s1) == k]
        sel = [s in chosen for s in inside]
        if any(sel) and not all(sel):
            raise ConstructionError("a domain component mixes selected and unselected spheres")
        if inside and all(sel):
            picked.append(k)
    chi = sf.char_function(domain, picked)
    res = apply_intrinsic(chi, T, domain, unit, nodes)
    res.diagnostics["selected"] = [[s.s0, s.s1] for s in sorted(chosen)]
    return res


def _projection_residuals(T, E):
    return (E @ E).distance(E), (E @ T).distance(T @ E)


def restrict(T, E, tol=1e-8, pivot_tol=1e-10):
    """Restriction of ``T`` to the range of the projection ``E``.

    A right-orthonormal basis of ``ran E`` is extracted from the columns of
    ``E`` by pivoted Gram-Schmidt over H (largest remaining column first,
    stopping below ``pivot_tol``).  With the basis as the columns of ``B``,
    the restriction is ``B^* T B``.

    Returns ``(T_sigma, basis)`` with ``basis`` of shape ``(r, n, 4)``.
    """
    T = QMatrix.coerce(T)
    E = QMatrix.coerce(E)
    idem, comm = _projection_residuals(T, E)
    scale = max(1.0, E.max_norm(), T.max_norm())
    if idem > tol * scale:
        raise PreconditionError(f"E is not idempotent (residual {idem:.3g})")
    if comm > tol * scale:
        raise PreconditionError(f"E does not commute with T (residual {comm:.3g})")
    cols = [np.array(E.entries[:, j, :]) for j in range(E.n)]
    basis = []
    while cols:
        norms = [math.sqrt(float(np.sum(c * c))) for c in cols]
        k = int(np.argmax(norms))
        if norms[k] <= pivot_tol * scale:
            break
        u = cols.pop(k) / norms[k]
        basis.append(u)
        # remove the component along u: v <- v - u <u, v>
        cols = [v - qmul(u, np.sum(qmul(qconj(u), v), axis=0)[None, :]) for v in cols]
    if not basis:
        return QMatrix(np.zeros((0, 0, 4))), np.zeros((0, T.n, 4))
    B = np.stack(basis, axis=1)
    Ts = qmatmul(qconj(np.swapaxes(B, 0, 1)), qmatmul(T.entries, B))
    return QMatrix(Ts), np.stack(basis, axis=0)


# ---------------------------------------------------------------------------
# identity checks
# ---------------------------------------------------------------------------

def _entry(name, residual, tol, **extra):
    d = {"name": name, "residual": float(residual), "tolerance": float(tol), "passed": bool(residual < tol)}
    d.update(extra)
    return d


def _random_resolvent_point(spec, rng, min_gap=0.3, width=2.0):
    while True:
        s = Quaternion.from_array(width * rng.standard_normal(4) / 2)
        if spec.distance_to(sphere_of(s)) > min_gap:
            return s


def resolvent_identities(T, rng, tol=VERIFY_FLOOR):
    """Residuals of the left, right and two-variable S-resolvent equations."""
    T = QMatrix.coerce(T)
    spec = s_spectrum(T)
    s = _random_resolvent_point(spec, rng)
    v = rng.standard_normal((T.n, 4))
    SL = s_resolvent_left(T, s)
    SR = s_resolvent_right(T, s)
    left = SL @ qmul(s.array, v) - T @ (SL @ v) - v
    right = qmul(s.array, SR @ v) - SR @ (T @ v) - v
    while True:
        p = _random_resolvent_point(spec, rng)
        if sphere_of(p).distance(sphere_of(s)) > 0.3:
            break
    SLp = s_resolvent_left(T, p)
    lhs = SR @ SLp
    # [(S_R(s) - S_L(p)) p - conj(s) (S_R(s) - S_L(p))] (p^2 - 2 s0 p + |s|^2)^{-1}
    D = SR - SLp
    q = p * p - p * (2 * s.w) + s.norm() ** 2
    rhs = (D * p - s.conj() * D) * q.inv()
    return [
        _entry("resolvent_equation_left", float(np.max(qabs(left))), tol),
        _entry("resolvent_equation_right", float(np.max(qabs(right))), tol),
        _entry("resolvent_equation_two_variable", lhs.distance(rhs), tol),
    ]


def default_domain(T, clearance=None, avoid=None):
    """Enclosing domain with a clearance adapted to the spectral gaps."""
    spec = s_spectrum(T)
    pts = spec.spheres
    d = min((a.distance(b) for i, a in enumerate(pts) for b in pts[i + 1:]), default=math.inf)
    if clearance is None:
        clearance = min(0.25, 0.45 * d) if math.isfinite(d) else 0.25
        clearance = max(clearance, 1e-3)
    return enclose(spec, clearance, avoid=avoid)


def resolvent_point(T, margin=1.0):
    """A real point ``a`` to the right of the spectrum for ``(s - a)^{-1}``."""
    spec = s_spectrum(QMatrix.coerce(T))
    return max(s.s0 + s.s1 for s in spec.spheres) + margin


def verify_identities(T, f=None, g=None, rng=None, unit=None, nodes=DEFAULT_NODES, clearance=None):
    """Check the calculus identities on ``T``; returns a report dict.

    ``f`` and ``g`` default to ``s^2`` and ``s^3``.  The report lists one
    entry per identity with residual, tolerance and a pass flag.
    """
    T = QMatrix.coerce(T)
    rng = np.random.default_rng(0) if rng is None else rng
    f = sf.polynomial((0, 0, 1)) if f is None else f
    g = sf.polynomial((0, 0, 0, 1)) if g is None else g
    unit = _unit(unit)
    entries = list(resolvent_identities(T, rng))

    spec = s_spectrum(T)
    dom = default_domain(T, clearance)
    fT = apply_intrinsic(f, T, dom, unit, nodes, check=False)
    fl = apply_left(f, T, dom, unit, nodes)
    fr = apply_right(f, T, dom, unit, nodes)
    entries.append(_entry("intrinsic_left_equals_right", fl.operator.distance(fr.operator),
                          verification_tolerance(fl, fr)))
    entries.append(_entry("folded_equals_left", fT.operator.distance(fl.operator),
                          verification_tolerance(fT, fl)))

    gT = apply_left(g, T, dom, unit, nodes)
    fg = apply_left(sf.product(f, g), T, dom, unit, nodes)
    entries.append(_entry("product_rule", fg.operator.distance(fT.operator @ gT.operator),
                          max(1e-8, 10 * fg.estimated_error)))

    other_unit = ImaginaryUnit.random(rng)
    other_dom = default_domain(T, 0.7 * dom.meta["clearance"])
    alt = apply_left(f, T, other_dom, other_unit, nodes)
    entries.append(_entry("unit_and_contour_independence", alt.operator.distance(fl.operator),
                          verification_tolerance(alt, fl)))

    if isinstance(f.components[0].region, Disk) and f.chirality is Chirality.INTRINSIC:
        image = spectral_image(f, spec)
        got = s_spectrum(fT.operator)
        entries.append(_entry("spectral_mapping", got.hausdorff(image), 1e-8))

    return {"passed": all(e["passed"] for e in entries), "checks": entries}


def spectral_image(f, spec):
    """Spheres ``f([s])`` for intrinsic ``f``, merged like computed spectra."""
    pts = []
    for s in spec.spheres:
        a, b = f.stems(np.array([s.s0]), np.array([s.s1]))
        pts.append((float(a[0, 0]), abs(float(b[0, 0]))))
    return SSpectrum(merge_spheres(pts))


def resolvent_check(T, a):
    """``(s - a)^{-1}`` applied to ``T`` equals ``(T - a)^{-1}``; returns the residual."""
    T = QMatrix.coerce(T)
    f = sf.resolvent_function(a)
    dom = default_domain(T, avoid=Disk(a, 0.0, 1e-3))
    res = apply_intrinsic(f, T, dom)
    direct = (T - QMatrix.identity(T.n) * a).inv()
    return res.operator.distance(direct), res
