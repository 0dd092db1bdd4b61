"""Quaternionic matrices, S-spectra and S-resolvent operators.

A :class:`QMatrix` acts on column vectors in ``H^n`` from the left, with
scalars multiplying vectors from the right, so ``M (v a) = (M v) a``.
Vectors are ``(n, 4)`` arrays.

Linear algebra (inverses, eigenvalues) goes through the complex adjoint::

    t = a + b J   (a, b in C_I)   ->   [[A, B], [-conj(B), conj(A)]]

which is an injective algebra homomorphism ``H^{n x n} -> C^{2n x 2n}``.
Quaternion products themselves are computed directly with the Hamilton
product so the two routes stay independent.
"""

from __future__ import annotations

from dataclasses import dataclass, field
import math
import warnings

import numpy as np

from .errors import PreconditionError, SingularityError
from .quat import (
    Quaternion,
    Sphere,
    as_qarray,
    qabs,
    qconj,
    qinv,
    qmul,
    sphere_of,
)

SPHERE_MERGE_TOL = 1e-8
COND_WARN = 1e12
COND_FAIL = 1e15


def qmatmul(a, b):
    """Matrix product of quaternion arrays ``(..., n, m, 4) @ (..., m, p, 4)``."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return qmul(a[..., :, :, None, :], b[..., None, :, :, :]).sum(axis=-3)


def qmatvec(a, v):
    a = np.asarray(a, dtype=float)
    v = np.asarray(v, dtype=float)
    return qmul(a, v[..., None, :, :]).sum(axis=-2)


# ---------------------------------------------------------------------------
# complex adjoint
# ---------------------------------------------------------------------------

def adjoint_array(q):
    """Complex adjoint of quaternion matrices ``(..., n, m, 4) -> (..., 2n, 2m)``."""
    q = np.asarray(q, dtype=float)
    a = q[..., 0] + 1j * q[..., 1]
    b = q[..., 2] + 1j * q[..., 3]
    top = np.concatenate([a, b], axis=-1)
    bottom = np.concatenate([-b.conj(), a.conj()], axis=-1)
    return np.concatenate([top, bottom], axis=-2)


def from_adjoint_array(c):
    """Inverse of :func:`adjoint_array`; reads the top block row only."""
    c = np.asarray(c)
    n = c.shape[-2] // 2
    m = c.shape[-1] // 2
    a = c[..., :n, :m]
    b = c[..., :n, m:]
    return np.stack([a.real, a.imag, b.real, b.imag], axis=-1)


def complex_adjoint(T):
    """The ``2n x 2n`` complex adjoint of a :class:`QMatrix`."""
    return adjoint_array(QMatrix.coerce(T).entries)


# ---------------------------------------------------------------------------
# QMatrix
# ---------------------------------------------------------------------------

class QMatrix:
    """Square quaternionic matrix, immutable by convention."""

    __slots__ = ("_e",)

    def __init__(self, entries):
        e = np.array(entries, dtype=float)
        if e.ndim != 3 or e.shape[0] != e.shape[1] or e.shape[2] != 4:
            raise ValueError(f"QMatrix entries must have shape (n, n, 4), got {e.shape}")
        e.setflags(write=False)
        self._e = e

    @classmethod
    def coerce(cls, value):
        return value if isinstance(value, QMatrix) else cls(value)

    @classmethod
    def identity(cls, n):
        e = np.zeros((n, n, 4))
        e[np.arange(n), np.arange(n), 0] = 1.0
        return cls(e)

    @classmethod
    def zeros(cls, n):
        return cls(np.zeros((n, n, 4)))

    @classmethod
    def diag(cls, values):
        values = [Quaternion.coerce(v) for v in values]
        e = np.zeros((len(values), len(values), 4))
        for k, v in enumerate(values):
            e[k, k] = v.array
        return cls(e)

    @classmethod
    def from_rows(cls, rows):
        """Build from nested rows of anything :meth:`Quaternion.coerce` accepts."""
        return cls([[Quaternion.coerce(x).array for x in row] for row in rows])

    @classmethod
    def from_adjoint(cls, c):
        return cls(from_adjoint_array(c))

    @classmethod
    def random(cls, n, rng, scale=None):
        """Gaussian entries with variance ``scale**2`` (default ``1/n``)."""
        scale = 1.0 / math.sqrt(n) if scale is None else scale
        return cls(scale * rng.standard_normal((n, n, 4)) / 2.0)

    @property
    def entries(self):
        return self._e

    @property
    def n(self):
        return self._e.shape[0]

    def __getitem__(self, idx):
        i, j = idx
        return Quaternion.from_array(self._e[i, j])

    def to_tuples(self):
        return [[tuple(float(c) for c in self._e[i, j]) for j in range(self.n)] for i in range(self.n)]

    def adjoint(self):
        return adjoint_array(self._e)

    def conj_transpose(self):
        return QMatrix(qconj(np.swapaxes(self._e, 0, 1)))

    def max_norm(self):
        """Largest entry modulus."""
        return float(np.max(qabs(self._e))) if self.n else 0.0

    def inv(self):
        c = self.adjoint()
        _check_condition(c, None)
        return QMatrix.from_adjoint(np.linalg.inv(c))

    def __matmul__(self, other):
        if isinstance(other, QMatrix):
            return QMatrix(qmatmul(self._e, other._e))
        v = np.asarray(other, dtype=float)
        if v.shape == (self.n, 4):
            return qmatvec(self._e, v)
        return NotImplemented

    def __add__(self, other):
        return QMatrix(self._e + QMatrix.coerce(other)._e)

    def __sub__(self, other):
        return QMatrix(self._e - QMatrix.coerce(other)._e)

    def __neg__(self):
        return QMatrix(-self._e)

    def __mul__(self, scalar):
        """``M * a``: every entry multiplied by ``a`` on the right."""
        if isinstance(scalar, (int, float, np.floating, np.integer)):
            return QMatrix(self._e * scalar)
        a = Quaternion.coerce(scalar).array
        return QMatrix(qmul(self._e, a))

    def __rmul__(self, scalar):
        """``a * M``: every entry multiplied by ``a`` on the left."""
        if isinstance(scalar, (int, float, np.floating, np.integer)):
            return QMatrix(self._e * scalar)
        a = Quaternion.coerce(scalar).array
        return QMatrix(qmul(a, self._e))

    def __truediv__(self, scalar):
        return QMatrix(self._e / float(scalar))

    def allclose(self, other, atol=1e-10):
        return bool(np.max(np.abs(self._e - QMatrix.coerce(other)._e), initial=0.0) <= atol)

    def distance(self, other):
        """Max-norm (largest entry modulus) of ``self - other``."""
        return (self - other).max_norm()

    def __repr__(self):
        return f"QMatrix(n={self.n}, entries={self.to_tuples()!r})"


def _check_condition(c, s):
    cond = np.linalg.cond(c)
    if not np.isfinite(cond) or cond > COND_FAIL:
        raise SingularityError(
            f"matrix is numerically singular (condition number {cond:.3g})",
            sphere=None if s is None else sphere_of(s),
        )
    if cond > COND_WARN:
        warnings.warn(f"ill-conditioned solve (condition number {cond:.3g})", RuntimeWarning, stacklevel=3)
    return cond


# ---------------------------------------------------------------------------
# spectra
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SSpectrum:
    """A finite set of spectral spheres plus optional real segments and ``inf``.

    ``intervals`` holds closed real segments ``(a, b)`` whose every point is
    spectral (``a`` or ``b`` may be infinite).  Dense matrices never produce
    intervals; they exist for the declared closures of diagonal models.
    """

    spheres: tuple = ()
    intervals: tuple = ()
    includes_infinity: bool = False

    def __post_init__(self):
        object.__setattr__(self, "spheres", tuple(sorted(self.spheres)))
        ivs = tuple((float(a), float(b)) for a, b in self.intervals)
        for a, b in ivs:
            if not a <= b:
                raise ValueError(f"bad spectral interval ({a}, {b})")
        object.__setattr__(self, "intervals", ivs)

    def __len__(self):
        return len(self.spheres)

    def __iter__(self):
        return iter(self.spheres)

    @property
    def is_empty(self):
        return not self.spheres and not self.intervals and not self.includes_infinity

    @property
    def unbounded_along_real_axis(self):
        return any(math.isinf(a) or math.isinf(b) for a, b in self.intervals)

    def contains(self, sphere, tol=SPHERE_MERGE_TOL):
        if any(sphere.distance(s) <= tol for s in self.spheres):
            return True
        if sphere.s1 <= tol:
            return any(a - tol <= sphere.s0 <= b + tol for a, b in self.intervals)
        return False

    def distance_to(self, sphere):
        d = min((sphere.distance(s) for s in self.spheres), default=math.inf)
        for a, b in self.intervals:
            x = min(max(sphere.s0, a), b)
            d = min(d, math.hypot(sphere.s0 - x, sphere.s1))
        return d

    def hausdorff(self, other):
        """Hausdorff distance between the finite sphere sets (intervals ignored)."""
        a, b = self.spheres, other.spheres
        if not a and not b:
            return 0.0
        if not a or not b:
            return math.inf
        d_ab = max(min(x.distance(y) for y in b) for x in a)
        d_ba = max(min(x.distance(y) for y in a) for x in b)
        return max(d_ab, d_ba)

    def max_abs_real(self):
        vals = [abs(s.s0) for s in self.spheres]
        vals += [abs(v) for a, b in self.intervals for v in (a, b) if math.isfinite(v)]
        return max(vals, default=0.0)


def merge_spheres(points, tol=SPHERE_MERGE_TOL):
    """Cluster ``(s0, s1)`` pairs closer than ``tol`` and return their centroids."""
    pts = sorted((float(a), abs(float(b))) for a, b in points)
    clusters = []
    for p in pts:
        for c in clusters:
            if any(math.hypot(p[0] - q[0], p[1] - q[1]) <= tol for q in c):
                c.append(p)
                break
        else:
            clusters.append([p])
    out = []
    for c in clusters:
        s0 = sum(p[0] for p in c) / len(c)
        s1 = sum(p[1] for p in c) / len(c)
        out.append(Sphere(s0, s1))
    return tuple(sorted(out))


def s_spectrum(T, tol=SPHERE_MERGE_TOL):
    """S-spectrum of a matrix, i.e. its right-eigenvalue spheres.

    Eigenvalues of the complex adjoint come in conjugate pairs; each pair
    ``(lam, conj(lam))`` is the trace on C_I of the sphere ``(Re lam, |Im lam|)``.
    """
    T = QMatrix.coerce(T)
    try:
        lam = np.linalg.eigvals(T.adjoint())
    except np.linalg.LinAlgError as exc:
        raise SingularityError(f"eigenvalue solver failed: {exc}") from exc
    if not np.all(np.isfinite(lam)):
        raise SingularityError("eigenvalue solver returned non-finite values")
    return SSpectrum(merge_spheres([(l.real, abs(l.imag)) for l in lam], tol))


# ---------------------------------------------------------------------------
# pseudo-resolvent and S-resolvents
# ---------------------------------------------------------------------------

def qs_adjoint(c, s0, abs2):
    """Adjoint of ``Q_s(T) = T^2 - 2 s0 T + |s|^2`` for arrays of (s0, |s|^2)."""
    s0 = np.asarray(s0, dtype=float)
    abs2 = np.asarray(abs2, dtype=float)
    eye = np.eye(c.shape[-1])
    c2 = c @ c
    return c2 - 2.0 * s0[..., None, None] * c + abs2[..., None, None] * eye


def pseudo_resolvent_adjoint(c, s0, abs2, check=True):
    """Batched adjoint of ``Q_s(T)^{-1}``; ``s0`` and ``abs2`` are 1-d arrays."""
    q = qs_adjoint(c, s0, abs2)
    if check:
        cond = np.linalg.cond(q)
        bad = ~np.isfinite(cond) | (cond > COND_FAIL)
        if np.any(bad):
            k = int(np.argmax(bad))
            s1 = math.sqrt(max(float(abs2[k]) - float(s0[k]) ** 2, 0.0))
            raise SingularityError(
                f"Q_s(T) is singular at sphere ({float(s0[k]):.6g}, {s1:.6g})",
                sphere=Sphere(float(s0[k]), s1),
            )
        if np.any(cond > COND_WARN):
            warnings.warn(
                f"ill-conditioned pseudo-resolvent (condition number {np.max(cond):.3g})",
                RuntimeWarning,
                stacklevel=2,
            )
    return np.linalg.inv(q)


def pseudo_resolvent(T, s):
    """``Q_s(T)^{-1}`` for ``s`` in the S-resolvent set."""
    T = QMatrix.coerce(T)
    s = Quaternion.coerce(s)
    c = T.adjoint()
    try:
        inv = pseudo_resolvent_adjoint(c, np.array([s.w]), np.array([s.norm() ** 2]))[0]
    except SingularityError as exc:
        spec = s_spectrum(T)
        here = sphere_of(s)
        near = min(spec.spheres, key=here.distance) if spec.spheres else here
        raise SingularityError(f"{exc}; nearest spectral sphere {near}", sphere=near) from None
    return QMatrix.from_adjoint(inv)


def s_resolvent_left(T, s):
    """``S_L^{-1}(s, T) = Q_s(T)^{-1} conj(s) - T Q_s(T)^{-1}``."""
    T = QMatrix.coerce(T)
    s = Quaternion.coerce(s)
    X = pseudo_resolvent(T, s)
    return X * s.conj() - T @ X


def s_resolvent_right(T, s):
    """``S_R^{-1}(s, T) = -(T - I conj(s)) Q_s(T)^{-1}``."""
    T = QMatrix.coerce(T)
    s = Quaternion.coerce(s)
    X = pseudo_resolvent(T, s)
    return s.conj() * X - T @ X


# ---------------------------------------------------------------------------
# diagonal (entrywise) operators
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DiagonalOperator:
    """Diagonal operator given by finitely many stored symbols.

    ``closure`` is the declared closure of the spectrum.  It may be far larger
    than the spheres of the stored symbols, e.g. the whole real axis plus
    infinity for a multiplication operator with dense real symbols.
    """

    symbols: np.ndarray
    closure: SSpectrum = field(default_factory=SSpectrum)

    def __post_init__(self):
        sym = as_qarray(self.symbols)
        if sym.ndim != 2:
            raise ValueError("symbols must be a list of quaternions")
        sym = np.array(sym, dtype=float)
        sym.setflags(write=False)
        object.__setattr__(self, "symbols", sym)
        for q in sym:
            sp = sphere_of(q)
            if not self.closure.contains(sp, tol=1e-9):
                raise PreconditionError(f"symbol {tuple(q)} lies outside the declared spectrum closure")

    def __len__(self):
        return self.symbols.shape[0]

    @property
    def spectrum(self):
        return self.closure


def diag_pseudo_resolvent(D, s, tol=1e-12):
    """Entrywise ``(q^2 - 2 Re(s) q + |s|^2)^{-1}`` as an ``(m, 4)`` array."""
    s = Quaternion.coerce(s)
    here = sphere_of(s)
    if D.closure.contains(here, tol=0.0):
        raise SingularityError(f"{here} lies in the declared spectrum closure", sphere=here)
    q = D.symbols
    quad = qmul(q, q) - 2.0 * s.w * q
    quad[:, 0] += s.norm() ** 2
    mod = qabs(quad)
    if np.any(mod < tol):
        k = int(np.argmin(mod))
        raise SingularityError(f"entry {k} is singular at {here}", sphere=here)
    return qinv(quad)


def right_linear_residual(M, v, w, a):
    """``|M(v a + w) - (M v) a - M w|`` for checking right linearity."""
    M = QMatrix.coerce(M)
    a = as_qarray(a)
    lhs = M @ (qmul(v, a) + w)
    rhs = qmul(M @ v, a) + M @ w
    return float(np.max(qabs(lhs - rhs)))

