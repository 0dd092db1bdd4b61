"""Quaternion arithmetic, imaginary units, spheres and slice embeddings.

Quaternions are written ``w + x I + y J + z K`` with ``K = I J``.  Two
representations coexist:

* :class:`Quaternion`, an immutable scalar with operator overloading, and
* plain ``numpy`` arrays whose last axis has length 4, used by everything
  that works on many quaternions at once (matrices, quadrature nodes).

The array functions (:func:`qmul`, :func:`qconj`, :func:`qinv`, ...) are the
workhorses; the class is a thin convenience layer over them.
"""

from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np

DEFAULT_ATOL = 1e-12


# ---------------------------------------------------------------------------
# array level
# ---------------------------------------------------------------------------

def qmul(a, b):
    """Hamilton product of quaternion arrays, broadcasting over leading axes."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    aw, ax, ay, az = a[..., 0], a[..., 1], a[..., 2], a[..., 3]
    bw, bx, by, bz = b[..., 0], b[..., 1], b[..., 2], b[..., 3]
    return np.stack(
        [
            aw * bw - ax * bx - ay * by - az * bz,
            aw * bx + ax * bw + ay * bz - az * by,
            aw * by - ax * bz + ay * bw + az * bx,
            aw * bz + ax * by - ay * bx + az * bw,
        ],
        axis=-1,
    )


def qconj(a):
    a = np.asarray(a, dtype=float)
    return a * np.array([1.0, -1.0, -1.0, -1.0])


def qabs2(a):
    a = np.asarray(a, dtype=float)
    return np.sum(a * a, axis=-1)


def qabs(a):
    return np.sqrt(qabs2(a))


def qinv(a):
    """Inverse ``conj(a) / |a|^2``; zero entries give ``inf``/``nan``."""
    a = np.asarray(a, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        return qconj(a) / qabs2(a)[..., None]


def qreal(a):
    return np.asarray(a, dtype=float)[..., 0]


def qvec_norm(a):
    """Modulus of the vector (imaginary) part."""
    v = np.asarray(a, dtype=float)[..., 1:]
    return np.sqrt(np.sum(v * v, axis=-1))


def as_qarray(value):
    """Coerce reals, 4-sequences, Quaternions or arrays into a ``(..., 4)`` array.

    A real array of shape ``S`` becomes ``S + (4,)`` with zero vector part.
    """
    if isinstance(value, Quaternion):
        return value.array
    arr = np.asarray(value, dtype=float)
    if arr.ndim >= 1 and arr.shape[-1] == 4 and not np.isscalar(value):
        return arr
    out = np.zeros(arr.shape + (4,))
    out[..., 0] = arr
    return out


def real_to_q(arr):
    """Lift a real array of shape ``S`` to quaternions of shape ``S + (4,)``."""
    arr = np.asarray(arr, dtype=float)
    out = np.zeros(arr.shape + (4,))
    out[..., 0] = arr
    return out


def embed_complex(z, unit):
    """Map complex numbers ``a + ib`` to quaternions ``a + u b`` in the slice C_u."""
    u = unit.vector if isinstance(unit, ImaginaryUnit) else np.asarray(unit, float)
    z = np.asarray(z, dtype=complex)
    out = np.empty(z.shape + (4,))
    out[..., 0] = z.real
    out[..., 1:] = z.imag[..., None] * u
    return out


def project_complex(q, unit):
    """Inverse of :func:`embed_complex` for quaternions lying in C_u.

    Components orthogonal to ``u`` are discarded; callers that care check
    them with :func:`slice_residual`.
    """
    u = unit.vector if isinstance(unit, ImaginaryUnit) else np.asarray(unit, float)
    q = np.asarray(q, dtype=float)
    return q[..., 0] + 1j * (q[..., 1:] @ u)


def slice_residual(q, unit):
    """Size of the part of ``q`` lying outside the slice C_u."""
    u = unit.vector if isinstance(unit, ImaginaryUnit) else np.asarray(unit, float)
    q = np.asarray(q, dtype=float)
    v = q[..., 1:]
    along = (v @ u)[..., None] * u
    return np.sqrt(np.sum((v - along) ** 2, axis=-1))


def imaginary_unit_of(q):
    """Array version of ``I_x``: the unit of the vector part, global I if zero."""
    q = np.asarray(q, dtype=float)
    v = q[..., 1:]
    n = np.sqrt(np.sum(v * v, axis=-1))
    out = np.zeros(v.shape)
    out[..., 0] = 1.0
    nz = n > 0
    out[nz] = v[nz] / n[nz][..., None]
    return out


# ---------------------------------------------------------------------------
# scalar types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Quaternion:
    """Immutable quaternion ``w + x I + y J + z K``."""

    w: float = 0.0
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0

    @classmethod
    def from_array(cls, arr):
        arr = np.asarray(arr, dtype=float).reshape(4)
        return cls(float(arr[0]), float(arr[1]), float(arr[2]), float(arr[3]))

    @classmethod
    def coerce(cls, value):
        if isinstance(value, Quaternion):
            return value
        if isinstance(value, ImaginaryUnit):
            return value.quaternion
        if np.isscalar(value):
            return cls(float(value))
        return cls.from_array(value)

    @property
    def array(self):
        return np.array([self.w, self.x, self.y, self.z])

    def as_tuple(self):
        return (self.w, self.x, self.y, self.z)

    @property
    def real(self):
        return self.w

    @property
    def vector(self):
        return Quaternion(0.0, self.x, self.y, self.z)

    def conj(self):
        return Quaternion(self.w, -self.x, -self.y, -self.z)

    def norm(self):
        return math.sqrt(self.w ** 2 + self.x ** 2 + self.y ** 2 + self.z ** 2)

    __abs__ = norm

    def inv(self):
        n2 = self.w ** 2 + self.x ** 2 + self.y ** 2 + self.z ** 2
        if n2 == 0.0:
            raise ZeroDivisionError("quaternion inverse of zero")
        return Quaternion(self.w / n2, -self.x / n2, -self.y / n2, -self.z / n2)

    def unit(self):
        """``I_x``; for real quaternions the global unit I is returned."""
        return ImaginaryUnit.from_vector((self.x, self.y, self.z), default=UNIT_I)

    def sphere(self):
        return sphere_of(self)

    def isclose(self, other, atol=DEFAULT_ATOL):
        other = Quaternion.coerce(other)
        return bool(np.all(np.abs(self.array - other.array) <= atol))

    def __add__(self, other):
        if isinstance(other, (int, float, np.floating, np.integer)):
            return Quaternion(self.w + other, self.x, self.y, self.z)
        o = Quaternion.coerce(other)
        return Quaternion(self.w + o.w, self.x + o.x, self.y + o.y, self.z + o.z)

    __radd__ = __add__

    def __neg__(self):
        return Quaternion(-self.w, -self.x, -self.y, -self.z)

    def __sub__(self, other):
        return self + (-Quaternion.coerce(other))

    def __rsub__(self, other):
        return Quaternion.coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, float, np.floating, np.integer)):
            return Quaternion(self.w * other, self.x * other, self.y * other, self.z * other)
        if not isinstance(other, (Quaternion, ImaginaryUnit)):
            return NotImplemented
        return Quaternion.from_array(qmul(self.array, Quaternion.coerce(other).array))

    def __rmul__(self, other):
        if isinstance(other, (int, float, np.floating, np.integer)):
            return self * other
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, (int, float, np.floating, np.integer)):
            return self * (1.0 / other)
        return self * Quaternion.coerce(other).inv()

    def __pow__(self, k):
        if not isinstance(k, int) or k < 0:
            raise ValueError("only non-negative integer powers are supported")
        out = Quaternion(1.0)
        for _ in range(k):
            out = out * self
        return out

    def __repr__(self):
        return f"Quaternion({self.w!r}, {self.x!r}, {self.y!r}, {self.z!r})"


@dataclass(frozen=True)
class ImaginaryUnit:
    """Purely imaginary unit quaternion ``a I + b J + c K``; normalised on creation."""

    a: float
    b: float
    c: float

    def __post_init__(self):
        n = math.sqrt(self.a ** 2 + self.b ** 2 + self.c ** 2)
        if not n > 0 or not math.isfinite(n):
            raise ValueError("imaginary unit needs a nonzero finite vector")
        object.__setattr__(self, "a", self.a / n)
        object.__setattr__(self, "b", self.b / n)
        object.__setattr__(self, "c", self.c / n)

    @classmethod
    def from_vector(cls, v, default=None):
        v = np.asarray(v, dtype=float)
        if not np.any(v) and default is not None:
            return default
        return cls(float(v[0]), float(v[1]), float(v[2]))

    @classmethod
    def random(cls, rng):
        while True:
            v = rng.standard_normal(3)
            if np.linalg.norm(v) > 1e-6:
                return cls.from_vector(v)

    @property
    def vector(self):
        return np.array([self.a, self.b, self.c])

    @property
    def quaternion(self):
        return Quaternion(0.0, self.a, self.b, self.c)

    def __mul__(self, other):
        return self.quaternion * other

    def __rmul__(self, other):
        return Quaternion.coerce(other) * self.quaternion

    def __neg__(self):
        return ImaginaryUnit(-self.a, -self.b, -self.c)


UNIT_I = ImaginaryUnit(1.0, 0.0, 0.0)
UNIT_J = ImaginaryUnit(0.0, 1.0, 0.0)
UNIT_K = ImaginaryUnit(0.0, 0.0, 1.0)

ONE = Quaternion(1.0)
I = Quaternion(0.0, 1.0)
J = Quaternion(0.0, 0.0, 1.0)
K = Quaternion(0.0, 0.0, 0.0, 1.0)


@dataclass(frozen=True, order=True)
class Sphere:
    """The sphere ``[s0 + I s1]``; ``s1 == 0`` is a single real point."""

    s0: float
    s1: float

    def __post_init__(self):
        if self.s1 < 0:
            if self.s1 > -DEFAULT_ATOL:
                object.__setattr__(self, "s1", 0.0)
            else:
                raise ValueError(f"sphere radius must be nonnegative, got {self.s1}")

    @property
    def is_real(self):
        return self.s1 == 0.0

    def distance(self, other):
        """Distance between the representatives in the closed upper half-plane."""
        return math.hypot(self.s0 - other.s0, self.s1 - other.s1)

    def as_complex(self):
        return complex(self.s0, self.s1)


def sphere_of(x):
    """``[x]`` as ``(Re x, |Im x|)``."""
    x = Quaternion.coerce(x)
    return Sphere(x.w, math.sqrt(x.x ** 2 + x.y ** 2 + x.z ** 2))


def slice_embed(s, u):
    """The point ``s0 + u s1`` of the sphere ``s`` on the slice C_u."""
    u = u if isinstance(u, ImaginaryUnit) else ImaginaryUnit.from_vector(Quaternion.coerce(u).array[1:])
    return Quaternion(s.s0, s.s1 * u.a, s.s1 * u.b, s.s1 * u.c)
