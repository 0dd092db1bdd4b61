"""A 2x2 operator whose left and right calculi disagree on a locally constant function.

``T = 1/2 [[-I, 1], [-1, -I]]`` has S-spectrum ``{0}`` together with the
unit sphere.  The spectral set ``{0}`` is surrounded by ``B_{1/2}(0)`` and
the unit sphere by the annulus ``2/3 < |x| < 2``.  The function equal to
``J`` near 0 and to 0 near the unit sphere is both left and right slice
hyperholomorphic on this domain, yet its left and right calculi differ.
"""

from __future__ import annotations

from .contour import SliceCauchyDomain
from .qlinalg import QMatrix
from .quat import I, J, K, ONE, Quaternion, Sphere
from .regions import Annulus, Disk


def operator():
    return QMatrix.from_rows([[-I * 0.5, ONE * 0.5], [-ONE * 0.5, -I * 0.5]])


def domain():
    """Components ``B_{1/2}(0)`` (index 0) and the annulus ``2/3 < |x| < 2`` (index 1)."""
    return SliceCauchyDomain.from_regions([Disk(0.0, 0.0, 0.5), Annulus(0.0, 0.0, 2.0 / 3.0, 2.0)])


SPECTRUM = (Sphere(0.0, 0.0), Sphere(0.0, 1.0))


def _half(rows):
    return QMatrix.from_rows([[Quaternion.coerce(x) * 0.5 for x in row] for row in rows])


PROJECTION_ZERO = _half([[ONE, -I], [I, ONE]])
PROJECTION_SPHERE = _half([[ONE, I], [-I, ONE]])
LEFT_J_CHI = _half([[J, -K], [K, J]])
RIGHT_J_CHI = _half([[J, K], [-K, J]])
SQUARE = _half([[-ONE, -I], [I, -ONE]])


def pseudo_resolvent_closed_form(s):
    """``Q_s(T)^{-1}`` from its closed form, for ``s`` off the spectrum."""
    s = Quaternion.coerce(s)
    s0 = s.w
    a2 = s.norm() ** 2
    factor = (Quaternion(-1.0 + a2) + I * (2.0 * s0)).inv() * (1.0 / a2)
    diag = Quaternion(-0.5 + a2) + I * s0
    off = I * 0.5 + s0
    M = QMatrix.from_rows([[diag, off], [-off, diag]])
    return factor * M

