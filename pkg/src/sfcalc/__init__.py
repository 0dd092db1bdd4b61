"""Quaternionic S-functional calculus for matrices and diagonal models."""

from .errors import (
    ConfigError,
    ConstructionError,
    DomainError,
    NotSplittableError,
    PreconditionError,
    SFCalcError,
    SingularityError,
)
from .quat import I, J, K, ONE, UNIT_I, UNIT_J, UNIT_K, ImaginaryUnit, Quaternion, Sphere, slice_embed, sphere_of
from .qlinalg import (
    DiagonalOperator,
    QMatrix,
    SSpectrum,
    complex_adjoint,
    diag_pseudo_resolvent,
    pseudo_resolvent,
    s_resolvent_left,
    s_resolvent_right,
    s_spectrum,
)
from .slicefn import (
    Chirality,
    IntrinsicPolynomial,
    SliceFunction,
    cauchy_kernel_left,
    cauchy_kernel_right,
    char_function,
    extend_from_slice,
    is_intrinsic,
    split_left_right,
)
from .contour import QuadratureRule, SliceCauchyDomain, contains, enclose, quadrature
from .calculus import (
    CalcResult,
    apply_intrinsic,
    apply_left,
    apply_right,
    poly_apply,
    restrict,
    spectral_projection,
    verify_identities,
)

__version__ = "0.1.0"
