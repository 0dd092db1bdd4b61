"""Job descriptions for the command line front end.

Jobs are TOML documents.  The grammar is documented in the README; in short::

    task = "apply-left"
    seed = 7

    [operator]            # kind = "matrix" | "random" | "diagonal"
    kind = "matrix"
    n = 2
    entries = [[0, -0.5, 0, 0], [0.5, 0, 0, 0], [-0.5, 0, 0, 0], [0, -0.5, 0, 0]]

    [function]            # built-in name plus parameters
    name = "polynomial"
    coeffs = [0, 0, 1]

    [contour]
    clearance = 0.5
    nodes = 256
    unit = "I"

    [output]
    path = "report"
    tolerance = 1e-9

Quaternions are always ``[w, x, y, z]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
import math
import sys

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .errors import ConfigError
from .qlinalg import DiagonalOperator, QMatrix, SSpectrum
from .quat import ImaginaryUnit, Quaternion, Sphere, UNIT_I, UNIT_J, UNIT_K
from .regions import region_from_dict
from . import slicefn as sf

TASKS = (
    "spectrum",
    "apply-left",
    "apply-right",
    "apply-intrinsic",
    "project",
    "verify",
    "reproduce-example",
)
FUNCTION_NAMES = ("polynomial", "rational", "resolvent", "exp", "constant", "char", "locally-constant")
NEEDS_OPERATOR = {"spectrum", "apply-left", "apply-right", "apply-intrinsic", "project"}
NEEDS_FUNCTION = {"apply-left", "apply-right", "apply-intrinsic"}


@dataclass
class JobSpec:
    task: str
    operator: dict = field(default_factory=dict)
    function: dict = field(default_factory=dict)
    contour: dict = field(default_factory=dict)
    output: dict = field(default_factory=dict)
    seed: int = 0
    selected: list = field(default_factory=list)

    @property
    def nodes(self):
        return int(self.contour.get("nodes", 256))

    @property
    def clearance(self):
        return self.contour.get("clearance")

    @property
    def tolerance(self):
        default = 1e-10 if self.task == "reproduce-example" else 1e-9
        return float(self.output.get("tolerance", default))


def _line_of(text, key):
    """Best-effort line number of the first occurrence of ``key`` in ``text``."""
    for k, line in enumerate(text.splitlines(), start=1):
        if line.strip().startswith(key):
            return k
    return None


def load(path):
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read job file: {exc}") from exc
    return loads(raw.decode("utf-8"))


def loads(text):
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        lineno = getattr(exc, "lineno", None)
        raise ConfigError(f"malformed job file: {exc}", line=lineno) from exc
    return from_dict(doc, text)


def from_dict(doc, text=""):
    known = {"task", "seed", "operator", "function", "contour", "output", "selected"}
    for key in doc:
        if key not in known:
            raise ConfigError(f"unknown key {key!r}", field=key, line=_line_of(text, key))
    task = doc.get("task", "")
    job = JobSpec(
        task=task,
        operator=dict(doc.get("operator", {})),
        function=dict(doc.get("function", {})),
        contour=dict(doc.get("contour", {})),
        output=dict(doc.get("output", {})),
        seed=doc.get("seed", 0),
        selected=list(doc.get("selected", [])),
    )
    if not isinstance(job.seed, int):
        raise ConfigError("seed must be an integer", field="seed", line=_line_of(text, "seed"))
    validate(job, text)
    return job


def validate(job, text=""):
    if job.task not in TASKS:
        raise ConfigError(f"unknown task {job.task!r}; expected one of {', '.join(TASKS)}",
                          field="task", line=_line_of(text, "task"))
    if job.task in NEEDS_OPERATOR and not job.operator:
        raise ConfigError(f"task {job.task} needs an [operator] section", field="operator")
    if job.task in NEEDS_FUNCTION:
        name = job.function.get("name")
        if name is None:
            raise ConfigError(f"task {job.task} needs [function] name", field="function.name")
        if name not in FUNCTION_NAMES:
            raise ConfigError(f"unknown built-in function {name!r}", field="function.name",
                              line=_line_of(text, "name"))
    if job.task == "project" and not job.selected:
        raise ConfigError("task project needs a 'selected' list of spheres [s0, s1]", field="selected")
    nodes = job.contour.get("nodes", 256)
    if not isinstance(nodes, int) or nodes < 16:
        raise ConfigError("contour.nodes must be an integer >= 16", field="contour.nodes",
                          line=_line_of(text, "nodes"))
    c = job.contour.get("clearance")
    if c is not None and not (isinstance(c, (int, float)) and c > 0):
        raise ConfigError("contour.clearance must be positive", field="contour.clearance",
                          line=_line_of(text, "clearance"))


# ---------------------------------------------------------------------------
# builders
# ---------------------------------------------------------------------------

def parse_quaternion(value, name="value"):
    if isinstance(value, (int, float)):
        return Quaternion(float(value))
    if isinstance(value, list) and len(value) == 4 and all(isinstance(v, (int, float)) for v in value):
        return Quaternion(*(float(v) for v in value))
    raise ConfigError("quaternions must be numbers or [w, x, y, z]", field=name)


def parse_unit(value):
    if value is None:
        return UNIT_I
    if isinstance(value, str):
        named = {"I": UNIT_I, "J": UNIT_J, "K": UNIT_K}
        if value.upper() in named:
            return named[value.upper()]
        parts = value.split(",")
        if len(parts) == 3:
            try:
                return ImaginaryUnit(*(float(p) for p in parts))
            except ValueError:
                pass
        raise ConfigError(f"cannot read imaginary unit {value!r}", field="contour.unit")
    if isinstance(value, list) and len(value) == 3:
        try:
            return ImaginaryUnit(*(float(v) for v in value))
        except ValueError as exc:
            raise ConfigError(str(exc), field="contour.unit") from exc
    raise ConfigError("unit must be I, J, K or [a, b, c]", field="contour.unit")


def build_operator(spec, rng):
    kind = spec.get("kind", "matrix")
    if kind == "matrix":
        n = spec.get("n")
        entries = spec.get("entries")
        if not isinstance(n, int) or n < 1 or not isinstance(entries, list) or len(entries) != n * n:
            raise ConfigError("matrix operators need n and n*n row-major entries", field="operator.entries")
        qs = [parse_quaternion(e, "operator.entries").array for e in entries]
        return QMatrix(np.array(qs).reshape(n, n, 4))
    if kind == "random":
        n = spec.get("size", 3)
        if not isinstance(n, int) or n < 1:
            raise ConfigError("random operators need a positive integer size", field="operator.size")
        return QMatrix.random(n, rng, spec.get("scale"))
    if kind == "diagonal":
        syms = spec.get("symbols")
        if not isinstance(syms, list) or not syms:
            raise ConfigError("diagonal operators need a symbols list", field="operator.symbols")
        arr = np.array([parse_quaternion(q, "operator.symbols").array for q in syms])
        cl = spec.get("closure", {})
        spheres = tuple(Sphere(float(a), float(b)) for a, b in cl.get("spheres", []))
        intervals = tuple((_real(a), _real(b)) for a, b in cl.get("intervals", []))
        closure = SSpectrum(spheres, intervals, bool(cl.get("infinity", False)))
        try:
            return DiagonalOperator(arr, closure)
        except ValueError as exc:
            raise ConfigError(str(exc), field="operator.closure") from exc
    raise ConfigError(f"unknown operator kind {kind!r}", field="operator.kind")


def _real(v):
    if isinstance(v, str):
        if v in ("inf", "+inf"):
            return math.inf
        if v == "-inf":
            return -math.inf
        raise ConfigError(f"cannot read {v!r} as a real number", field="operator.closure")
    return float(v)


def build_regions(spec):
    try:
        return [region_from_dict(d) for d in spec]
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad region description: {exc}", field="contour.regions") from exc


def build_function(spec, domain=None):
    name = spec.get("name")
    chir = spec.get("chirality", "left")
    if chir not in ("left", "right"):
        raise ConfigError("chirality must be left or right", field="function.chirality")
    try:
        if name == "polynomial":
            return sf.polynomial(spec.get("coeffs", [0.0, 1.0]), spec.get("radius", 1e3))
        if name == "rational":
            return sf.rational(spec["numerator"], spec["denominator"])
        if name == "resolvent":
            return sf.resolvent_function(float(spec["a"]))
        if name == "exp":
            return sf.exp_function(spec.get("radius", 50.0))
        if name == "constant":
            return sf.constant(parse_quaternion(spec.get("value", 1.0), "function.value"), chirality=chir)
        if name in ("char", "locally-constant"):
            if domain is None:
                raise ConfigError(f"{name} needs explicit contour.regions", field="contour.regions")
            if name == "char":
                return sf.char_function(domain, spec.get("components", []))
            values = [parse_quaternion(v, "function.values") for v in spec.get("values", [])]
            if len(values) != len(domain.regions):
                raise ConfigError("one value per domain component is required", field="function.values")
            finf = spec.get("value_at_infinity")
            finf = None if finf is None else parse_quaternion(finf, "function.value_at_infinity")
            return sf.locally_constant(domain.regions, values, chir, finf)
    except KeyError as exc:
        raise ConfigError(f"missing parameter {exc.args[0]!r}", field=f"function.{exc.args[0]}") from exc
    raise ConfigError(f"unknown built-in function {name!r}", field="function.name")
