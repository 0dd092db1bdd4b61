"""Command line front end: ``sfcalc TASK [--input job.toml] [--output stem] ...``.

Every run prints a text report.  With ``--output stem`` the same content is
written to ``stem.txt`` and, as JSON with sorted keys, to ``stem.json``.
The exit status is 0 when every check passed, 1 when a check failed and 2
for unusable input.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import calculus as calc
from . import config as cfg
from . import example as ex
from . import slicefn as sf
from .contour import SliceCauchyDomain, enclose
from .errors import ConfigError, SFCalcError
from .qlinalg import DiagonalOperator, QMatrix, SSpectrum, s_spectrum
from .quat import Sphere, qabs, qmul
from .regions import Disk, Exterior


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def _clean(obj):
    """Make ``obj`` JSON friendly: numpy to Python, non-finite floats to strings."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, QMatrix):
        return {"n": obj.n, "entries": [list(map(float, q)) for q in obj.entries.reshape(-1, 4)]}
    if isinstance(obj, Sphere):
        return [_clean(obj.s0), _clean(obj.s1)]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def _fmt_q(q):
    return "[" + ", ".join(f"{float(v): .12g}" for v in q) + "]"


def _text(report):
    lines = [f"task: {report['task']}", f"seed: {report['seed']}"]
    for key in sorted(report.get("results", {})):
        val = report["results"][key]
        if isinstance(val, dict) and "entries" in val and "n" in val:
            n = val["n"]
            lines.append(f"{key}:")
            for i in range(n):
                row = val["entries"][i * n:(i + 1) * n]
                lines.append("  " + "  ".join(_fmt_q(q) for q in row))
        elif isinstance(val, list) and val and isinstance(val[0], list):
            lines.append(f"{key}:")
            for item in val:
                lines.append("  " + (_fmt_q(item) if len(item) == 4 else str(item)))
        else:
            lines.append(f"{key}: {val}")
    if report.get("checks"):
        lines.append("checks:")
        width = max(len(c["name"]) for c in report["checks"])
        for c in report["checks"]:
            flag = "PASS" if c["passed"] else "FAIL"
            lines.append(f"  {flag}  {c['name']:<{width}}  residual {c['residual']:.3e}  tol {c['tolerance']:.1e}")
    lines.append(f"status: {'PASS' if report['passed'] else 'FAIL'}")
    return "\n".join(lines) + "\n"


def write_report(report, stem):
    with open(f"{stem}.json", "w") as fh:
        json.dump(report, fh, sort_keys=True, indent=2)
        fh.write("\n")
    with open(f"{stem}.txt", "w") as fh:
        fh.write(_text(report))


# ---------------------------------------------------------------------------
# task helpers
# ---------------------------------------------------------------------------

def _check(name, residual, tol):
    return {"name": name, "residual": float(residual), "tolerance": float(tol), "passed": bool(residual < tol)}


def _avoid_regions(f):
    out = []
    for comp in f.components:
        if isinstance(comp.region, Exterior):
            out.extend(Disk(c0, c1, r) for c0, c1, r in comp.region.holes)
    return out


def _domain(job, T, f=None):
    if "regions" in job.contour:
        return SliceCauchyDomain.from_regions(cfg.build_regions(job.contour["regions"]))
    spec = T.closure if isinstance(T, DiagonalOperator) else s_spectrum(T)
    avoid = _avoid_regions(f) if f is not None else ()
    clearance = job.clearance
    if clearance is None:
        if isinstance(T, DiagonalOperator):
            clearance = 0.5
        else:
            return calc.default_domain(T, avoid=avoid)
    return enclose(spec, float(clearance), avoid=avoid, truncation=job.contour.get("truncation"))


def _spectrum_dict(spec):
    return {
        "spheres": [[s.s0, s.s1] for s in spec.spheres],
        "intervals": [list(iv) for iv in spec.intervals],
        "includes_infinity": spec.includes_infinity,
    }


def _task_spectrum(job, T, unit):
    spec = T.closure if isinstance(T, DiagonalOperator) else s_spectrum(T)
    return {"spectrum": _spectrum_dict(spec)}, []


def _task_apply(job, T, unit):
    method = job.task.split("-", 1)[1]
    fdom = None
    if job.function.get("name") in ("char", "locally-constant"):
        fdom = SliceCauchyDomain.from_regions(cfg.build_regions(job.contour.get("regions", [])))
    f = cfg.build_function(job.function, fdom)
    dom = fdom or _domain(job, T, f)
    apply = {"left": calc.apply_left, "right": calc.apply_right, "intrinsic": calc.apply_intrinsic}[method]
    res = apply(f, T, dom, unit, job.nodes)
    checks = [_check("quadrature_error_estimate", res.estimated_error, job.tolerance)]
    if "agreement_left" in res.diagnostics:
        tol = max(job.tolerance, calc.verification_tolerance(res))
        checks.append(_check("intrinsic_agrees_with_left", res.diagnostics["agreement_left"], tol))
        checks.append(_check("intrinsic_agrees_with_right", res.diagnostics["agreement_right"], tol))
    results = {"operator": res.operator, "diagnostics": res.diagnostics}
    if isinstance(T, DiagonalOperator):
        direct = f.evaluate(T.symbols)
        err = float(np.max(qabs(res.operator - direct)))
        checks.append(_check("entrywise_direct_evaluation", err, max(job.tolerance, 1e-6)))
    return results, checks


def _task_project(job, T, unit):
    if isinstance(T, DiagonalOperator):
        raise ConfigError("project needs a matrix operator", field="operator.kind")
    selected = [Sphere(float(a), float(b)) for a, b in job.selected]
    clearance = float(job.clearance) if job.clearance is not None else 0.5
    dom = None
    if "regions" in job.contour:
        dom = SliceCauchyDomain.from_regions(cfg.build_regions(job.contour["regions"]))
    res = calc.spectral_projection(T, selected, clearance, unit, job.nodes, domain=dom)
    E = res.operator
    tol = max(job.tolerance, calc.verification_tolerance(res))
    checks = [
        _check("idempotent", (E @ E).distance(E), tol),
        _check("commutes_with_T", (E @ T).distance(T @ E), tol),
    ]
    Ts, basis = calc.restrict(T, E)
    restricted = s_spectrum(Ts) if Ts.n else None
    picked = SSpectrum(tuple(s for s in s_spectrum(T).spheres if any(s.distance(t) < 1e-6 for t in selected)))
    if restricted is not None:
        checks.append(_check("restricted_spectrum", restricted.hausdorff(picked), 1e-8))
    results = {
        "projection": E,
        "restricted_operator": Ts,
        "restricted_spectrum": _spectrum_dict(restricted) if restricted else None,
        "diagnostics": res.diagnostics,
    }
    return results, checks


def _task_verify(job, T, unit):
    if isinstance(T, DiagonalOperator):
        return _verify_diagonal(job, T, unit)
    rng = np.random.default_rng(job.seed)
    rep = calc.verify_identities(T, rng=rng, unit=unit, nodes=job.nodes, clearance=job.clearance)
    return {"spectrum": _spectrum_dict(s_spectrum(T))}, rep["checks"]


def _verify_diagonal(job, D, unit):
    """Entrywise checks for a diagonal model with ``f = (s^2 + 1)^{-1}``."""
    f = sf.rational((1.0,), (1.0, 0.0, 1.0))
    dom = _domain(job, D, f)
    res = calc.apply_intrinsic(f, D, dom, unit, job.nodes)
    direct = f.evaluate(D.symbols)
    checks = [_check("entrywise_direct_evaluation", float(np.max(qabs(res.operator - direct))),
                     max(job.tolerance, 1e-6))]
    # (P f)(T) = P(T) f(T) with P(s) = s, entrywise
    g = sf.rational((0.0, 1.0), (1.0, 0.0, 1.0))
    pf = calc.apply_intrinsic(g, D, dom, unit, job.nodes)
    checks.append(_check("polynomial_product", float(np.max(qabs(pf.operator - qmul(D.symbols, res.operator)))),
                         max(job.tolerance, 1e-6)))
    return {"operator": res.operator, "diagnostics": res.diagnostics}, checks


def _task_reproduce(job, unit):
    T = ex.operator()
    tol = job.tolerance
    dom = ex.domain()
    spec = s_spectrum(T)
    ref = SSpectrum(ex.SPECTRUM)
    E0 = calc.apply_intrinsic(sf.char_function(dom, [0]), T, dom, unit, job.nodes)
    ES = calc.apply_intrinsic(sf.char_function(dom, [1]), T, dom, unit, job.nodes)
    fJ = sf.locally_constant(dom.regions, [ex.J, 0.0], value_at_infinity=0.0)
    left = calc.apply_left(fJ, T, dom, unit, job.nodes)
    right = calc.apply_right(fJ, T, dom, unit, job.nodes)
    checks = [
        _check("spectrum", spec.hausdorff(ref), tol),
        _check("projection_zero", E0.operator.distance(ex.PROJECTION_ZERO), tol),
        _check("projection_sphere", ES.operator.distance(ex.PROJECTION_SPHERE), tol),
        _check("left_calculus_J_chi", left.operator.distance(ex.LEFT_J_CHI), tol),
        _check("right_calculus_J_chi", right.operator.distance(ex.RIGHT_J_CHI), tol),
        _check("square", calc.poly_apply(sf.IntrinsicPolynomial((0.0, 0.0, 1.0)), T).distance(ex.SQUARE), tol),
    ]
    diff = left.operator - right.operator
    mags = qabs(diff.entries)
    smallest = float(np.min(mags[mags > 0.5])) if np.any(mags > 0.5) else 0.0
    checks.append(_check("left_right_discrepancy", abs(smallest - 1.0), tol))
    results = {
        "operator": T,
        "spectrum": _spectrum_dict(spec),
        "projection_zero": E0.operator,
        "projection_sphere": ES.operator,
        "left_J_chi": left.operator,
        "right_J_chi": right.operator,
        "domain": dom.describe(),
        "estimated_error": max(E0.estimated_error, ES.estimated_error, left.estimated_error,
                               right.estimated_error),
    }
    return results, checks


TASK_RUNNERS = {
    "spectrum": _task_spectrum,
    "apply-left": _task_apply,
    "apply-right": _task_apply,
    "apply-intrinsic": _task_apply,
    "project": _task_project,
    "verify": _task_verify,
}


def run(job):
    """Execute a job; returns ``(exit_status, report_dict)``."""
    unit = cfg.parse_unit(job.contour.get("unit"))
    rng = np.random.default_rng(job.seed)
    inputs = {"operator": job.operator, "function": job.function, "contour": job.contour,
              "selected": job.selected, "nodes": job.nodes, "tolerance": job.tolerance}
    if job.task == "reproduce-example":
        results, checks = _task_reproduce(job, unit)
    else:
        op_spec = job.operator or {"kind": "random", "size": 3}
        T = cfg.build_operator(op_spec, rng)
        if isinstance(T, QMatrix):
            inputs["operator_matrix"] = T
        results, checks = TASK_RUNNERS[job.task](job, T, unit)
    passed = all(c["passed"] for c in checks)
    report = _clean({
        "task": job.task,
        "seed": job.seed,
        "inputs": inputs,
        "results": results,
        "checks": checks,
        "passed": passed,
    })
    return (0 if passed else 1), report


def build_parser():
    p = argparse.ArgumentParser(prog="sfcalc", description="Quaternionic S-functional calculus jobs.")
    p.add_argument("task", nargs="?", choices=cfg.TASKS, help="task to run (overrides the job file)")
    p.add_argument("--input", "-i", help="TOML job file")
    p.add_argument("--output", "-o", help="report stem; writes STEM.json and STEM.txt")
    p.add_argument("--nodes", type=int, help="quadrature nodes per boundary curve")
    p.add_argument("--clearance", type=float, help="margin around spectral spheres")
    p.add_argument("--tolerance", type=float, help="pass/fail tolerance for checks")
    p.add_argument("--seed", type=int, help="seed for random operators and test points")
    p.add_argument("--unit", help="imaginary unit of the integration slice: I, J, K or a,b,c")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.input:
            job = cfg.load(args.input)
        else:
            job = cfg.JobSpec(task=args.task or "")
        if args.task:
            job.task = args.task
        if args.nodes is not None:
            job.contour["nodes"] = args.nodes
        if args.clearance is not None:
            job.contour["clearance"] = args.clearance
        if args.unit is not None:
            job.contour["unit"] = args.unit
        if args.tolerance is not None:
            job.output["tolerance"] = args.tolerance
        if args.seed is not None:
            job.seed = args.seed
        if not job.task and not args.input:
            raise ConfigError("no task given", field="task")
        if job.task in ("verify",) and not job.operator:
            job.operator = {"kind": "random", "size": 3}
        cfg.validate(job)
        status, report = run(job)
    except ConfigError as exc:
        print(f"sfcalc: {exc}", file=sys.stderr)
        return 2
    except SFCalcError as exc:
        print(f"sfcalc: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    stem = args.output or job.output.get("path")
    if stem:
        write_report(report, stem)
    sys.stdout.write(_text(report))
    return status


if __name__ == "__main__":
    sys.exit(main())
