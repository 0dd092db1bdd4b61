import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sfcalc.contour import SliceCauchyDomain, contains, enclose
from sfcalc.errors import ConstructionError
from sfcalc.qlinalg import SSpectrum
from sfcalc.quat import J, K, ONE, UNIT_I, ImaginaryUnit, Sphere
from sfcalc.regions import Annulus, Disk, Exterior, Rect, Tube, gap

from conftest import units


def full_rule(regions, n=256, unit=UNIT_I):
    return SliceCauchyDomain.from_regions(regions).quadrature(unit, n).full()


def contour_integral(rule, g):
    return np.sum(g(rule.z) * rule.dz)


# -- quadrature -----------------------------------------------------------------

def test_calibration_on_disk():
    rule = full_rule([Disk(0.0, 0.0, 1.0)])
    assert abs(contour_integral(rule, lambda z: 1 / z) - 2j * math.pi) < 1e-13
    assert abs(contour_integral(rule, lambda z: z)) < 1e-13


@pytest.mark.parametrize("region", [
    Disk(0.3, 1.0, 0.5),
    Disk(-1.0, 0.0, 2.0),
    Annulus(0.0, 0.0, 1.0, 3.0),
    Rect(-1.0, 2.0, 0.5),
])
def test_cauchy_integral_of_exp_inside(region):
    rule = full_rule([region], 256)
    x0, x1 = region.probe()
    for p in (complex(x0, x1), complex(x0, -x1)):
        val = contour_integral(rule, lambda z: np.exp(z) / (z - p)) / (2j * math.pi)
        assert abs(val - np.exp(p)) < 1e-10


def test_annulus_winding():
    rule = full_rule([Annulus(0.0, 0.0, 1.0, 3.0)])
    assert abs(contour_integral(rule, lambda z: 1 / (z - 2.0)) / (2j * math.pi) - 1) < 1e-12
    # the hole is outside the region
    assert abs(contour_integral(rule, lambda z: 1 / z)) < 1e-12


def test_tube_boundary_winds_negatively_around_the_hole():
    rule = full_rule([Tube(0.5, 10.0)], 256)
    assert abs(contour_integral(rule, lambda z: 1 / (z - 3j)) / (2j * math.pi) + 1) < 1e-12
    # a point inside the tube is not enclosed by the upper and lower loops
    assert abs(contour_integral(rule, lambda z: 1 / (z - 0.1j))) < 1e-9


def test_reflection_symmetry():
    rule = SliceCauchyDomain.from_regions([Disk(0.0, 1.0, 0.5), Rect(-1, 1, 0.2)]).quadrature(UNIT_I, 64)
    full = rule.full()
    n = len(rule)
    assert np.allclose(full.z[n:], np.conj(full.z[:n]))
    assert np.allclose(full.dz[n:], -np.conj(full.dz[:n]))


def test_weights_embed_minus_i_dz():
    unit = ImaginaryUnit(1.0, 1.0, 0.0)
    rule = SliceCauchyDomain.from_regions([Disk(0, 0, 1.0)]).quadrature(unit, 32)
    w = rule.weights
    assert np.allclose(w[:, 0], np.imag(rule.dz))
    assert np.allclose(w[:, 1:], -np.real(rule.dz)[:, None] * unit.vector)


def test_doubling_converges():
    p = 0.45
    errs = []
    for n in (16, 32, 64):
        rule = full_rule([Disk(0.0, 0.0, 0.5)], n)
        errs.append(abs(contour_integral(rule, lambda z: 1 / (z - p)) / (2j * math.pi) - 1))
    assert errs[1] < errs[0] * 0.1 and errs[2] < max(errs[1] * 0.1, 1e-13)


def test_too_few_nodes():
    with pytest.raises(ValueError):
        SliceCauchyDomain.from_regions([Disk(0, 0, 1.0)]).quadrature(UNIT_I, 8)


@given(units())
def test_orientation_self_test(u):
    dom = SliceCauchyDomain.from_regions([Disk(0.0, 0.0, 0.5), Annulus(0.0, 0.0, 2 / 3, 2.0)])
    assert np.allclose(dom.orientation_check(u, 128), 1.0, atol=1e-12)
    dom = SliceCauchyDomain.from_regions([Disk(0.0, 3.0, 0.5), Tube(0.2, 40.0)])
    assert np.allclose(dom.orientation_check(u, 256), 1.0, atol=1e-12)


# -- membership ------------------------------------------------------------------

def test_contains():
    dom = SliceCauchyDomain.from_regions([Tube(0.5, 10.0)])
    assert contains(dom, ONE * 3.0 + K * 0.2)
    assert not contains(dom, ONE * 3.0 + J * 2.0)
    assert contains(dom, J * 20.0)
    dom = SliceCauchyDomain.from_regions([Disk(0, 0, 0.5), Annulus(0, 0, 2 / 3, 2.0)])
    assert dom.component_of(0.0, 1.0) == 1
    assert dom.component_of(0.1, 0.0) == 0
    assert dom.component_of(0.0, 0.6) == -1
    assert dom.contains(Sphere(0.0, 1.0))


def test_overlapping_components_rejected():
    with pytest.raises(ConstructionError):
        SliceCauchyDomain.from_regions([Disk(0, 0, 1.0), Disk(0.5, 0, 1.0)])


# -- enclose ------------------------------------------------------------------------

def test_enclose_cex_pattern():
    spec = SSpectrum((Sphere(0.0, 0.0), Sphere(0.0, 1.0)))
    dom = enclose(spec, 0.5)
    assert len(dom.components) == 2
    assert dom.regions[0] == Disk(0.0, 0.0, 0.45)
    assert dom.regions[1] == Disk(0.0, 1.0, 0.45)
    assert dom.meta["margin"] == pytest.approx(0.45)
    assert gap(dom.regions[0], dom.regions[1]) > 0


def test_enclose_empty_spectrum():
    with pytest.raises(ConstructionError):
        enclose(SSpectrum(()), 0.5)


def test_enclose_rejects_nonpositive_clearance():
    with pytest.raises(ConstructionError):
        enclose(SSpectrum((Sphere(0, 0),)), 0.0)


def test_enclose_dense_real_closure(rng):
    spec = SSpectrum((), ((-math.inf, math.inf),), True)
    dom = enclose(spec, 0.5)
    assert dom.unbounded and isinstance(dom.regions[-1], Tube)
    for x in rng.uniform(-1e3, 1e3, 50):
        assert dom.contains(Sphere(float(x), 0.0))
    assert dom.orientation_check()[-1] == pytest.approx(1.0, abs=1e-12)


def test_enclose_mixed_spectrum():
    spec = SSpectrum((Sphere(1.0, 3.0), Sphere(0.5, 0.1)), ((-5.0, 5.0),), True)
    dom = enclose(spec, 0.5)
    for s in spec.spheres:
        assert dom.contains(s)
    assert dom.contains(Sphere(-4.9, 0.0))
    assert np.allclose(dom.orientation_check(), 1.0, atol=1e-10)


@given(st.lists(st.tuples(st.floats(-3, 3), st.floats(0, 3)), min_size=1, max_size=6),
       st.floats(0.05, 1.0))
def test_enclose_contains_spectrum_and_separates(pts, clearance):
    spheres = tuple(Sphere(a, b) for a, b in pts)
    spec = SSpectrum(spheres)
    try:
        dom = enclose(spec, clearance)
    except ConstructionError as exc:
        assert "coincide" in str(exc)
        return
    margin = dom.meta["margin"]
    for s in spheres:
        k = dom.component_of(s.s0, s.s1)
        assert k >= 0
        # every spectral point is at least the margin away from the boundary
        ang = np.linspace(0, 2 * np.pi, 16)
        ring0 = s.s0 + 0.99 * margin * np.cos(ang)
        ring1 = s.s1 + 0.99 * margin * np.sin(ang)
        assert np.all(dom.regions[k].contains(ring0, ring1))
    for i, a in enumerate(dom.regions):
        for b in dom.regions[i + 1:]:
            assert gap(a, b) > 0
    assert np.allclose(dom.orientation_check(), 1.0, atol=1e-9)


def test_enclose_avoid():
    spec = SSpectrum((Sphere(0.0, 0.0), Sphere(0.0, 1.0)))
    dom = enclose(spec, 0.2, avoid=[Disk(3.0, 0.0, 0.1)])
    assert not dom.contains(Sphere(3.0, 0.0))
    with pytest.raises(ConstructionError):
        enclose(spec, 0.5, avoid=Disk(0.0, 0.0, 0.1))


def test_describe_is_json_like():
    dom = enclose(SSpectrum((Sphere(1.0, 0.0),)), 0.3)
    d = dom.describe()
    assert d["bounded"] and d["clearance"] == 0.3
    assert d["components"][0]["region"]["type"] == "disk"


def test_exterior_region():
    ext = Exterior(((1.0, 0.0, 0.1),))
    assert not bool(ext.contains(1.0, 0.05))
    assert bool(ext.contains(5.0, 5.0))
