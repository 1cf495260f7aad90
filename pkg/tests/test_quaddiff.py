import cmath
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from plk.quaddiff import (AlphaFunction, DeltaH, FloerDatum, Ray, characteristic_curve, concat_alpha, dual_datum,
                          normalized_concat_curve, qd3_from_residues, qd3_real_zero_test, qd3_real_zeros,
                          ramp_alpha, ray_intersect, residues_squared, standard_datum, triangle_ok,
                          validate_floer_datum)

positive_fracs = st.fractions(min_value=Fraction(1, 10), max_value=Fraction(10), max_denominator=20)


def test_equal_residues():
    q = qd3_from_residues(1, 1, 1)
    assert q.b == (Fraction(1, 2),) * 3
    assert qd3_real_zero_test(q)


def test_unbalanced_residues_have_boundary_zero():
    q = qd3_from_residues(3, 1, 1)
    assert not qd3_real_zero_test(q)
    # the numerator vanishes at the reported zeros
    for z in qd3_real_zeros(q):
        b0, b1, b2 = (float(x) for x in q.b)
        assert abs(b0 * (1 - z) ** 2 + b1 * z ** 2 + b2) < 1e-9


@given(positive_fracs, positive_fracs, positive_fracs)
@settings(max_examples=200, deadline=None)
def test_residue_roundtrip_is_exact(a0, a1, a2):
    q = qd3_from_residues(a0, a1, a2)
    assert residues_squared(q.b) == (a0 * a0, a1 * a1, a2 * a2)


@given(positive_fracs, positive_fracs, positive_fracs)
@settings(max_examples=200, deadline=None)
def test_zero_free_boundary_iff_strict_triangle(a0, a1, a2):
    # the numerator discriminant is -4 (b0 b1 + b0 b2 + b1 b2), a positive multiple of minus the squared
    # Heron area of the triangle with sides a0, a1, a2
    q = qd3_from_residues(a0, a1, a2)
    assert qd3_real_zero_test(q) == triangle_ok(a0, a1, a2)


def test_nonpositive_residue_rejected():
    with pytest.raises(ValueError):
        qd3_from_residues(0, 1, 1)


def test_alpha_ramp_is_monotone_with_plateaus():
    a = ramp_alpha(-1.0, 2.0)
    assert a.is_monotone()
    assert a(-5.0) == -1.0 and a(10.0) == 2.0
    s = np.linspace(-1, 4, 500)
    assert np.all(np.diff(a(s)) >= -1e-15)


def test_characteristic_curve_unit_speed_and_plateau_lines():
    a = ramp_alpha(0.3, 1.2)
    c = characteristic_curve(a, -3.0, 6.0)
    assert np.allclose(c.speeds(), 1.0, atol=1e-6)
    # on the left plateau gamma moves along -e^{i alpha(-inf)}
    z0, z1 = c.at(-3.0), c.at(-1.0)
    assert abs((z1 - z0) - 2.0 * -cmath.exp(0.3j)) < 1e-12


@pytest.mark.parametrize("r0,r", [(4.0, 7.0), (5.0, 20.0), (math.pi, 11.0)])
def test_normalized_concat_shift_law(r0, r):
    un = ramp_alpha(0.5, math.pi)
    stp = ramp_alpha(math.pi, 0.8)
    g0 = normalized_concat_curve(concat_alpha(un, stp, r0), r0, -2.0, r0 + 6.0)
    g = normalized_concat_curve(concat_alpha(un, stp, r), r, -2.0, r + 6.0)
    s = np.linspace(r, r + 5.0, 41)
    lhs = np.array([g.at(x) for x in s])
    rhs = np.array([g0.at(x - r + r0) for x in s]) + (r - r0)
    assert np.max(np.abs(lhs - rhs)) < 1e-9
    # left part does not depend on R and the middle plateau is real
    for x in (-1.0, 0.5, 2.0):
        assert abs(g.at(x) - g0.at(x)) < 1e-12
    assert abs(g.at(math.pi).imag) < 1e-12 and abs(g.at(r).imag) < 1e-12


def test_concat_requires_matching_plateaus():
    with pytest.raises(ValueError):
        concat_alpha(ramp_alpha(0.5, 3.0), ramp_alpha(math.pi, 0.8), 5.0)
    with pytest.raises(ValueError):
        concat_alpha(ramp_alpha(0.5, math.pi), ramp_alpha(math.pi, 0.8), 2.0)


def test_standard_datum_validates_and_dual_is_involution():
    d = standard_datum(2.0, 0.4)
    rep = validate_floer_datum(d)
    assert rep.ok, rep.to_json()
    dd = dual_datum(dual_datum(d))
    assert abs(dd.beta - (d.beta - 2 * math.pi)) < 1e-12
    s = np.linspace(-1, 5, 50)
    assert np.allclose(dd.alpha(s), d.alpha(s) - 2 * math.pi)
    rep_dual = validate_floer_datum(dual_datum(d))
    assert rep_dual.ok


def test_datum_clause_failures():
    d = standard_datum(2.0, 0.4)
    bad_eps = FloerDatum(d.r, d.alpha, d.beta, 1.5)
    assert "eps_range" in validate_floer_datum(bad_eps).failed()
    bad_r = FloerDatum(1.0, ramp_alpha(1.0, 0.4, 1.0, 0.1), d.beta, d.eps)
    assert "R_at_least_pi" in validate_floer_datum(bad_r).failed()
    big = DeltaH(5.0, 0.5, 2.5, (1.0, 0.0, 0.0))
    assert "perturbation_norms" in validate_floer_datum(FloerDatum(d.r, d.alpha, d.beta, d.eps, big)).failed()


def test_datum_json_roundtrip():
    d = FloerDatum(5.0, ramp_alpha(0.2, 1.0, 5.0), 0.6, 0.3, DeltaH(0.01, 1.0, 2.0, (1.0, 0.0)))
    d2 = FloerDatum.from_json(d.to_json())
    assert d2.to_json() == d.to_json()


def test_ray_intersections():
    h = ray_intersect(Ray(0j, 0.0), Ray(2 + 2j, -math.pi / 2))
    assert h.point is not None and abs(h.point - 2) < 1e-12
    assert ray_intersect(Ray(0j, 0.0), Ray(2 + 2j, math.pi / 2)).point is None
    assert ray_intersect(Ray(0j, 0.0), Ray(1j, 0.0)).point is None
    assert ray_intersect(Ray(0j, 0.0), Ray(3 + 0j, math.pi)).collinear


@given(st.floats(-3, 3), st.floats(-3, 3), st.floats(0, 2 * math.pi), st.floats(0, 2 * math.pi))
@settings(max_examples=200, deadline=None)
def test_ray_hit_lies_on_both_rays(x, y, a1, a2):
    r1, r2 = Ray(0j, a1), Ray(complex(x, y), a2)
    h = ray_intersect(r1, r2)
    if h.point is not None and not h.collinear:
        assert r1.contains(h.point, 1e-6, strict=False) and r2.contains(h.point, 1e-6, strict=False)
