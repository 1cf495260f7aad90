import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from plk.lgflow import (GradedLagLine, LGError, LGModel, action, action_linear_law, admissible, constant_action,
                        constant_spectrum, critical_angles, critical_points, energy_check, fs_arrangement,
                        grading, holomorphy_residual, maslov_index, min_abs_eig, o_radius, solitons, sturm_count,
                        theta_crit, thimble)
from plk.quaddiff import standard_datum

CUBIC = LGModel.rotated_cubic()
QUAD = LGModel.quadratic()


def test_cubic_critical_data():
    x1, x2 = critical_points(CUBIC)
    assert abs(x1.z - cmath.exp(1j * math.pi / 12)) < 1e-14
    assert abs(x2.z + x1.z) < 1e-14
    # W(x) = -2/3 e^{i pi/6} x at a critical point
    assert abs(x1.value - (-2 / 3) * cmath.exp(1j * math.pi / 4)) < 1e-14
    assert abs(x1.H + math.sqrt(2) / 3) < 1e-14 and abs(x2.H - math.sqrt(2) / 3) < 1e-14
    assert np.allclose(critical_angles(CUBIC), [math.pi / 4, 5 * math.pi / 4])
    assert admissible(CUBIC, 0.0) and not admissible(CUBIC, math.pi / 4)
    assert abs(theta_crit(CUBIC, 0.0) - math.pi / 4) < 1e-12
    assert o_radius(CUBIC) == pytest.approx(0.5 * min(1.0, 2.0 / 4.0))


def test_degenerate_and_tied_models_rejected():
    with pytest.raises(LGError):
        critical_points(LGModel([0, 0, 0, 1.0]))
    with pytest.raises(LGError):
        # z^3/3 - z has real critical values with equal H
        critical_points(LGModel([0, -1.0, 0, 1 / 3]))
    with pytest.raises(LGError):
        LGModel([1.0, 2.0])


def test_model_json_roundtrip():
    m2 = LGModel.from_json(CUBIC.to_json())
    assert np.allclose(m2.coeffs, CUBIC.coeffs)


def test_holomorphy():
    pts = np.exp(1j * np.linspace(0, 6, 50)) * np.linspace(0.1, 3, 50)
    assert holomorphy_residual(CUBIC, pts) < 1e-12


def test_quadratic_thimble_is_real_axis():
    (q,) = critical_points(QUAD)
    th = thimble(QUAD, q, 0.0)
    assert np.max(np.abs(th.points.imag)) < 1e-12
    im, re_min = th.ray_residuals(QUAD)
    assert im < 1e-12 and re_min >= 0
    th2 = thimble(QUAD, q, math.pi)
    assert np.max(np.abs(th2.points.real)) < 1e-12


@pytest.mark.parametrize("theta", [0.3, 1.0, 2.5, 4.0])
def test_cubic_thimble_rays(theta):
    for q in critical_points(CUBIC):
        th = thimble(CUBIC, q, theta)
        im, re_min = th.ray_residuals(CUBIC)
        assert im <= 1e-6 * CUBIC.scale and re_min >= -1e-12
        # the spline reproduces the samples
        assert np.max(np.abs(th.point_at(th.tau) - th.points)) < 1e-12


lifts = st.floats(-5, 5, allow_nan=False).filter(lambda x: abs(x - round(x)) > 1e-6)


@given(st.floats(-3, 3), st.floats(0.01, 0.99))
@settings(max_examples=200, deadline=None)
def test_maslov_same_point_window(theta1, frac):
    theta0 = theta1 + frac * 2 * math.pi
    l0 = GradedLagLine.from_lift(theta0 / (2 * math.pi))
    l1 = GradedLagLine.from_lift(theta1 / (2 * math.pi))
    assert maslov_index(l0, l1) == 0
    assert maslov_index(l0.shifted(1), l1) == 1
    assert maslov_index(l0, l1.shifted(1)) == -1


@given(lifts, st.floats(-5, 5))
@settings(max_examples=200, deadline=None)
def test_maslov_antisymmetry(dx, base):
    l0 = GradedLagLine.from_lift(base + dx)
    l1 = GradedLagLine.from_lift(base)
    assert maslov_index(l0, l1) + maslov_index(l1, l0) == -1


def test_maslov_rejects_non_transverse():
    with pytest.raises(LGError):
        maslov_index(GradedLagLine.from_lift(0.5), GradedLagLine.from_lift(1.5))


@given(st.integers(0, 2 ** 31), st.integers(2, 40))
@settings(max_examples=60, deadline=None)
def test_sturm_count_matches_dense_eigenvalues(seed, n):
    rng = np.random.default_rng(seed)
    diag = rng.normal(size=n)
    off = rng.normal(size=n - 1)
    a = np.diag(diag) + np.diag(off, 1) + np.diag(off, -1)
    ev = np.linalg.eigvalsh(a)
    if np.min(np.abs(ev)) < 1e-9:
        return
    assert sturm_count(diag, off) == int(np.sum(ev < 0))
    assert min_abs_eig(diag, off, window=10.0) == pytest.approx(np.min(np.abs(ev)), rel=1e-8, abs=1e-12)


@pytest.fixture(scope="module")
def quad_constant():
    (q,) = critical_points(QUAD)
    d = standard_datum(0.5, 0.2)
    res = solitons(QUAD, thimble(QUAD, q, 0.5), thimble(QUAD, q, 0.2), d)
    return q, d, res


def test_quadratic_constant_soliton(quad_constant):
    q, d, res = quad_constant
    assert res.count == 1
    sol = res.solitons[0]
    assert sol.is_constant()
    a, err = action(sol, QUAD)
    assert abs(a) < 1e-9 and abs(constant_action(q, d)) < 1e-9
    assert grading(sol, QUAD) == 0
    assert energy_check(sol, QUAD).ok


def test_constant_path_hessian_is_invertible():
    arr = fs_arrangement(CUBIC)
    x1 = arr.x(1)
    d = standard_datum(arr.theta[1] + 0.3, arr.theta[1])
    ev = constant_spectrum(CUBIC, x1, d)
    assert np.min(np.abs(ev)) > 0.1
    # constant phase datum: the spectrum is symmetric about zero
    d0 = standard_datum(arr.theta[1] + math.pi, arr.theta[1])
    e = np.sort(constant_spectrum(CUBIC, x1, d0))
    low = e[np.abs(e) < 3.0]
    assert np.allclose(np.sort(low), np.sort(-low), atol=1e-3)


def test_arrangement_angles():
    arr = fs_arrangement(CUBIC)
    th = [arr.theta[k] for k in range(3)]
    eta = [arr.eta[j] for j in range(3)]
    assert 0.0 < th[2] < th[1] < th[0] < math.pi / 4
    assert math.pi < eta[0] < eta[1] < eta[2] < math.pi + math.pi / 4


def test_linear_law_fit():
    rs = [5.0, 10.0, 20.0, 40.0]
    law = action_linear_law(rs, [0.3 * r + 1.0 for r in rs], -0.3)
    assert law.ok() and law.rel_err < 1e-12 and abs(law.intercept - 1.0) < 1e-12
    bad = action_linear_law(rs, [0.35 * r for r in rs], -0.3)
    assert not bad.ok()
