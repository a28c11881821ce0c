import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from masscap.errors import DomainError, FitWindowError
from masscap.families import gaussian_bump, isotropic_schwarzschild, plummer, schwarzschild
from masscap.smallsphere import (
    center_curvature,
    coordinate_of_radius,
    geodesic_radius,
    mass_capacity_expansion_check,
    predicted_coefficients,
    willmore_expansion_fit,
)

SIXTEEN_PI = 16.0 * math.pi
GRID = np.geomspace(0.02, 0.1, 12)


def test_geodesic_radius_of_plummer():
    eps = 0.1
    # int_0^1 (1 + eps (1+s^2)^{-1/2})^2 ds
    expected = 1.0 + 2.0 * eps * math.asinh(1.0) + eps * eps * math.pi / 4.0
    assert geodesic_radius(plummer(eps), 1.0) == pytest.approx(expected, rel=1e-12)
    assert coordinate_of_radius(plummer(eps), expected) == pytest.approx(1.0, rel=1e-10)


def test_center_curvature_closed_forms():
    # psi = 1 + eps (1+s^2)^{-1/2}: R = 24 eps (1+s^2)^{-5/2} psi^{-5}
    eps = 0.1
    r0 = 24 * eps / (1 + eps) ** 5
    r_p, lap = center_curvature(plummer(eps))
    assert r_p == pytest.approx(r0, rel=1e-13)
    assert lap == pytest.approx(-15.0 * r0 / (1 + eps) ** 5, rel=1e-4)
    r_p, _ = center_curvature(gaussian_bump(0.1))
    assert r_p == pytest.approx(2.98042235068394, rel=1e-12)


def test_predicted_coefficients():
    c0, c2, c4 = predicted_coefficients(3.0, 0.0)
    assert c0 == SIXTEEN_PI
    assert c2 == pytest.approx(-8.0 * math.pi, rel=1e-15)
    assert c4 == pytest.approx(4.0 * math.pi / 3.0, rel=1e-15)


def test_flat_center_has_trivial_expansion():
    fit = willmore_expansion_fit(gaussian_bump(0.0), GRID)
    assert fit.coefficients[0] == pytest.approx(SIXTEEN_PI, rel=1e-12)
    assert abs(fit.coefficients[1]) < 1e-9
    assert abs(fit.coefficients[2]) < 1e-7
    assert fit.c4_ok


def test_gaussian_expansion():
    fit = willmore_expansion_fit(gaussian_bump(0.1), GRID)
    e0, e2, e4 = fit.relative_errors()
    assert e0 < 1e-8
    assert e2 < 0.01
    assert e4 < 0.05
    assert fit.c4_conditional and fit.c4_ok
    assert fit.residual < 1e-6


def test_mass_capacity_expansion_r2_coefficient():
    chk = mass_capacity_expansion_check(gaussian_bump(0.01), GRID)
    # R(p) / 12 = 4 eps (1 + eps)^-5
    assert chk.predicted_r2 == pytest.approx(0.04 / 1.01**5, rel=1e-13)
    assert chk.r2_coefficient == pytest.approx(0.03805862750427, rel=1e-6)
    # the bump has negative curvature away from the center, so nothing is asserted
    assert not chk.hypothesis_ok
    assert chk.inequality_ok is None


def test_mass_capacity_expansion_with_nonneg_curvature():
    chk = mass_capacity_expansion_check(plummer(0.1), GRID)
    assert chk.hypothesis_ok and chk.inequality_checked
    assert chk.inequality_ok
    assert chk.mass == pytest.approx(0.2, rel=1e-9)
    assert chk.mass_limit >= -1e-9 and chk.mass_limit_ok
    assert all(l >= r for l, r in zip(chk.lhs, chk.rhs_exact))


def test_requires_smooth_center():
    with pytest.raises(DomainError):
        willmore_expansion_fit(schwarzschild(1.0), GRID)
    with pytest.raises(DomainError):
        center_curvature(isotropic_schwarzschild(1.0))


def test_fit_window_errors():
    with pytest.raises(FitWindowError):
        willmore_expansion_fit(gaussian_bump(0.1), np.geomspace(0.5, 3.0, 12))
    with pytest.raises(ValueError):
        willmore_expansion_fit(gaussian_bump(0.1), [0.01, 0.02, 0.03])
    with pytest.raises(ValueError):
        mass_capacity_expansion_check(plummer(0.1), [0.0, 0.01, 0.02, 0.03])


@settings(max_examples=10, deadline=None)
@given(eps=st.floats(0.01, 0.3))
def test_second_order_coefficient_tracks_curvature(eps):
    fit = willmore_expansion_fit(plummer(eps), GRID)
    assert fit.relative_errors()[1] < 1e-3
