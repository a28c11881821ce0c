import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from masscap.errors import AsymptoticsError, DomainError, HorizonError
from masscap.families import (
    flat,
    gaussian_bump,
    isotropic_schwarzschild,
    neg_schwarzschild,
    power_warp,
    profile_from_dict,
    schwarzschild,
    tanh_mass,
)
from masscap.geometry import (
    SIXTEEN_PI,
    ConformalProfile,
    RadialProfile,
    SurfaceSlice,
    WarpedProfile,
    adm_mass,
    convert,
    curvature_oracle,
    from_mass_profile,
    hypotheses_nonneg_curvature,
    scalar_curvature,
)


def test_mean_curvature_closed_forms():
    assert SurfaceSlice(flat(), 1.0).mean_curvature == pytest.approx(2.0, rel=1e-14)
    assert SurfaceSlice(schwarzschild(1.0), 4.0).mean_curvature == pytest.approx(2 * math.sqrt(0.5) / 4, rel=1e-14)
    horn = WarpedProfile(lambda r: r**0.8, lambda r: 0.8 * r**-0.2, lambda r: -0.16 * r**-1.2)
    assert SurfaceSlice(horn, 0.5).mean_curvature == pytest.approx(3.2, rel=1e-14)


def test_mean_curvature_matches_area_first_variation():
    # d(log area)/dt = H for slices moving with unit speed
    prof = schwarzschild(1.0)
    r, h = 4.0, 1e-5
    dlog = (math.log(SurfaceSlice(prof, r + h).area) - math.log(SurfaceSlice(prof, r - h).area)) / (2 * h)
    dt_dr = prof.arc_density(r)
    assert dlog / dt_dr == pytest.approx(SurfaceSlice(prof, r).mean_curvature, rel=1e-8)


def test_willmore_and_hawking_mass():
    assert SurfaceSlice(flat(), 7.0).willmore == pytest.approx(SIXTEEN_PI, rel=1e-14)
    assert SurfaceSlice(neg_schwarzschild(1.0), 2.0).willmore == pytest.approx(32 * math.pi, rel=1e-14)
    assert SurfaceSlice(schwarzschild(1.0), 2.0).willmore == 0.0
    assert SurfaceSlice(flat(), 3.0).hawking_mass == pytest.approx(0.0, abs=1e-15)
    assert SurfaceSlice(schwarzschild(1.0), 3.0).hawking_mass == pytest.approx(1.0, rel=1e-14)
    assert SurfaceSlice(neg_schwarzschild(1.0), 2.0).hawking_mass == pytest.approx(-1.0, rel=1e-14)


def test_scalar_curvature_closed_forms():
    assert scalar_curvature(flat(), 2.0) == 0.0
    assert scalar_curvature(schwarzschild(1.0), 5.0) == 0.0
    # the formula R = 4 m'/r^2 holds pointwise, also where 2m > r
    prof = RadialProfile(np.tanh, lambda r: 1.0 / np.cosh(r) ** 2)
    assert scalar_curvature(prof, 1.0) == pytest.approx(4.0 / math.cosh(1.0) ** 2, rel=1e-14)
    # smooth center of a conformal bump: R(p) = 48 eps (1 + eps)^-5
    assert scalar_curvature(gaussian_bump(0.1), 0.0) == pytest.approx(2.98042235068394, rel=1e-12)


def test_curvature_oracle_agrees_with_closed_form():
    assert curvature_oracle(flat(), 1.5) == pytest.approx(0.0, abs=1e-8)
    assert curvature_oracle(schwarzschild(1.0), 5.0) == pytest.approx(0.0, abs=1e-6)
    prof = tanh_mass()
    assert curvature_oracle(prof, 2.5) == pytest.approx(scalar_curvature(prof, 2.5), rel=1e-6)
    assert curvature_oracle(gaussian_bump(0.3), 0.7) == pytest.approx(scalar_curvature(gaussian_bump(0.3), 0.7), rel=1e-6)


def test_adm_mass():
    assert adm_mass(schwarzschild(1.0)).value == pytest.approx(1.0, rel=1e-12)
    assert adm_mass(flat()).value == pytest.approx(0.0, abs=1e-14)
    assert adm_mass(isotropic_schwarzschild(1.0)).value == pytest.approx(1.0, rel=1e-12)
    assert adm_mass(tanh_mass()).value == pytest.approx(1.0, rel=1e-10)
    with pytest.raises(AsymptoticsError):
        adm_mass(power_warp(0.5))


def test_mass_profile_constructor():
    prof = from_mass_profile(lambda r: 0.0 * r, lambda r: 0.0 * r, 1.0)
    assert SurfaceSlice(prof, 2.0).willmore == pytest.approx(SIXTEEN_PI)
    ext = from_mass_profile(lambda r: 1.0 + 0.0 * r, lambda r: 0.0 * r, 2.5)
    assert SurfaceSlice(ext, 3.0).hawking_mass == pytest.approx(1.0, rel=1e-14)
    assert hypotheses_nonneg_curvature(tanh_mass())
    with pytest.raises(HorizonError):
        from_mass_profile(lambda r: 1.0 + 0.0 * r, lambda r: 0.0 * r, 1.5)
    with pytest.raises(ValueError):
        from_mass_profile(lambda r: -np.tanh(r), lambda r: -tanh_mass().mass_d1(r), 1.0)


def test_domain_checks():
    with pytest.raises(DomainError):
        SurfaceSlice(schwarzschild(1.0), 1.5)
    with pytest.raises(DomainError):
        SurfaceSlice(flat(), 0.0)
    with pytest.raises(DomainError):
        SurfaceSlice(flat(), math.nan)
    # closed boundary at a horizon is a valid slice
    assert SurfaceSlice(schwarzschild(1.0), 2.0).mean_curvature == 0.0


def test_convert_schwarzschild_solves_warp_ode():
    w = convert(schwarzschild(1.0))
    assert w.t_min == 0.0
    assert w.warp(0.0) == pytest.approx(2.0, rel=1e-12)
    for t in (0.1, 1.0, 5.0):
        a = w.warp(t)
        assert w.warp_slope(t) == pytest.approx(math.sqrt(1.0 - 2.0 / a), rel=1e-9)
        # a' from finite differences of the inverted map
        h = 1e-4
        assert (w.warp(t + h) - w.warp(t - h)) / (2 * h) == pytest.approx(math.sqrt(1 - 2 / a), rel=1e-6)


def test_convert_flat_and_conformal():
    w = convert(flat())
    for t in (0.5, 2.0, 10.0):
        assert w.warp(t) == pytest.approx(t, rel=1e-12)
    w = convert(ConformalProfile(lambda s: 0.0 * s, lambda s: 0.0 * s, lambda s: 0.0 * s))
    assert w.warp(3.0) == pytest.approx(3.0, rel=1e-12)


def test_convert_two_ended_has_infinite_inner_end():
    w = convert(isotropic_schwarzschild(1.0))
    assert w.t_min == -math.inf
    # the minimal sphere s = 1/2 has area radius 2m
    assert w.warp(0.0) == pytest.approx(isotropic_schwarzschild(1.0).warp(1.0), rel=1e-12)


def test_profile_from_dict_rejects_unknown_family():
    with pytest.raises(ValueError):
        profile_from_dict({"family": "wormhole"})
    assert profile_from_dict({"family": "schwarzschild", "params": {"mass": 2}}).lo == 4.0


@settings(max_examples=40, deadline=None)
@given(m=st.floats(0.1, 3.0), k=st.floats(1.01, 50.0), lam=st.floats(0.2, 5.0))
def test_slice_functionals_scale_covariantly(m, k, lam):
    prof = schwarzschild(m)
    r = 2 * m * k
    s0, s1 = SurfaceSlice(prof, r), SurfaceSlice(prof.scaled(lam), lam * r)
    assert s1.willmore == pytest.approx(s0.willmore, rel=1e-12, abs=1e-12)
    assert s1.hawking_mass == pytest.approx(lam * s0.hawking_mass, rel=1e-12)
    assert s1.mean_curvature == pytest.approx(s0.mean_curvature / lam, rel=1e-12)


@settings(max_examples=40, deadline=None)
@given(m=st.floats(0.1, 3.0), k=st.floats(1.01, 50.0))
def test_hawking_mass_is_constant_on_schwarzschild(m, k):
    assert SurfaceSlice(schwarzschild(m), 2 * m * k).hawking_mass == pytest.approx(m, rel=1e-12)
