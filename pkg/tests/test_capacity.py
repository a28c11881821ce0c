import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from masscap.capacity import (
    capacity_exterior,
    capacity_monotonicity_check,
    limit_capacity,
    relative_capacity,
    variational_capacity_oracle,
)
from masscap.errors import CapacityError, DomainError
from masscap.families import (
    cylinder_end,
    flat,
    horn,
    isotropic_schwarzschild,
    neg_schwarzschild,
    power_warp,
    schwarzschild,
    tanh_mass,
    two_ended_plummer,
)


def schwarzschild_capacity(m, r0):
    return m / (1.0 - math.sqrt(1.0 - 2.0 * m / r0))


def test_exterior_capacity_closed_forms():
    assert capacity_exterior(flat(), 1.0).value == pytest.approx(1.0, rel=1e-13)
    assert capacity_exterior(schwarzschild(1.0), 2.0).value == pytest.approx(1.0, rel=1e-12)
    assert capacity_exterior(schwarzschild(1.0), 3.0).value == pytest.approx(2.3660254037844384, rel=1e-12)
    assert capacity_exterior(neg_schwarzschild(1.0), 2.0).value == pytest.approx(1.0 + math.sqrt(2.0), rel=1e-12)


def test_exterior_capacity_of_mass_profile_matches_independent_quadrature():
    # 1 / int_{2.5}^inf dr / (r^2 sqrt(1 - 2 tanh(r)/r)), evaluated with mpmath at 30 digits
    assert capacity_exterior(tanh_mass(), 2.5).value == pytest.approx(1.81550117562225109, rel=1e-11)


def test_capacity_requires_af_end():
    with pytest.raises(CapacityError):
        capacity_exterior(power_warp(0.5, 0.1), 1.0)
    with pytest.raises(DomainError):
        capacity_exterior(schwarzschild(1.0), 1.0)


def test_relative_capacity():
    assert relative_capacity(flat(), 1.0, 2.0).value == pytest.approx(2.0, rel=1e-13)
    # (int_0.1^1 x^{-4/3} dx)^{-1} = 1 / (3 (0.1^{-1/3} - 1))
    expected = 1.0 / (3.0 * (0.1 ** (-1.0 / 3.0) - 1.0))
    assert expected == pytest.approx(0.28874161198683937, rel=1e-15)
    assert relative_capacity(power_warp(2.0 / 3.0), 0.1, 1.0).value == pytest.approx(expected, rel=1e-12)
    with pytest.raises(CapacityError):
        relative_capacity(flat(), 1.0, 1.0)
    with pytest.raises(DomainError):
        relative_capacity(flat(), 2.0, 1.0)


def test_relative_capacity_exceeds_exterior():
    prof = schwarzschild(1.0)
    assert relative_capacity(prof, 3.0, 10.0).value > capacity_exterior(prof, 3.0).value


def test_limit_capacity():
    res = limit_capacity(isotropic_schwarzschild(1.0))
    assert res.value == pytest.approx(0.5, abs=1e-10)
    assert res.warning is None
    caps = [c for _, c in res.exhaustion]
    assert all(b <= a * (1 + 1e-12) for a, b in zip(caps, caps[1:]))
    assert caps[-1] == pytest.approx(0.5, rel=1e-8)
    # 1 / int_0^inf ds / (s psi)^2 evaluated with mpmath at 30 digits
    assert limit_capacity(two_ended_plummer(1.0, 0.3)).value == pytest.approx(0.588742315854387886, rel=1e-9)


@pytest.mark.parametrize("prof", [flat(), cylinder_end(), horn(0.8)], ids=["punctured-flat", "cylinder", "horn"])
def test_limit_capacity_vanishes_on_divergent_ends(prof):
    res = limit_capacity(prof)
    assert res.value == 0.0
    assert res.warning is not None


def test_limit_capacity_positive_for_mild_horn():
    # the warp behaves like t^b in arc length, so a^{-2} is integrable at the tip for b < 1/2
    # 1 / int_0^inf dr / (r^2 sqrt(f)) evaluated with mpmath at 30 digits
    assert limit_capacity(horn(0.4)).value == pytest.approx(0.160988011557451305, rel=1e-9)


def test_variational_oracle_bounds_from_above():
    for prof, r0, exact in [
        (flat(), 1.0, 1.0),
        (schwarzschild(1.0), 3.0, schwarzschild_capacity(1.0, 3.0)),
        (schwarzschild(1.0), 2.0, 1.0),
        (neg_schwarzschild(1.0), 2.0, 1.0 + math.sqrt(2.0)),
    ]:
        res = variational_capacity_oracle(prof, r0, 10_000)
        assert res.method == "variational"
        assert res.value >= exact * (1 - 1e-12)
        assert res.value == pytest.approx(exact, rel=1e-4)
    assert variational_capacity_oracle(flat(), 1.0, 100_000).value == pytest.approx(1.0, rel=1e-6)


def test_variational_oracle_warns_on_coarse_grid():
    assert variational_capacity_oracle(schwarzschild(1.0), 2.0, 8).warning is not None
    with pytest.raises(ValueError):
        variational_capacity_oracle(flat(), 1.0, 1)


def test_variational_oracle_refines_monotonically():
    vals = [variational_capacity_oracle(schwarzschild(1.0), 3.0, n).value for n in (100, 400, 1600)]
    assert vals[0] >= vals[1] >= vals[2]


def test_monotonicity_check():
    rep = capacity_monotonicity_check(flat(), [1, 2, 3])
    assert rep.passed
    np.testing.assert_allclose(rep.capacities, [1, 2, 3], rtol=1e-12)
    rep = capacity_monotonicity_check(schwarzschild(1.0), [2, 3, 4])
    np.testing.assert_allclose(rep.capacities, [1.0, 2.3660254037844384, 2.0 + math.sqrt(2.0)], rtol=1e-12)
    assert rep.passed
    assert capacity_monotonicity_check(flat(), [5.0]).passed
    with pytest.raises(DomainError):
        capacity_monotonicity_check(flat(), [2, 1])


def test_capacity_next_to_horizon():
    # 1 - sqrt(1 - 2/r0) is dominated by sqrt(r0 - 2) here, which the quadrature must resolve
    for d in (1e-15, 1e-12, 1e-9, 1e-7, 1e-5):
        r0 = 2.0 * (1.0 + d)
        assert capacity_exterior(schwarzschild(1.0), r0).value == pytest.approx(
            schwarzschild_capacity(1.0, r0), rel=1e-12)


@settings(max_examples=30, deadline=None)
@given(m=st.floats(-3.0, 3.0), e=st.floats(-9.0, 2.0))
def test_capacity_matches_closed_form(m, e):
    # within ~1e-15 of a horizon f = 1 - 2m/r is itself dominated by rounding
    if abs(m) < 1e-3:
        return
    k = 1.0 + 10.0**e
    if m > 0:
        prof, r0 = schwarzschild(m), 2 * m * k
    else:
        prof, r0 = neg_schwarzschild(-m), -m * k / 10
    assert capacity_exterior(prof, r0).value == pytest.approx(schwarzschild_capacity(m, r0), rel=1e-9)


@settings(max_examples=20, deadline=None)
@given(m=st.floats(0.1, 2.0), k=st.floats(1.0, 30.0), lam=st.floats(0.1, 10.0))
def test_capacity_scales_linearly(m, k, lam):
    prof = schwarzschild(m)
    r0 = 2 * m * k
    assert capacity_exterior(prof.scaled(lam), lam * r0).value == pytest.approx(
        lam * capacity_exterior(prof, r0).value, rel=1e-10)


@settings(max_examples=20, deadline=None)
@given(r0=st.floats(2.2, 20.0), r1=st.floats(2.2, 20.0))
def test_capacity_monotone_in_slice(r0, r1):
    lo, hi = sorted((r0, r1))
    prof = tanh_mass()
    assert capacity_exterior(prof, hi).value >= capacity_exterior(prof, lo).value * (1 - 1e-12)
