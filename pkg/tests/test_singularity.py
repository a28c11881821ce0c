import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from masscap.capacity import reference_coord
from masscap.errors import DomainError
from masscap.families import flat, horn, schwarzschild
from masscap.singularity import (
    HornSpec,
    criterion_Q,
    envelope_capacity_bound,
    envelope_constant,
    envelope_willmore_bound,
    horn_classify,
    load_horn,
    sandwich_check,
)


def q_power(b, r):
    """Q for a = r^b on (0, 1] with an unperturbed metric."""
    if b == 0.5:
        return 0.5 * r**-0.5 / -math.log(r)
    return b * (2 * b - 1) * r ** (3 * b - 2) / (1 - r ** (2 * b - 1))


def test_q_closed_form():
    spec = HornSpec.power(0.8)
    assert criterion_Q(spec, 1e-4) == pytest.approx(0.0121052, rel=1e-5)
    for b in (0.4, 0.5, 2.0 / 3.0, 0.9):
        for r in (1e-2, 1e-5):
            assert criterion_Q(HornSpec.power(b), r) == pytest.approx(q_power(b, r), rel=1e-9)
    with pytest.raises(DomainError):
        criterion_Q(spec, 1.0)
    with pytest.raises(DomainError):
        criterion_Q(spec, 0.0)


@pytest.mark.parametrize("b, limit", [(0.8, "zero"), (0.7, "zero"), (2.0 / 3.0, "finite"), (0.6, "divergent"),
                                      (0.5, "divergent"), (0.3, "divergent")])
def test_classification_follows_exponent(b, limit):
    v = horn_classify(HornSpec.power(b))
    assert v.limit == limit
    assert v.verdict == ("mass-nonneg-certified" if limit == "zero" else "inconclusive")
    assert v.agrees
    # a^-2 is integrable at the tip for b < 1/2, leaving Q ~ r^{b-1}
    expected = 3 * b - 2 if b > 0.5 else b - 1
    assert v.rate == pytest.approx(expected, abs=0.1 if b == 0.5 else 0.02)


def test_critical_exponent_limit():
    v = horn_classify(HornSpec.power(2.0 / 3.0))
    assert v.values[-1] == pytest.approx(q_power(2.0 / 3.0, v.radii[-1]), rel=1e-9)
    assert v.values[-1] == pytest.approx(2.0 / 9.0, rel=2e-4)


def test_gradient_bound_scaling():
    v = horn_classify(HornSpec.power(0.9, grad_h_bound=lambda r: 1.0 / r))
    assert v.gradient_scaling_ok
    assert v.verdict == "mass-nonneg-certified"
    v = horn_classify(HornSpec.power(0.9, grad_h_bound=lambda r: r**-1.5))
    assert not v.gradient_scaling_ok
    assert v.analytic is None and v.agrees is None


def test_spec_validation():
    with pytest.raises(ValueError):
        HornSpec.power(0.8, lam=0.5)
    with pytest.raises(ValueError):
        HornSpec.power(-1.0)
    with pytest.raises(ValueError):
        HornSpec.from_dict({"delta": 1.0})


def test_from_dict_with_samples(tmp_path):
    r = np.geomspace(1e-3, 1.0, 60)
    spec = HornSpec.from_dict({"warp_samples": {"r": r.tolist(), "a": (r**0.8).tolist()}})
    assert spec.delta == 1.0
    assert spec.a(0.5) == pytest.approx(0.5**0.8, rel=1e-4)
    assert horn_classify(spec).limit == "zero"
    path = tmp_path / "horn.json"
    path.write_text(json.dumps({"b": 0.5, "lambda": 2.0, "grad_h_bound": {"type": "power", "coeff": 1, "exp": -1}}))
    spec = load_horn(path)
    assert spec.lam == 2.0 and spec.b == 0.5
    assert spec.grad_h_bound(0.25) == pytest.approx(4.0)


def test_classification_from_profile():
    prof = horn(0.8)
    spec = HornSpec.from_profile(prof, reference_coord(prof))
    assert horn_classify(spec).verdict == "mass-nonneg-certified"
    prof = horn(0.5)
    assert horn_classify(HornSpec.from_profile(prof, reference_coord(prof))).limit == "divergent"


def test_envelopes_are_exact_for_round_model():
    b, s = 0.8, 1e-3
    spec = HornSpec.power(b)
    integral = (s ** (1 - 2 * b) - 1) / (2 * b - 1)
    cap = envelope_capacity_bound(spec, s)
    assert cap.model == pytest.approx(1.0 / integral, rel=1e-10)
    assert cap.bound == cap.model
    w = envelope_willmore_bound(spec, s)
    assert w.model == pytest.approx(16 * math.pi * b * b * s ** (2 * b - 2), rel=1e-12)
    assert w.bound == pytest.approx(w.model, rel=1e-12)
    assert w.product_bound == pytest.approx(w.model_product, rel=1e-12)
    assert envelope_constant(4.0) == 32.0


@settings(max_examples=30, deadline=None)
@given(b=st.floats(0.55, 1.0), lam=st.floats(1.0, 3.0), s=st.floats(1e-6, 0.5), c=st.floats(0.0, 2.0))
def test_envelope_bounds_dominate_model(b, lam, s, c):
    spec = HornSpec.power(b, lam=lam, grad_h_bound=lambda r: c / r)
    cap = envelope_capacity_bound(spec, s)
    assert cap.bound >= cap.model
    w = envelope_willmore_bound(spec, s)
    assert w.bound >= w.model * (1 - 1e-12)
    assert w.product_bound >= w.model_product * (1 - 1e-12)


def test_sandwich():
    rep = sandwich_check(flat(), 1.0, 2.0)
    assert rep.beta == pytest.approx(0.5, rel=1e-12)
    assert rep.capacity / rep.beta == pytest.approx(2.0, rel=1e-12)
    assert rep.relative == pytest.approx(2.0, rel=1e-12)
    assert rep.capacity == pytest.approx(1.0, rel=1e-12)
    assert rep.holds
    rep = sandwich_check(schwarzschild(1.0), 2.0, 4.0)
    assert rep.beta == pytest.approx(math.sqrt(0.5), rel=1e-12)
    assert rep.relative == pytest.approx(math.sqrt(2.0), rel=1e-12)
    assert rep.upper_slack == pytest.approx(0.0, abs=1e-10)
    assert rep.lower_slack == pytest.approx(math.sqrt(2.0) - 1.0, rel=1e-10)
    assert rep.holds
    with pytest.raises(DomainError):
        sandwich_check(flat(), 2.0, 1.0)


@settings(max_examples=20, deadline=None)
@given(t=st.floats(2.05, 20.0), k=st.floats(1.1, 10.0))
def test_sandwich_holds_on_schwarzschild(t, k):
    assert sandwich_check(schwarzschild(1.0), t, k * t).holds
