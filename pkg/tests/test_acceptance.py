"""One test per acceptance criterion; each prints a single PASS/FAIL line (run with ``-s`` to see them)."""

from masscap.suites import CRITERIA


def _run(number):
    result = CRITERIA[number]()
    print(f"\n[criterion {number}] {result.line()}")
    return result


def test_capacity_oracle_agreement():
    assert _run(1).passed


def test_schwarzschild_rigidity_and_negative_mass_chain():
    assert _run(2).passed


def test_random_profile_sweep_and_scale_covariance():
    assert _run(3).passed


def test_monotone_quantity_and_two_ended_saturation():
    assert _run(4).passed


def test_horn_threshold_and_witness():
    assert _run(5).passed


def test_limit_capacity_and_exhaustion():
    assert _run(6).passed


def test_small_sphere_expansion():
    result = _run(7)
    # the fourth-order comparison is conditional and only warns
    for w in result.warnings:
        print(f"  warning: {w}")
    assert result.passed


def test_curvature_oracle():
    assert _run(8).passed


def test_negative_mass_willmore_blowup():
    assert _run(9).passed
