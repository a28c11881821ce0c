"""Verification suites: each check compares the library against closed forms or exact identities.

Every check returns a :class:`CheckResult`; :data:`SUITES` groups them for
the command line.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import families as fam
from .capacity import capacity_exterior, limit_capacity, variational_capacity_oracle
from .geometry import SIXTEEN_PI, curvature_oracle, hypotheses_nonneg_curvature, scalar_curvature
from .harmonic import b_curve, exterior_harmonic, level_data, two_ended_harmonic
from .inequalities import (
    VIOL_TOL,
    margin_capacity_radius,
    margin_energy_willmore,
    margin_hawking_chain,
    margin_mass_capacity,
    margin_mass_energy,
    mass_lower_bound_two_ended,
    neg_schwarzschild_willmore,
    pmt_witness,
    slice_reports,
)
from .singularity import HornSpec, criterion_Q, horn_classify
from .smallsphere import mass_capacity_expansion_check, willmore_expansion_fit


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    elapsed: float = 0.0
    budget: float = math.inf
    warnings: list[str] = field(default_factory=list)

    def line(self, timing: bool = True) -> str:
        status = "PASS" if self.passed else "FAIL"
        clock = f" ({self.elapsed:.2f}s / {self.budget:g}s)" if timing else ""
        extra = f" [warning: {'; '.join(self.warnings)}]" if self.warnings else ""
        return f"{status}  {self.name}: {self.detail}{clock}{extra}"


def _timed(name: str, budget: float):
    def wrap(fn):
        def run(**kwargs) -> CheckResult:
            t0 = time.perf_counter()
            passed, detail, *rest = fn(**kwargs)
            elapsed = time.perf_counter() - t0
            warnings = rest[0] if rest else []
            return CheckResult(name, bool(passed and elapsed < budget), detail, elapsed, budget, list(warnings))

        run.__name__ = fn.__name__
        run.__doc__ = fn.__doc__
        return run

    return wrap


def _rel(a: float, b: float) -> float:
    return abs(a - b) / abs(b) if b != 0 else abs(a)


# --------------------------------------------------------------------------------------
# capacities


def schwarzschild_capacity(m: float, r0: float) -> float:
    """Closed-form exterior capacity of the sphere ``r = r0``; valid for either sign of ``m``."""
    if m == 0:
        return r0
    return m / (1.0 - math.sqrt(1.0 - 2.0 * m / r0))


def capacity_grid():
    """``(label, profile, r0, exact)`` over flat, positive and negative Schwarzschild slices."""
    cases = []
    for r0 in (0.5, 1.0, 2.0, 5.0, 10.0):
        cases.append(("flat", fam.flat(r0), r0, r0))
    for m in (0.5, 1.0, 2.0):
        for k in (1.0, 1.5, 3.0, 10.0, 100.0):
            r0 = 2.0 * m * k
            cases.append((f"schwarzschild m={m}", fam.schwarzschild(m), r0, schwarzschild_capacity(m, r0)))
    for m in (0.5, 1.0, 2.0):
        for k in (0.01, 0.1, 1.0, 10.0, 100.0):
            r0 = m * k
            cases.append((f"neg-schwarzschild m={-m}", fam.neg_schwarzschild(m), r0, schwarzschild_capacity(-m, r0)))
    return cases


@_timed("capacity oracles", 5.0)
def check_capacity(grid_size: int = 100_000):
    """Quadrature capacities against closed forms (1e-8), variational bound from above (1e-5)."""
    worst_q = worst_v = 0.0
    below = 0
    for _, prof, r0, exact in capacity_grid():
        worst_q = max(worst_q, _rel(capacity_exterior(prof, r0).value, exact))
        v = variational_capacity_oracle(prof, r0, grid_size).value
        worst_v = max(worst_v, _rel(v, exact))
        below += v < exact * (1.0 - 1e-12)
    ok = worst_q <= 1e-8 and worst_v <= 1e-5 and below == 0
    return ok, f"quadrature rel err {worst_q:.2e}, variational rel err {worst_v:.2e}, below exact: {below}"


# --------------------------------------------------------------------------------------
# equality cases


@_timed("rigidity on Schwarzschild", 5.0)
def check_rigidity():
    """Equality in the four slice inequalities on Schwarzschild, double equality in the Hawking chain for m < 0."""
    worst = 0.0
    for m in (0.5, 1.0, 2.0):
        prof = fam.schwarzschild(m)
        for r in 2.0 * m * np.geomspace(1.0, 50.0, 10):
            for fn in (margin_mass_capacity, margin_energy_willmore, margin_mass_energy, margin_capacity_radius):
                worst = max(worst, abs(fn(prof, float(r)).normalized_margin))
    chain = 0.0
    for m in (0.5, 1.0, 2.0):
        prof = fam.neg_schwarzschild(m)
        for r in m * np.geomspace(0.05, 50.0, 10):
            for rep in margin_hawking_chain(prof, float(r)):
                chain = max(chain, abs(rep.normalized_margin))
    ok = worst <= 1e-7 and chain <= 1e-7
    return ok, f"max |margin| {worst:.2e} (Schwarzschild), {chain:.2e} (negative-mass chain)"


@_timed("negative-mass Willmore blow-up", 2.0)
def check_neg_willmore():
    """``W = 16 pi (1 + 2|m|/r)`` on negative-mass slices and ``W ~ r^-1`` as ``r -> 0``."""
    worst, rate_err, unbounded = 0.0, 0.0, True
    for m in (0.5, 1.0, 2.0):
        prof = fam.neg_schwarzschild(m)
        for r in (0.01, 0.1, 1.0, 10.0):
            rep = neg_schwarzschild_willmore(prof, r)
            worst = max(worst, _rel(rep.lhs, SIXTEEN_PI * (1.0 + 2.0 * m / r)))
        rep = neg_schwarzschild_willmore(prof, 1.0)
        rate_err = max(rate_err, abs(rep.details["rate"] + 1.0))
        unbounded &= rep.details["unbounded"]
    ok = worst <= 1e-12 and rate_err <= 1e-3 and unbounded
    return ok, f"rel err {worst:.2e}, |rate + 1| {rate_err:.2e}, unbounded {unbounded}"


# --------------------------------------------------------------------------------------
# sweep


SWEEP_SLICES = 10


def sweep_slices(prof) -> np.ndarray:
    return prof.lo * np.geomspace(1.02, 12.0, SWEEP_SLICES)


def sweep_profiles(count: int, seed: int):
    rng = np.random.default_rng(seed)
    return [fam.random_mass_profile(rng) for _ in range(count)]


def sweep_rows(count: int, seed: int):
    """``(profile_id, profile, slice, report)`` for every slice inequality on every sweep profile."""
    for i, prof in enumerate(sweep_profiles(count, seed)):
        for x in sweep_slices(prof):
            for rep in slice_reports(prof, float(x)):
                yield i, prof, float(x), rep


@_timed("random sweep", 20.0)
def check_sweep(count: int = 100, seed: int = 42, lam: float = 3.0):
    """Certified margins stay above ``-1e-9``; normalized margins are invariant under scaling."""
    worst = math.inf
    drift = 0.0
    certified = 0
    for prof in sweep_profiles(count, seed):
        big = prof.scaled(lam)
        for x in sweep_slices(prof):
            reps = slice_reports(prof, float(x))
            scaled = slice_reports(big, lam * float(x))
            for a, b in zip(reps, scaled):
                if a.hypothesis_ok:
                    certified += 1
                    worst = min(worst, a.normalized_margin)
                drift = max(drift, abs(a.normalized_margin - b.normalized_margin))
    ok = worst >= -VIOL_TOL and drift <= 1e-9 and certified > 0
    return ok, f"{certified} certified margins, min {worst:.2e}, scale drift {drift:.2e}"


# --------------------------------------------------------------------------------------
# harmonic potentials


def monotone_profiles():
    """Twenty ``R >= 0`` harmonic potentials: two-ended ones and exterior potentials of slices."""
    out = []
    for m in (0.5, 1.0, 2.0):
        out.append((f"two-ended schwarzschild m={m}", two_ended_harmonic(fam.isotropic_schwarzschild(m))))
    for m, eps in ((1.0, 0.1), (1.0, 0.3), (0.5, 0.2), (2.0, 0.5)):
        out.append((f"two-ended plummer m={m} eps={eps}", two_ended_harmonic(fam.two_ended_plummer(m, eps))))
    for m in (0.5, 1.0):
        for k in (1.0, 1.5, 4.0):
            out.append((f"schwarzschild m={m} r0={2 * m * k}", exterior_harmonic(fam.schwarzschild(m), 2.0 * m * k)))
    for x in (2.5, 4.0):
        out.append((f"tanh r0={x}", exterior_harmonic(fam.tanh_mass(), x)))
    for eps, s in ((0.1, 0.5), (0.5, 1.0), (1.0, 0.2)):
        out.append((f"plummer eps={eps} s0={s}", exterior_harmonic(fam.plummer(eps), s)))
    return out


@_timed("monotone level-set quantity", 10.0)
def check_monotone_b():
    """``B(t)`` nondecreasing; the two-ended Schwarzschild closed forms; saturation of the mass bound."""
    bad = []
    for label, h in monotone_profiles():
        if not hypotheses_nonneg_curvature(h.profile) or not b_curve(h).nondecreasing:
            bad.append(label)
    worst = 0.0
    h = two_ended_harmonic(fam.isotropic_schwarzschild(1.0))
    for t in np.linspace(0.005, 0.995, 200):
        d = level_data(h, float(t))
        worst = max(worst, _rel(d.B, 4.0 * math.pi * (1.0 + t)), _rel(d.energy, 4.0 * math.pi * t * t * (1.0 - t) ** 2))
    rep = mass_lower_bound_two_ended(fam.isotropic_schwarzschild(1.0))
    sat = abs(rep.lhs - 2.0 * rep.details["coefficient"]) <= 1e-7 and abs(rep.normalized_margin) <= 1e-7
    ok = not bad and worst <= 1e-6 and sat
    return ok, f"{20 - len(bad)}/20 monotone, closed-form rel err {worst:.2e}, m = 2C saturated {sat}"


@_timed("exhaustion limit", 5.0)
def check_exhaustion():
    """Limit capacity equals the two-ended coefficient; exterior potentials increase to the two-ended one."""
    prof = fam.isotropic_schwarzschild(1.0)
    lim = limit_capacity(prof)
    h = two_ended_harmonic(prof)
    gap = abs(lim.value - h.coefficient)
    caps = [c for _, c in lim.exhaustion]
    seq_ok = all(b <= a * (1.0 + 1e-12) for a, b in zip(caps, caps[1:]))
    window = np.linspace(0.25, 4.0, 16)
    prev = None
    mono = True
    diff = math.inf
    for k in range(1, 26):
        ext = exterior_harmonic(prof, 0.25 * 2.0**-k)
        vals = np.array([ext.u(float(x)) for x in window])
        if prev is not None:
            mono &= bool(np.all(vals >= prev - 1e-14))
        prev = vals
        diff = float(np.max(np.abs(vals - np.array([h.u(float(x)) for x in window]))))
    ok = gap <= 1e-8 and seq_ok and mono and diff <= 1e-7
    return ok, f"|c - C| {gap:.2e}, exhaustion monotone {seq_ok}, potentials monotone {mono}, sup gap {diff:.2e}"


# --------------------------------------------------------------------------------------
# horns


HORN_EXPONENTS = (0.51, 0.6, 2.0 / 3.0, 0.7, 0.8, 1.0)


@_timed("horn threshold", 5.0)
def check_horn():
    """Classification by ``sign(3b - 2)``; ``Q`` against its power law; positive-mass witness on a horn."""
    wrong = []
    for b in HORN_EXPONENTS:
        gap = 3.0 * b - 2.0
        expected = "zero" if gap > 1e-12 else ("divergent" if gap < -1e-12 else "finite")
        if horn_classify(HornSpec.power(b)).limit != expected:
            wrong.append(b)
    r = 1e-6
    worst = raw = 0.0
    for b in (0.55, 0.8):
        q = criterion_Q(HornSpec.power(b), r)
        leading = b * (2.0 * b - 1.0) * r ** (3.0 * b - 2.0)
        worst = max(worst, _rel(q, leading / (1.0 - r ** (2.0 * b - 1.0))))
        raw = max(raw, _rel(q, leading))
    w = pmt_witness(fam.horn(0.8), [0.5 * 2.0**-k for k in range(12)])
    ok = not wrong and worst <= 0.01 and w.converged and w.mass >= -VIOL_TOL
    detail = (f"misclassified {wrong or 'none'}, Q rel err {worst:.2e} (leading term alone {raw:.2e}), "
              f"witness rate {w.rate:.3f} converged {w.converged}, m = {w.mass:.6g}")
    return ok, detail


# --------------------------------------------------------------------------------------
# small spheres


@_timed("small-sphere expansion", 10.0)
def check_smallsphere():
    """Willmore coefficients about a smooth center and the r^2 term of the mass-capacity bound."""
    grid = np.geomspace(0.01, 0.1, 12)
    warnings = []
    c0 = c2 = 0.0
    for eps in (0.01, 0.1):
        fit = willmore_expansion_fit(fam.gaussian_bump(eps), grid)
        e0, e2, e4 = fit.relative_errors()
        c0, c2 = max(c0, e0), max(c2, e2)
        if eps == 0.01 and fit.warning:
            warnings.append(fit.warning)
    rep = mass_capacity_expansion_check(fam.gaussian_bump(0.01), grid)
    ok = c0 <= 1e-6 and c2 <= 0.01 and rep.r2_relative_error <= 0.01
    e4 = willmore_expansion_fit(fam.gaussian_bump(0.01), grid).relative_errors()[2]
    detail = f"c0 rel err {c0:.2e}, c2 rel err {c2:.2e}, r^2 coefficient rel err {rep.r2_relative_error:.2e}, c4 rel err {e4:.2e}"
    return ok, detail, warnings


# --------------------------------------------------------------------------------------
# curvature


def curvature_samples(count: int = 50, seed: int = 8):
    """``(profile, coordinate)`` pairs drawn from several families.

    Points lie where the matter is, so that ``R`` is not a tiny remainder
    of much larger, cancelling curvature terms.
    """
    rng = np.random.default_rng(seed)
    out = []
    for i in range(count):
        kind = i % 5
        if kind == 0:
            prof = fam.random_mass_profile(rng)
            x = rng.uniform(prof.lo * 1.05, prof.meta["params"]["r"][-1])
        elif kind == 1:
            scale = rng.uniform(0.5, 2.0)
            prof = fam.tanh_mass(rng.uniform(0.2, 1.0), scale)
            x = rng.uniform(2.3, 2.3 + 1.5 * scale)
        elif kind == 2:
            prof = fam.gaussian_bump(rng.uniform(-0.3, 0.5))
            x = rng.uniform(0.2, 2.0)
        elif kind == 3:
            prof = fam.plummer(rng.uniform(0.05, 2.0))
            x = rng.uniform(0.2, 3.0)
        else:
            prof = fam.power_warp(rng.uniform(0.3, 1.5))
            x = rng.uniform(0.2, 3.0)
        out.append((prof, float(x)))
    return out


@_timed("curvature oracle", 5.0)
def check_curvature(count: int = 50, seed: int = 8):
    """Closed-form scalar curvature against finite-difference Christoffel symbols."""
    worst = 0.0
    for prof, x in curvature_samples(count, seed):
        worst = max(worst, _rel(curvature_oracle(prof, x), scalar_curvature(prof, x)))
    return worst <= 1e-6, f"max rel err {worst:.2e} over {count} profiles"


# --------------------------------------------------------------------------------------

CRITERIA = {
    1: check_capacity,
    2: check_rigidity,
    3: check_sweep,
    4: check_monotone_b,
    5: check_horn,
    6: check_exhaustion,
    7: check_smallsphere,
    8: check_curvature,
    9: check_neg_willmore,
}

SUITES = {
    "equality": (check_capacity, check_rigidity, check_neg_willmore),
    "sweep": (check_sweep,),
    "harmonic": (check_monotone_b, check_exhaustion),
    "horn": (check_horn,),
    "smallsphere": (check_smallsphere,),
    "curvature": (check_curvature,),
}


def run_suite(name: str, *, count: int = 100, seed: int = 42) -> list[CheckResult]:
    """Run a named suite (or ``"all"``); ``count`` and ``seed`` configure the sweep."""
    checks = [c for group in SUITES.values() for c in group] if name == "all" else SUITES[name]
    return [check(count=count, seed=seed) if check is check_sweep else check() for check in checks]
