"""Signed-margin evaluation of the mass, capacity and Willmore inequalities.

Every check returns an :class:`InequalityReport`.  ``lhs`` and ``rhs`` are
the two sides as the inequality is written; ``margin`` is the slack in the
direction of the inequality, so it is nonnegative exactly when the
inequality holds (``lhs - rhs`` for ``>=``, ``rhs - lhs`` for ``<=``).
``hypothesis_ok`` records whether the input is certified to satisfy the
hypotheses under which the inequality is a theorem; margins are only
expected to be nonnegative when it is set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from ._numerics import power_rate
from .capacity import capacity_exterior, limit_capacity
from .errors import AsymptoticsError
from .geometry import (
    SIXTEEN_PI,
    FOUR_PI,
    Profile,
    SurfaceSlice,
    adm_mass,
    hypotheses_nonneg_curvature,
)
from .harmonic import boundary_energy, gradient_ratio, level_energy_limit, two_ended_harmonic

EQ_TOL = 1e-7
VIOL_TOL = 1e-9


@dataclass(frozen=True)
class InequalityReport:
    name: str
    lhs: float
    rhs: float
    sense: str
    margin: float
    normalized_margin: float
    equality: bool
    hypothesis_ok: bool
    hypotheses: dict = field(default_factory=dict)
    rigidity: bool = False
    mean_curvature_nonneg: bool | None = None
    notes: tuple[str, ...] = ()
    details: dict = field(default_factory=dict)

    def holds(self, viol_tol: float = VIOL_TOL) -> bool:
        return self.normalized_margin >= -viol_tol

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "sense": self.sense,
            "margin": self.margin,
            "normalized_margin": self.normalized_margin,
            "equality": self.equality,
            "hypothesis_ok": self.hypothesis_ok,
            "rigidity": self.rigidity,
            "hypotheses": dict(self.hypotheses),
            "notes": list(self.notes),
        }


def _report(name, lhs, rhs, sense, scale, hypotheses, *, eq_tol=EQ_TOL, **extra) -> InequalityReport:
    margin = lhs - rhs if sense == ">=" else rhs - lhs
    if math.isinf(lhs) or math.isinf(rhs):
        normalized = math.copysign(math.inf, margin) if margin != 0 else 0.0
    else:
        normalized = margin / scale if scale > 0 else margin
    equality = abs(normalized) <= eq_tol
    ok = all(hypotheses.values())
    return InequalityReport(name, float(lhs), float(rhs), sense, float(margin), float(normalized),
                            bool(equality), bool(ok), dict(hypotheses), **extra)


def _ratio_scale(lhs, rhs) -> float:
    return max(1.0, abs(lhs), abs(rhs))


def _mass_scale(*values) -> float:
    finite = [abs(v) for v in values if math.isfinite(v)]
    return max(finite) if finite and max(finite) > 0 else 1.0


# --------------------------------------------------------------------------------------
# hypotheses


@lru_cache(maxsize=4096)
def _curvature_certified(profile: Profile, x0: float | None) -> bool:
    return hypotheses_nonneg_curvature(profile, x0)


def _af_certified(profile: Profile) -> bool:
    if not profile.af_end:
        return False
    try:
        adm_mass(profile)
    except AsymptoticsError:
        return False
    return True


def certify(profile: Profile, x0: float | None = None) -> dict:
    """Hypothesis flags for the region outside the slice ``x0`` (whole domain if None)."""
    return {
        "nonneg_scalar_curvature": _curvature_certified(profile, None if x0 is None else float(x0)),
        "asymptotically_flat": _af_certified(profile),
    }


def _schwarzschild_like(profile: Profile, x0: float, tol: float = 1e-9) -> bool:
    """Hawking mass constant on the exterior slices (the model family)."""
    w = max(1.0, abs(x0))
    ms = [profile.quasi_local_mass(x0 + w * k) for k in (0.0, 0.5, 1.0, 3.0, 15.0)]
    ref = max(1.0, max(abs(m) for m in ms))
    return max(ms) - min(ms) <= tol * ref


@dataclass(frozen=True)
class _SliceData:
    mass: float
    capacity: float
    willmore: float
    area_radius: float
    hawking: float
    mean_curvature: float


def _slice_data(profile: Profile, x0: float) -> _SliceData:
    sl = SurfaceSlice(profile, x0)
    return _SliceData(
        mass=adm_mass(profile).value,
        capacity=capacity_exterior(profile, x0).value,
        willmore=sl.willmore,
        area_radius=sl.area_radius,
        hawking=sl.hawking_mass,
        mean_curvature=sl.mean_curvature,
    )


def _finish(rep: InequalityReport, profile: Profile, x0: float, d: _SliceData) -> InequalityReport:
    rigid = rep.equality and _schwarzschild_like(profile, x0)
    notes = rep.notes
    if not rep.hypothesis_ok:
        notes = notes + ("hypotheses not certified: a negative margin does not contradict the theorem",)
    return InequalityReport(
        rep.name, rep.lhs, rep.rhs, rep.sense, rep.margin, rep.normalized_margin, rep.equality,
        rep.hypothesis_ok, rep.hypotheses, rigid, d.mean_curvature >= 0.0, notes, rep.details,
    )


# --------------------------------------------------------------------------------------
# slice inequalities


def margin_mass_capacity(profile: Profile, slice_coord: float, *, eq_tol: float = EQ_TOL) -> InequalityReport:
    """``m / c_Sigma >= 1 - sqrt(W / 16 pi)``."""
    d = _slice_data(profile, slice_coord)
    lhs = d.mass / d.capacity
    rhs = 1.0 - math.sqrt(d.willmore / SIXTEEN_PI)
    rep = _report("mass_capacity", lhs, rhs, ">=", _ratio_scale(lhs, rhs), certify(profile, slice_coord),
                  eq_tol=eq_tol)
    return _finish(rep, profile, slice_coord, d)


def margin_energy_willmore(profile: Profile, slice_coord: float, *, eq_tol: float = EQ_TOL) -> InequalityReport:
    """``sqrt((1/pi) int_Sigma |grad u|^2) <= sqrt(W / 16 pi) + 1`` for the exterior potential ``u``."""
    d = _slice_data(profile, slice_coord)
    lhs = math.sqrt(boundary_energy(profile, slice_coord) / math.pi)
    rhs = math.sqrt(d.willmore / SIXTEEN_PI) + 1.0
    rep = _report("energy_willmore", lhs, rhs, "<=", _ratio_scale(lhs, rhs), certify(profile, slice_coord),
                  eq_tol=eq_tol)
    return _finish(rep, profile, slice_coord, d)


def margin_mass_energy(profile: Profile, slice_coord: float, *, eq_tol: float = EQ_TOL) -> InequalityReport:
    """``m / (2 c_Sigma) >= 1 - sqrt((1/4 pi) int_Sigma |grad u|^2)``."""
    d = _slice_data(profile, slice_coord)
    lhs = d.mass / (2.0 * d.capacity)
    rhs = 1.0 - math.sqrt(boundary_energy(profile, slice_coord) / FOUR_PI)
    rep = _report("mass_energy", lhs, rhs, ">=", _ratio_scale(lhs, rhs), certify(profile, slice_coord),
                  eq_tol=eq_tol)
    return _finish(rep, profile, slice_coord, d)


def margin_capacity_radius(profile: Profile, slice_coord: float, *, eq_tol: float = EQ_TOL) -> InequalityReport:
    """``2 c_Sigma / r_Sigma <= sqrt(W / 16 pi) + 1``."""
    d = _slice_data(profile, slice_coord)
    lhs = 2.0 * d.capacity / d.area_radius
    rhs = math.sqrt(d.willmore / SIXTEEN_PI) + 1.0
    rep = _report("capacity_radius", lhs, rhs, "<=", _ratio_scale(lhs, rhs), certify(profile, slice_coord),
                  eq_tol=eq_tol)
    return _finish(rep, profile, slice_coord, d)


def margin_hawking_chain(profile: Profile, slice_coord: float, *,
                         eq_tol: float = EQ_TOL) -> tuple[InequalityReport, InequalityReport]:
    """``m >= c_Sigma (1 - sqrt(W/16 pi)) >= m_H(Sigma)``, valid when ``W >= 16 pi``.

    When the Willmore energy is below ``16 pi`` both reports carry
    ``hypothesis_ok = False``.
    """
    d = _slice_data(profile, slice_coord)
    middle = d.capacity * (1.0 - math.sqrt(d.willmore / SIXTEEN_PI))
    hyp = certify(profile, slice_coord)
    hyp["willmore_at_least_16pi"] = d.willmore >= SIXTEEN_PI * (1.0 - eq_tol)
    notes = () if hyp["willmore_at_least_16pi"] else ("precondition W >= 16 pi fails",)
    scale = _mass_scale(d.mass, middle, d.hawking, d.capacity)
    first = _report("hawking_chain_mass", d.mass, middle, ">=", scale, hyp, eq_tol=eq_tol, notes=notes)
    second = _report("hawking_chain_hawking", middle, d.hawking, ">=", scale, hyp, eq_tol=eq_tol, notes=notes)
    return _finish(first, profile, slice_coord, d), _finish(second, profile, slice_coord, d)


def slice_reports(profile: Profile, slice_coord: float, *, eq_tol: float = EQ_TOL) -> list[InequalityReport]:
    """All slice inequalities, in a fixed order."""
    return [
        margin_mass_capacity(profile, slice_coord, eq_tol=eq_tol),
        margin_energy_willmore(profile, slice_coord, eq_tol=eq_tol),
        margin_mass_energy(profile, slice_coord, eq_tol=eq_tol),
        margin_capacity_radius(profile, slice_coord, eq_tol=eq_tol),
        *margin_hawking_chain(profile, slice_coord, eq_tol=eq_tol),
    ]


# --------------------------------------------------------------------------------------
# negative-mass Willmore bound


def neg_schwarzschild_willmore(profile: Profile, slice_coord: float, *, eq_tol: float = EQ_TOL,
                               halvings: int = 20) -> InequalityReport:
    """``W(Sigma) >= 16 pi (1 + 2|m|/r_max)`` on the negative-mass Schwarzschild manifold.

    For a slice ``r_max`` is its own radius.  ``details`` carries the Willmore
    energies of the slices ``r 2^{-k}``, their fitted power rate in ``r`` and
    an unboundedness flag.
    """
    m = adm_mass(profile).value
    if m > 0:
        raise ValueError("profile must have nonpositive mass")
    r = SurfaceSlice(profile, slice_coord).area_radius
    w = SurfaceSlice(profile, slice_coord).willmore
    bound = SIXTEEN_PI * (1.0 + 2.0 * abs(m) / r)
    radii = [slice_coord * 2.0**-k for k in range(halvings + 1)]
    energies = [SurfaceSlice(profile, x).willmore for x in radii]
    # W - 16 pi isolates the singular part, whose rate is -1 for this family
    excess = np.array(energies) - SIXTEEN_PI
    rate = power_rate(radii[-8:], excess[-8:]) if np.all(excess[-8:] > 0) else 0.0
    unbounded = bool(all(b > a for a, b in zip(energies, energies[1:])) and energies[-1] > 1e3 * energies[0])
    hyp = {"asymptotically_flat": _af_certified(profile)}
    return _report("neg_mass_willmore", w, bound, ">=", _mass_scale(w, bound), hyp, eq_tol=eq_tol,
                   details={"radii": radii, "willmore": energies, "rate": rate, "unbounded": unbounded})


# --------------------------------------------------------------------------------------
# positive-mass witnesses


@dataclass(frozen=True)
class WitnessReport:
    """Sequence ``c_k W_k^{1/2}`` (capacity mode) or ``r_k W_k`` (radius mode) along shrinking slices."""

    mode: str
    coords: tuple[float, ...]
    products: tuple[float, ...]
    rate: float
    converged: bool
    monotone: bool
    mass: float
    mass_nonneg: bool
    hypothesis_ok: bool
    hypotheses: dict


def pmt_witness(profile: Profile, shrinking_coords, mode: str = "capacity", *,
                rate_threshold: float = 0.02, mass_tol: float = VIOL_TOL) -> WitnessReport:
    """Check whether the witness product tends to 0 toward the inner end.

    The decay rate is the fitted power of the product against the area
    radius of the slices; the sequence counts as converging to 0 when that
    rate exceeds ``rate_threshold``.  The ADM mass is computed directly for
    comparison.
    """
    if mode not in ("capacity", "radius"):
        raise ValueError("mode must be 'capacity' or 'radius'")
    xs = tuple(float(x) for x in shrinking_coords)
    if len(xs) < 3:
        raise ValueError("need at least three slices")
    products, radii = [], []
    for x in xs:
        sl = SurfaceSlice(profile, x)
        if mode == "capacity":
            products.append(capacity_exterior(profile, x).value * math.sqrt(sl.willmore))
        else:
            products.append(sl.area_radius * sl.willmore)
        radii.append(sl.area_radius)
    monotone = all(b <= a for a, b in zip(products, products[1:]))
    rate = power_rate(radii, products) if all(p > 0 for p in products) else math.nan
    converged = bool(rate > rate_threshold) or all(p == 0.0 for p in products[-3:])
    mass = adm_mass(profile).value
    hyp = certify(profile)
    return WitnessReport(mode, xs, tuple(products), rate, converged, monotone, mass,
                         mass >= -mass_tol, all(hyp.values()), hyp)


def mass_lower_bound_two_ended(profile: Profile, *, eq_tol: float = EQ_TOL) -> InequalityReport:
    """``m >= 2 c(M,g) [1 - sqrt(lim_{t->0} E(t) / 4 pi)]`` from the two-ended potential.

    When the gradient ratio is bounded on a complete profile the level
    energy vanishes in the limit and the bound reads ``m >= 2 C``.
    """
    h = two_ended_harmonic(profile)
    cap = limit_capacity(profile).value
    limit = level_energy_limit(h)
    mass = adm_mass(profile).value
    rhs = 2.0 * cap * (1.0 - math.sqrt(limit.value / FOUR_PI)) if limit.finite else -math.inf
    notes = []
    details = {"energy_limit": limit.value, "energy_limit_finite": limit.finite, "coefficient": h.coefficient,
               "limit_capacity": cap}
    if h.two_ended:
        grad = gradient_ratio(h)
        details.update(gradient_ratio=grad.value, gradient_bounded=grad.bounded, complete=profile.complete)
        if grad.bounded and profile.complete:
            details["saturates_2C"] = abs(rhs - 2.0 * h.coefficient) <= eq_tol * max(1.0, abs(rhs))
            notes.append("bounded gradient ratio on a complete profile: bound reads m >= 2C, hence m >= C")
    else:
        notes.append("inner boundary: reduces to the mass-energy inequality of the boundary slice")
    hyp = certify(profile)
    return _report("mass_lower_bound", mass, rhs, ">=", _mass_scale(mass, rhs, cap), hyp, eq_tol=eq_tol,
                   notes=tuple(notes), details=details)


__all__ = [
    "EQ_TOL",
    "VIOL_TOL",
    "InequalityReport",
    "WitnessReport",
    "certify",
    "margin_capacity_radius",
    "margin_energy_willmore",
    "margin_hawking_chain",
    "margin_mass_capacity",
    "margin_mass_energy",
    "mass_lower_bound_two_ended",
    "neg_schwarzschild_willmore",
    "pmt_witness",
    "slice_reports",
]
