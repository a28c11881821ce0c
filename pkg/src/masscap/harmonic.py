"""Radial harmonic functions, their level-set energies and the quantity ``B(t)``.

A radial function ``u`` is harmonic exactly when ``a^2 du/dt`` is constant,
so every harmonic function here has the form

    u(x) = int_{inner}^{x} a^{-2} dt / int_{inner}^{inf} a^{-2} dt

with ``inner`` either a slice (the exterior potential, ``u = 0`` on the
slice) or the far end of the domain (the two-ended potential).  The
integrals are tabulated once on a dyadic set of anchor slices, from which
``u`` and its levels are recovered without cancellation near either end.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field

import numpy as np

from ._numerics import extrapolate_limit, newton_bracketed, quad
from .capacity import capacity_exterior, inner_shells, reference_coord
from .errors import AsymptoticsError, CapacityError, DomainError, NoHarmonicFunctionError
from .geometry import FOUR_PI, Profile, RadialProfile

_PIECE_TOL = 1e-13


def _piece(profile: Profile, x0: float, x1: float) -> float:
    """``int_{x0}^{x1} a^{-2} dt`` for ``x0 <= x1`` on a short interval."""
    if x1 <= x0:
        return 0.0
    if isinstance(profile, RadialProfile):
        # same horizon-aware rule as the capacity integrals
        return profile.inv_area_integral(x0, x1)[0]
    return quad(profile.density, x0, x1, _PIECE_TOL)[0]


@dataclass(frozen=True)
class HarmonicProfile:
    """A radial harmonic function with ``u -> 1`` at the AF end.

    ``kappa`` is the constant flux ``a^2 du/dt``; ``coefficient`` is the
    constant ``C`` in ``u = 1 - C/|x| + o(1/|x|)``, measured from the
    asymptotics of ``u``.  ``anchors`` are slice coordinates at which the
    integral of ``a^{-2}`` below (``inner``) and above (``outer``) is known.
    """

    profile: Profile
    inner_coord: float
    two_ended: bool
    integral: float
    kappa: float
    coefficient: float
    anchors: tuple[float, ...] = field(repr=False)
    inner: tuple[float, ...] = field(repr=False)
    outer: tuple[float, ...] = field(repr=False)

    # --- values ------------------------------------------------------------------------
    def _locate(self, x: float) -> int:
        i = bisect.bisect_right(self.anchors, x) - 1
        return min(max(i, 0), len(self.anchors) - 2)

    def below(self, x: float) -> float:
        """``int a^{-2}`` from the inner end up to ``x``."""
        x = float(x)
        if x == self.inner_coord:
            return 0.0
        if x <= self.anchors[0]:
            return self.inner[0] - _piece(self.profile, x, self.anchors[0])
        i = self._locate(x)
        return self.inner[i] + _piece(self.profile, self.anchors[i], x)

    def above(self, x: float) -> float:
        """``int a^{-2}`` from ``x`` to the AF end."""
        x = float(x)
        if x >= self.anchors[-1]:
            return self.profile.inv_area_integral(x)[0]
        if x <= self.anchors[0]:
            return self.outer[0] + _piece(self.profile, x, self.anchors[0])
        i = self._locate(x)
        return self.outer[i + 1] + _piece(self.profile, x, self.anchors[i + 1])

    def u(self, x: float) -> float:
        x = self.profile.check(x) if x != self.inner_coord else float(x)
        if x > self.anchors[-1] or (x >= self.anchors[0] and self.inner[self._locate(x)] > 0.5 * self.integral):
            return 1.0 - self.above(x) / self.integral
        return self.below(x) / self.integral

    def one_minus_u(self, x: float) -> float:
        return self.above(x) / self.integral

    def gradient(self, x: float) -> float:
        """``|grad u|`` on the slice ``x``."""
        a = self.profile.warp(x)
        return self.kappa / (a * a)

    def flux(self, x: float) -> float:
        """``a^2 du/dt`` evaluated from :meth:`gradient`; constant for a harmonic ``u``."""
        return self.gradient(x) * self.profile.warp(x) ** 2

    def slice_energy(self, x: float) -> float:
        """``int_{Sigma_x} |grad u|^2 = |Sigma|_sigma kappa^2 / a^2``."""
        a = self.profile.warp(x)
        return self.profile.sigma_area * self.kappa**2 / (a * a)

    # --- levels ------------------------------------------------------------------------
    @property
    def resolved_min_level(self) -> float:
        """Smallest level value reachable from the anchor table."""
        return self.inner[0] / self.integral

    def level_coord(self, t: float) -> float:
        """Coordinate of the slice ``u = t`` for a regular value ``0 < t < 1``."""
        if not 0.0 < t < 1.0:
            raise DomainError(f"level {t!r} outside (0, 1)")
        density = self.profile.density
        ftol = 1e-14 * self.integral
        if t <= 0.5:
            target = t * self.integral
            if target < self.inner[0]:
                raise DomainError(f"level {t!r} lies below the resolved range {self.resolved_min_level:.3g}")
            i = min(bisect.bisect_right(self.inner, target) - 1, len(self.anchors) - 2)
            lo, hi, base = self.anchors[i], self.anchors[i + 1], self.inner[i]
            return newton_bracketed(lambda x: base + _piece(self.profile, lo, x) - target, density, lo, hi, ftol=ftol)
        target = (1.0 - t) * self.integral
        if target < self.outer[-1]:
            # beyond the table: widen geometrically
            lo = self.anchors[-1]
            hi = 2.0 * lo if lo > 0 else 1.0
            while self.profile.inv_area_integral(hi)[0] > target:
                lo, hi = hi, 2.0 * hi
            return newton_bracketed(lambda x: target - self.profile.inv_area_integral(x)[0], density, lo, hi, ftol=ftol)
        neg = [-v for v in self.outer]
        j = min(max(bisect.bisect_right(neg, -target), 1), len(self.anchors) - 1)
        lo, hi, base = self.anchors[j - 1], self.anchors[j], self.outer[j]
        return newton_bracketed(lambda x: target - base - _piece(self.profile, x, hi), density, lo, hi, ftol=ftol)


def _coefficient(profile: Profile, one_minus_u, start: float) -> float:
    """``lim r_Sigma (1 - u)`` along the AF end."""
    xs = [start * 2.0**j for j in range(24)]
    seq = [profile.area_radius(x) * one_minus_u(x) for x in xs]
    value, _ = extrapolate_limit(seq)
    return value


def _build(profile: Profile, inner_coord: float, two_ended: bool) -> HarmonicProfile:
    if two_ended:
        x_ref = reference_coord(profile)
        shells = inner_shells(profile, x_ref)
        if shells.divergent:
            raise NoHarmonicFunctionError(
                "integral of a^-2 diverges toward the inner end: no bounded harmonic function "
                "tends to 0 there (the infimum capacity is 0)")
    else:
        x_ref = inner_coord + max(1.0, abs(inner_coord))
        shells = inner_shells(profile, x_ref, end=inner_coord, levels=45)
        if shells.divergent:
            raise CapacityError("integral of a^-2 diverges at the slice")
    # anchors ascend from the deepest shell through x_ref to far out on the AF end
    coords_in = list(shells.coords[::-1])
    width = max(1.0, abs(x_ref))
    coords_out = []
    rough = shells.total + profile.inv_area_integral(x_ref)[0]
    for k in range(1, 64):
        x = x_ref + width * (2.0**k - 1.0)
        coords_out.append(x)
        if profile.inv_area_integral(x)[0] < 1e-13 * rough:
            break
    anchors = tuple(coords_in + coords_out)
    # every table entry is built from the same pieces used when solving for levels
    pieces = [_piece(profile, x0, x1) for x0, x1 in zip(anchors[:-1], anchors[1:])]
    n_in = len(coords_in)
    inner_vals = np.cumsum([shells.tail] + pieces[: n_in - 1])
    outer_vals = np.cumsum([profile.inv_area_integral(anchors[-1])[0]] + pieces[::-1])[::-1]
    total = float(inner_vals[-1] + outer_vals[n_in - 1])
    inner = tuple(float(v) for v in inner_vals) + tuple(total - float(v) for v in outer_vals[n_in:])
    outer = tuple(total - float(v) for v in inner_vals[:-1]) + tuple(float(v) for v in outer_vals[n_in - 1:])
    kappa = 1.0 / total
    probe = HarmonicProfile(profile, inner_coord, two_ended, total, kappa, math.nan, anchors, inner, outer)
    start = max(4.0, 4.0 * abs(x_ref))
    try:
        coefficient = _coefficient(profile, probe.one_minus_u, start)
    except AsymptoticsError:
        coefficient = math.nan
    return HarmonicProfile(profile, inner_coord, two_ended, total, kappa, coefficient, anchors, inner, outer)


def exterior_harmonic(profile: Profile, slice_coord: float) -> HarmonicProfile:
    """Harmonic ``u`` with ``u = 0`` on the slice and ``u -> 1`` at the AF end."""
    capacity_exterior(profile, slice_coord)  # validates the AF end and the slice
    return _build(profile, float(slice_coord), False)


def two_ended_harmonic(profile: Profile) -> HarmonicProfile:
    """Harmonic ``0 < u < 1`` with ``u -> 0`` at the inner end and ``u -> 1`` at the AF end.

    A boundary at the inner end (closed domain) reduces this to the exterior
    potential of the boundary slice.
    """
    if not profile.af_end:
        raise CapacityError(f"profile {profile.label!r} has no asymptotically flat end")
    if profile.lo_closed:
        return exterior_harmonic(profile, profile.lo)
    return _build(profile, profile.lo, True)


# --------------------------------------------------------------------------------------
# level sets


@dataclass(frozen=True)
class LevelSetData:
    t: float
    coord: float
    energy: float
    B: float


def _b_value(t: float, energy: float) -> float:
    s = 1.0 - t
    return (FOUR_PI - energy / (s * s)) / s


def level_energy(h: HarmonicProfile, t: float) -> float:
    """``int_{u = t} |grad u|^2`` for a regular value ``t`` in ``(0, 1)``."""
    return h.slice_energy(h.level_coord(t))


def level_data(h: HarmonicProfile, t: float) -> LevelSetData:
    x = h.level_coord(t)
    e = h.slice_energy(x)
    return LevelSetData(t, x, e, _b_value(t, e))


def B_of_t(h: HarmonicProfile, t: float) -> float:
    """``(1/(1-t)) [4 pi - (1-t)^{-2} int_{u = t} |grad u|^2]``."""
    return _b_value(t, level_energy(h, t))


@dataclass(frozen=True)
class EnergyLimit:
    value: float
    finite: bool
    error_estimate: float
    levels: tuple[float, ...]
    energies: tuple[float, ...]


def level_energy_limit(h: HarmonicProfile, *, max_halvings: int = 40) -> EnergyLimit:
    """Limit of the level energy as ``t -> 0``, from levels ``t = 2^{-j}``.

    For an exterior potential this is the energy of the boundary slice.  For
    a two-ended potential the sequence is extrapolated; ``finite`` is unset
    when it grows without bound.
    """
    if not h.two_ended:
        e = h.slice_energy(h.inner_coord)
        return EnergyLimit(e, True, 0.0, (0.0,), (e,))
    floor = 4.0 * h.resolved_min_level
    ts = [2.0**-j for j in range(1, max_halvings + 1) if 2.0**-j >= floor]
    es = [level_energy(h, t) for t in ts]
    if len(es) >= 4 and all(es[-k] > 1.2 * es[-k - 1] for k in range(1, 4)):
        return EnergyLimit(math.inf, False, math.inf, tuple(ts), tuple(es))
    # extrapolate sqrt(E), the quantity the mass bounds consume; it is linear in t for smooth ends
    try:
        root, err = extrapolate_limit([math.sqrt(e) for e in es])
    except AsymptoticsError:
        return EnergyLimit(es[-1], False, math.inf, tuple(ts), tuple(es))
    root = max(root, 0.0)
    return EnergyLimit(root * root, True, 2.0 * root * err + err * err, tuple(ts), tuple(es))


@dataclass(frozen=True)
class BCurve:
    levels: np.ndarray
    values: np.ndarray
    energies: np.ndarray
    nondecreasing: bool


def b_curve(h: HarmonicProfile, levels=None, *, slack: float = 1e-8) -> BCurve:
    """``B`` on a grid of levels (200 points in ``[0.005, 0.995]`` by default) with a monotonicity flag."""
    ts = np.linspace(0.005, 0.995, 200) if levels is None else np.asarray(levels, dtype=float)
    ts = ts[ts >= h.resolved_min_level]
    es = np.array([level_energy(h, float(t)) for t in ts])
    bs = (FOUR_PI - es / (1.0 - ts) ** 2) / (1.0 - ts)
    ok = bool(np.all(np.diff(bs) >= -slack))
    return BCurve(ts, bs, es, ok)


# --------------------------------------------------------------------------------------
# gradient ratio


@dataclass(frozen=True)
class GradientRatio:
    """Empirical ``sup u^{-1} |grad u|`` over levels.

    ``energy_bound_ok`` records ``E(t) <= 4 pi C Lambda t`` on the sampled
    levels when the ratio is bounded.
    """

    value: float
    bounded: bool
    complete: bool
    energy_bound_ok: bool | None
    levels: tuple[float, ...]
    ratios: tuple[float, ...]


def gradient_ratio(h: HarmonicProfile, *, max_halvings: int = 30) -> GradientRatio:
    floor = 4.0 * h.resolved_min_level
    small = [2.0**-j for j in range(max_halvings, 1, -1) if 2.0**-j >= floor]
    ts = small + list(np.linspace(0.5, 0.99, 50))
    data = [(t, h.gradient(h.level_coord(t)) / t) for t in ts]
    ratios = [q for _, q in data]
    head = ratios[: min(4, len(small))]
    # toward t -> 0 the ratio either settles or grows like a power of 1/t
    growing = len(head) >= 3 and all(head[k] > 1.5 * head[k + 1] for k in range(len(head) - 1))
    if growing:
        return GradientRatio(math.inf, False, h.profile.complete, None, tuple(ts), tuple(ratios))
    lam = float(max(ratios))
    coeff = h.coefficient
    energy_ok = all(level_energy(h, t) <= FOUR_PI * coeff * lam * t * (1.0 + 1e-9) for t in ts)
    return GradientRatio(lam, True, h.profile.complete, energy_ok, tuple(ts), tuple(ratios))


def boundary_energy(profile: Profile, slice_coord: float) -> float:
    """``int_Sigma |grad u|^2`` of the exterior potential on its own slice.

    Equals ``|Sigma|_sigma kappa^2 / a^2`` with the flux ``kappa`` fixed by the
    capacity; no level table is built.
    """
    cap = capacity_exterior(profile, slice_coord).value
    kappa = FOUR_PI * cap / profile.sigma_area
    a = profile.warp(slice_coord)
    return profile.sigma_area * kappa * kappa / (a * a)
