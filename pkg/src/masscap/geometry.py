"""Rotationally symmetric metrics and the functionals of their coordinate slices.

Three interchangeable descriptions of a symmetric 3-metric are supported:

* :class:`WarpedProfile` -- ``dt^2 + a(t)^2 sigma`` in arc length ``t``;
* :class:`RadialProfile` -- ``f(r)^{-1} dr^2 + r^2 sigma_0`` with
  ``f = 1 - 2 m(r)/r`` given through the mass function ``m``;
* :class:`ConformalProfile` -- ``psi(s)^4 (ds^2 + s^2 sigma_0)`` with
  ``psi = 1 + h(s)``.

Every profile works in its own *native* coordinate ``x`` (``t``, ``r`` or
``s``) and exposes the same small surface: the warp ``a(x)``, its arc-length
derivatives, the density ``a^{-2} dt/dx`` whose integral drives capacities
and harmonic functions, and the scalar curvature.  All objects are frozen;
every operation is a pure function of its inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np

from ._numerics import extrapolate_limit, log_quad, quad, solve_increasing
from .errors import AsymptoticsError, DomainError, EvaluationError, HorizonError

FOUR_PI = 4.0 * math.pi
SIXTEEN_PI = 16.0 * math.pi

Fn = Callable[[float], float]


class Profile:
    """Shared behavior of the three profile types (fields live on the subclasses)."""

    sigma_area: float
    sigma_min_gauss: float
    af_end: bool
    decay_order: float
    complete: bool
    label: str

    # --- required per representation -------------------------------------------------
    @property
    def lo(self) -> float:
        raise NotImplementedError

    @property
    def lo_closed(self) -> bool:
        raise NotImplementedError

    def warp(self, x):
        raise NotImplementedError

    def warp_slope(self, x):
        """``da/dt`` in arc length."""
        raise NotImplementedError

    def warp_curvature(self, x):
        """``d^2a/dt^2`` in arc length."""
        raise NotImplementedError

    def arc_density(self, x):
        """``dt/dx``."""
        raise NotImplementedError

    def scalar_curvature(self, x):
        raise NotImplementedError

    def metric_components(self, x: float, theta: float) -> np.ndarray:
        raise NotImplementedError

    def mass_sequence(self, x):
        """Quantity whose limit at the AF end is the ADM mass."""
        return self.quasi_local_mass(x)

    def scaled(self, lam: float) -> "Profile":
        raise NotImplementedError

    # --- derived ---------------------------------------------------------------------
    hi = math.inf

    def check(self, x: float) -> float:
        x = float(x)
        if not math.isfinite(x) or x < self.lo or (x == self.lo and not self.lo_closed):
            raise DomainError(f"coordinate {x!r} outside the domain of {self.label!r} (lo={self.lo!r})")
        return x

    def density(self, x):
        """Integrand of ``int a^{-2} dt`` in the native coordinate."""
        return self.arc_density(x) / self.warp(x) ** 2

    def density_array(self, xs) -> np.ndarray:
        """:meth:`density` over an array, vectorized when the profile callables allow it."""
        xs = np.asarray(xs, dtype=float)
        try:
            with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
                out = np.asarray(self._density_vec(xs), dtype=float)
            if out.shape == xs.shape:
                return out
        except (TypeError, ValueError):
            pass
        return np.array([self.density(float(x)) for x in xs.ravel()]).reshape(xs.shape)

    def _density_vec(self, xs):
        raise TypeError("no vectorized density")

    def tail_density(self, u):
        """``density(1/u) / u^2``; bounded near ``u = 0`` on an AF end."""
        x = 1.0 / u
        return self.density(x) * x * x

    def area_radius(self, x) -> float:
        return self.warp(x) * math.sqrt(self.sigma_area / FOUR_PI)

    def quasi_local_mass(self, x) -> float:
        a1 = self.warp_slope(x)
        return 0.5 * self.area_radius(x) * (1.0 - a1 * a1 * self.sigma_area / FOUR_PI)

    def _split(self) -> float:
        return max(1.0, self.lo if math.isfinite(self.lo) else 1.0)

    def inv_area_integral(self, x0: float, x1: float = math.inf) -> tuple[float, float]:
        """``int_{x0}^{x1} a(t)^{-2} dt`` in native coordinates, with error estimate.

        An infinite upper limit is handled by the substitution ``x = 1/u``; an
        infinite lower limit (``t -> -inf`` on a warped profile) by
        ``x = -1/u``.  Long positive ranges are integrated in ``log x``.
        """
        if x1 < x0:
            raise DomainError(f"inverted interval [{x0}, {x1}]")
        total, err = 0.0, 0.0
        if math.isinf(x0):
            y = min(-1.0, x1)
            v, e = quad(lambda u: self.density(-1.0 / u) / (u * u), 0.0, -1.0 / y)
            total, err = total + v, err + e
            x0 = y
        if math.isinf(x1):
            cut = max(x0, self._split())
            v, e = quad(self.tail_density, 0.0, 1.0 / cut)
            total, err = total + v, err + e
            x1 = cut
        if x1 > x0:
            if x0 > 0.0 and x1 > 4.0 * x0:
                v, e = log_quad(self.density, x0, x1)
            else:
                v, e = quad(self.density, x0, x1)
            total, err = total + v, err + e
        return total, err


@dataclass(frozen=True)
class WarpedProfile(Profile):
    """``dt^2 + a(t)^2 sigma`` on ``(t_min, inf)``.

    ``sigma`` enters only through its area and a lower bound on its Gauss
    curvature; for the unit round sphere these are ``4 pi`` and ``1``.
    """

    warp_fn: Fn
    warp_d1: Fn
    warp_d2: Fn
    t_min: float = 0.0
    t_min_closed: bool = False
    sigma_area: float = FOUR_PI
    sigma_min_gauss: float = 1.0
    af_end: bool = True
    decay_order: float = 1.0
    complete: bool = False
    label: str = "warped"
    meta: dict = field(default_factory=dict, compare=False, hash=False, repr=False)

    def __post_init__(self):
        if not self.sigma_area > 0:
            raise ValueError("sigma_area must be positive")

    @property
    def lo(self):
        return self.t_min

    @property
    def lo_closed(self):
        return self.t_min_closed

    def warp(self, x):
        return self.warp_fn(x)

    def warp_slope(self, x):
        return self.warp_d1(x)

    def warp_curvature(self, x):
        return self.warp_d2(x)

    def arc_density(self, x):
        return 1.0 + 0.0 * x

    def density(self, x):
        return 1.0 / self.warp_fn(x) ** 2

    def _density_vec(self, xs):
        return 1.0 / np.asarray(self.warp_fn(xs)) ** 2

    def _split(self):
        return max(1.0, 2.0 * self.t_min if math.isfinite(self.t_min) else 1.0)

    def scalar_curvature(self, x):
        """Scalar curvature; a lower bound when ``sigma`` is not round."""
        a, a1, a2 = self.warp_fn(x), self.warp_d1(x), self.warp_d2(x)
        return 2.0 * (self.sigma_min_gauss - a1 * a1) / (a * a) - 4.0 * a2 / a

    def metric_components(self, x, theta):
        a = self.warp_fn(x)
        return np.diag([1.0, a * a, (a * math.sin(theta)) ** 2])

    def scaled(self, lam):
        a, a1, a2 = self.warp_fn, self.warp_d1, self.warp_d2
        return WarpedProfile(
            lambda t: lam * a(t / lam), lambda t: a1(t / lam), lambda t: a2(t / lam) / lam,
            t_min=lam * self.t_min, t_min_closed=self.t_min_closed, sigma_area=self.sigma_area,
            sigma_min_gauss=self.sigma_min_gauss, af_end=self.af_end, decay_order=self.decay_order,
            complete=self.complete, label=self.label, meta={**self.meta, "scale": lam},
        )


@dataclass(frozen=True)
class RadialProfile(Profile):
    """``(1 - 2m(r)/r)^{-1} dr^2 + r^2 sigma_0`` on ``[r_min, inf)``.

    The mass function is primary: ``f`` is derived from it, so that the
    quasi-local (Hawking) mass of the slice ``r`` is ``m(r)`` up to round-off.
    """

    mass: Fn
    mass_d1: Fn
    r_min: float = 0.0
    r_min_closed: bool = False
    af_end: bool = True
    decay_order: float = 1.0
    complete: bool = False
    label: str = "radial"
    meta: dict = field(default_factory=dict, compare=False, hash=False, repr=False)

    sigma_area = FOUR_PI
    sigma_min_gauss = 1.0

    @property
    def lo(self):
        return self.r_min

    @property
    def lo_closed(self):
        return self.r_min_closed

    def f(self, r):
        return 1.0 - 2.0 * self.mass(r) / r

    def f_d1(self, r):
        return -2.0 * self.mass_d1(r) / r + 2.0 * self.mass(r) / (r * r)

    def warp(self, x):
        return x

    def warp_slope(self, x):
        return math.sqrt(self.f(x))

    def warp_curvature(self, x):
        return 0.5 * self.f_d1(x)

    def arc_density(self, x):
        fx = self.f(x)
        return fx ** -0.5 if fx > 0.0 else math.inf

    def density(self, x):
        fx = self.f(x)
        return fx ** -0.5 / (x * x) if fx > 0.0 else math.inf

    def _density_vec(self, xs):
        fx = 1.0 - 2.0 * np.asarray(self.mass(xs)) / xs
        return np.where(fx > 0.0, np.abs(fx) ** -0.5 / (xs * xs), np.inf)

    def tail_density(self, u):
        # f(1/u) = 1 - 2 u m(1/u)
        return (1.0 - 2.0 * u * self.mass(1.0 / u)) ** -0.5

    def inv_area_integral(self, x0: float, x1: float = math.inf) -> tuple[float, float]:
        lo = self.r_min
        near = 1.25 * lo
        if not (lo > 0.0 and x0 < near and x1 > x0 and abs(self.f(lo)) <= 1e-12):
            return super().inv_area_integral(x0, x1)
        # next to a horizon f vanishes like (r - lo); with r = lo + w^2 the integrand is smooth
        xm = min(x1, near)
        slope = self.f_d1(lo)
        linear = 1e-8 * lo

        def integrand(w):
            w2 = w * w
            if w2 < linear and slope > 0.0:
                # f(lo + w^2) is lost to rounding here; use f ~ f'(lo) w^2
                x = lo + w2
                return 2.0 / (x * x * math.sqrt(slope))
            return 2.0 * w * self.density(lo + w2)

        v, e = quad(integrand, math.sqrt(x0 - lo), math.sqrt(xm - lo))
        if xm >= x1:
            return v, e
        v1, e1 = super().inv_area_integral(xm, x1)
        return v + v1, e + e1

    def quasi_local_mass(self, x):
        return self.mass(x)

    def scalar_curvature(self, x):
        return 4.0 * self.mass_d1(x) / (x * x)

    def metric_components(self, x, theta):
        return np.diag([1.0 / self.f(x), x * x, (x * math.sin(theta)) ** 2])

    def scaled(self, lam):
        m, m1 = self.mass, self.mass_d1
        return RadialProfile(
            lambda r: lam * m(r / lam), lambda r: m1(r / lam), r_min=lam * self.r_min,
            r_min_closed=self.r_min_closed, af_end=self.af_end, decay_order=self.decay_order,
            complete=self.complete, label=self.label, meta={**self.meta, "scale": lam},
        )


@dataclass(frozen=True)
class ConformalProfile(Profile):
    """``psi(s)^4 (ds^2 + s^2 sigma_0)`` with ``psi = 1 + h(s)`` on ``(s_min, inf)``.

    ``smooth_center`` declares that ``s = 0`` is a regular point ``p`` of the
    manifold (``h'(0) = 0``); otherwise ``s -> 0`` is another end.
    """

    bump: Fn
    bump_d1: Fn
    bump_d2: Fn
    smooth_center: bool = True
    s_min: float = 0.0
    af_end: bool = True
    decay_order: float = 1.0
    complete: bool = False
    label: str = "conformal"
    meta: dict = field(default_factory=dict, compare=False, hash=False, repr=False)

    sigma_area = FOUR_PI
    sigma_min_gauss = 1.0

    def __post_init__(self):
        if self.smooth_center and self.s_min == 0.0:
            if abs(self.bump_d1(0.0)) > 1e-12:
                raise ValueError("psi'(0) must vanish at a smooth center")
            if not 1.0 + self.bump(0.0) > 0:
                raise ValueError("psi must be positive")

    @property
    def lo(self):
        return self.s_min

    @property
    def lo_closed(self):
        return self.s_min > 0.0

    def psi(self, s):
        return 1.0 + self.bump(s)

    def warp(self, x):
        p = self.psi(x)
        return x * p * p

    def warp_slope(self, x):
        return 1.0 + 2.0 * x * self.bump_d1(x) / self.psi(x)

    def warp_curvature(self, x):
        p, p1, p2 = self.psi(x), self.bump_d1(x), self.bump_d2(x)
        return (2.0 * p1 / p + 2.0 * x * p2 / p - 2.0 * x * p1 * p1 / (p * p)) / (p * p)

    def arc_density(self, x):
        p = self.psi(x)
        return p * p

    def density(self, x):
        xp = x * self.psi(x)
        return 1.0 / (xp * xp)

    def _density_vec(self, xs):
        xp = xs * (1.0 + np.asarray(self.bump(xs)))
        return 1.0 / (xp * xp)

    def tail_density(self, u):
        p = self.psi(1.0 / u)
        return 1.0 / (p * p)

    def flat_laplacian_psi(self, s):
        """``psi'' + 2 psi'/s``, with the ``s -> 0`` limit ``3 psi''(0)``."""
        if s == 0.0:
            return 3.0 * self.bump_d2(0.0)
        return self.bump_d2(s) + 2.0 * self.bump_d1(s) / s

    def scalar_curvature(self, x):
        return -8.0 * self.psi(x) ** -5 * self.flat_laplacian_psi(x)

    def metric_components(self, x, theta):
        p4 = self.psi(x) ** 4
        return p4 * np.diag([1.0, x * x, (x * math.sin(theta)) ** 2])

    def mass_sequence(self, x):
        return 2.0 * x * self.bump(x)

    def scaled(self, lam):
        h, h1, h2 = self.bump, self.bump_d1, self.bump_d2
        return ConformalProfile(
            lambda s: h(s / lam), lambda s: h1(s / lam) / lam, lambda s: h2(s / lam) / lam**2,
            smooth_center=self.smooth_center, s_min=lam * self.s_min, af_end=self.af_end,
            decay_order=self.decay_order, complete=self.complete, label=self.label,
            meta={**self.meta, "scale": lam},
        )


# --------------------------------------------------------------------------------------
# slices and their functionals


@dataclass(frozen=True)
class SurfaceSlice:
    """The coordinate slice ``{x} x Sigma`` of a profile."""

    profile: Profile
    coord: float

    def __post_init__(self):
        self.profile.check(self.coord)

    @property
    def area(self) -> float:
        return self.profile.sigma_area * self.profile.warp(self.coord) ** 2

    @property
    def area_radius(self) -> float:
        return math.sqrt(self.area / FOUR_PI)

    @property
    def mean_curvature(self) -> float:
        return mean_curvature(self)

    @property
    def willmore(self) -> float:
        return willmore(self)

    @property
    def hawking_mass(self) -> float:
        return hawking_mass(self)


def mean_curvature(slice_: SurfaceSlice) -> float:
    """``H = 2 a'/a``, with the unit normal pointing toward the AF end."""
    p = slice_.profile
    return 2.0 * p.warp_slope(slice_.coord) / p.warp(slice_.coord)


def willmore(slice_: SurfaceSlice) -> float:
    """``int H^2 = 4 a'^2 |Sigma|_sigma`` (H is constant on a slice)."""
    a1 = slice_.profile.warp_slope(slice_.coord)
    return 4.0 * a1 * a1 * slice_.profile.sigma_area


def hawking_mass(slice_: SurfaceSlice) -> float:
    return 0.5 * slice_.area_radius * (1.0 - willmore(slice_) / SIXTEEN_PI)


def scalar_curvature(profile: Profile, coord: float) -> float:
    """Closed-form scalar curvature (a lower bound for non-round cross-sections).

    The center ``s = 0`` of a smooth-center conformal profile is accepted.
    """
    if isinstance(profile, ConformalProfile) and profile.smooth_center and coord == profile.lo == 0.0:
        x = 0.0
    else:
        x = profile.check(coord)
    try:
        value = float(profile.scalar_curvature(x))
    except (ZeroDivisionError, OverflowError, ValueError) as exc:
        raise EvaluationError(f"scalar curvature undefined at {x!r}: {exc}") from exc
    if not math.isfinite(value):
        raise EvaluationError(f"scalar curvature not finite at {x!r}")
    return value


# --------------------------------------------------------------------------------------
# finite-difference curvature oracle

_D1 = ((-2, 1.0 / 12), (-1, -8.0 / 12), (1, 8.0 / 12), (2, -1.0 / 12))
_D2 = ((-2, -1.0 / 12), (-1, 16.0 / 12), (0, -30.0 / 12), (1, 16.0 / 12), (2, -1.0 / 12))


def curvature_oracle(profile: Profile, coord: float, *, theta: float = 1.0, step: float | None = None,
                     angle_step: float = 2e-3) -> float:
    """Scalar curvature from finite differences of the metric in the ``(x, theta, phi)`` chart.

    Christoffel symbols and their derivatives are assembled from fourth-order
    central differences of the metric components; nothing from the closed
    forms is reused.  Test-only cross-check of :func:`scalar_curvature`.
    """
    x = profile.check(coord)
    room = x - profile.lo if math.isfinite(profile.lo) else math.inf
    # steps balance fourth-order truncation against rounding in the second differences
    h = step if step is not None else 5e-3 * min(max(abs(x), 1e-3), 1.0)
    h = min(h, room / 3.0)
    if not h > 1e-9 * max(1.0, abs(x)):
        raise EvaluationError(f"finite-difference step underflow at {x!r}")
    steps = np.array([h, angle_step, angle_step])
    q0 = np.array([x, theta, 0.3])

    def g(q):
        return profile.metric_components(q[0], q[1])

    def shifted(offsets):
        q = q0.copy()
        for axis, k in offsets:
            q[axis] += k * steps[axis]
        return g(q)

    dg = np.zeros((3, 3, 3))  # dg[m, i, j] = d_m g_ij
    ddg = np.zeros((3, 3, 3, 3))  # ddg[m, n, i, j]
    g0 = g(q0)
    for m in range(3):
        dg[m] = sum(w * shifted([(m, k)]) for k, w in _D1) / steps[m]
        ddg[m, m] = sum(w * (g0 if k == 0 else shifted([(m, k)])) for k, w in _D2) / steps[m] ** 2
        for n in range(m):
            mixed = sum(wk * wl * shifted([(m, k), (n, l)]) for k, wk in _D1 for l, wl in _D1)
            ddg[m, n] = ddg[n, m] = mixed / (steps[m] * steps[n])

    gi = np.linalg.inv(g0)
    # Gamma^k_ij = 1/2 g^kl (d_i g_lj + d_j g_li - d_l g_ij)
    lower = 0.5 * (np.einsum("ilj->lij", dg) + np.einsum("jli->lij", dg) - dg)
    gamma = np.einsum("kl,lij->kij", gi, lower)
    dgi = -np.einsum("ka,mab,bl->mkl", gi, dg, gi)
    dlower = 0.5 * (np.einsum("milj->mlij", ddg) + np.einsum("mjli->mlij", ddg) - ddg)
    dgamma = np.einsum("mkl,lij->mkij", dgi, lower) + np.einsum("kl,mlij->mkij", gi, dlower)
    ricci = (
        np.einsum("kkij->ij", dgamma)
        - np.einsum("jkik->ij", dgamma)
        + np.einsum("kkl,lij->ij", gamma, gamma)
        - np.einsum("kjl,lik->ij", gamma, gamma)
    )
    return float(np.einsum("ij,ij->", gi, ricci))


# --------------------------------------------------------------------------------------
# ADM mass


@dataclass(frozen=True)
class MassResult:
    value: float
    error_estimate: float


def _adm_start(profile: Profile) -> float:
    lo = profile.lo if math.isfinite(profile.lo) else 0.0
    return max(4.0, 4.0 * abs(lo))


@lru_cache(maxsize=512)
def _adm_cached(profile: Profile, points: int) -> MassResult:
    x0 = _adm_start(profile)
    xs = [x0 * 2.0**j for j in range(points)]
    seq = [float(profile.mass_sequence(x)) for x in xs]
    value, err = extrapolate_limit(seq)
    return MassResult(value, err)


def adm_mass(profile: Profile, *, points: int = 22) -> MassResult:
    """ADM mass of the AF end by extrapolating a quasi-local mass on ``x_j = x_0 2^j``.

    Radial and warped profiles use the Hawking mass of slices; conformal
    profiles use ``2 s (psi - 1)``.
    """
    if not profile.af_end:
        raise AsymptoticsError(f"profile {profile.label!r} has no asymptotically flat end")
    if not profile.decay_order > 0.5:
        raise AsymptoticsError(f"declared decay order {profile.decay_order} must exceed 1/2")
    return _adm_cached(profile, points)


# --------------------------------------------------------------------------------------
# constructors and conversion


def from_mass_profile(
    mass: Fn,
    mass_d1: Fn,
    r_min: float,
    *,
    r_min_closed: bool = True,
    label: str = "mass-profile",
    meta: dict | None = None,
    samples: int = 400,
) -> RadialProfile:
    """Radial profile with ``f = 1 - 2m/r``; nonnegative scalar curvature iff ``m' >= 0``.

    Both ``m' >= 0`` and ``f > 0`` are checked on a geometric sample of the
    domain.
    """
    lo = r_min if r_min > 0 else 1e-6
    rs = np.geomspace(lo, max(1e6, 1e3 * lo), samples)
    dm = np.array([mass_d1(r) for r in rs])
    if np.any(dm < -1e-12 * np.maximum(1.0, np.abs(dm).max())):
        raise ValueError("mass function must be nondecreasing")
    fs = np.array([1.0 - 2.0 * mass(r) / r for r in rs])
    if np.any(fs <= 0.0):
        bad = float(rs[np.argmax(fs <= 0.0)])
        raise HorizonError(f"f = 1 - 2m/r is not positive at r = {bad:.6g}; shrink the domain")
    return RadialProfile(mass, mass_d1, r_min=r_min, r_min_closed=r_min_closed and r_min > 0,
                         label=label, meta=dict(meta or {}))


class _InverseMap:
    """Inverse of an increasing arc-length map ``t(x)`` on ``[x_lo, inf)``."""

    def __init__(self, t_of_x, x_lo: float):
        self.t_of_x = t_of_x
        self.x_lo = x_lo
        self._cache: dict[float, float] = {}

    def __call__(self, t: float) -> float:
        hit = self._cache.get(t)
        if hit is not None:
            return hit
        if math.isfinite(self.x_lo):
            if t <= 0.0:
                return self.x_lo
            y_min = math.log(1e-13 * max(1.0, abs(self.x_lo)))
            t_of_y = lambda y: self.t_of_x(self.x_lo + math.exp(y))
            if t <= t_of_y(y_min):
                return self.x_lo + math.exp(y_min)
            x = self.x_lo + math.exp(solve_increasing(t_of_y, t, y_min, math.inf))
        else:
            x = solve_increasing(self.t_of_x, t, -math.inf, math.inf)
        if len(self._cache) < 100_000:
            self._cache[t] = x
        return x


def convert(profile: Profile) -> WarpedProfile:
    """Arc-length reparameterisation of any profile as a :class:`WarpedProfile`.

    ``t`` is measured from the inner end when that end is at finite distance
    (the boundary, a horizon, a singular tip, or a smooth center) and from
    ``x = 1`` otherwise, in which case ``t_min = -inf``.
    """
    if isinstance(profile, WarpedProfile):
        return profile
    lo = profile.lo
    if isinstance(profile, ConformalProfile) and not profile.smooth_center and lo == 0.0:
        origin, t_min = 1.0, -math.inf
    else:
        origin, t_min = lo, 0.0

    if isinstance(profile, RadialProfile) and math.isfinite(lo):
        # x = lo + v^2 keeps the integrand bounded at a horizon, where f ~ f'(lo) (x - lo);
        # very close to lo the first-order expansion of f replaces the rounded evaluation
        # (a puncture at r = 0 has no expansion and is never evaluated by the quadrature)
        taylor = lo > 0.0
        f_lo, f1_lo = (profile.f(lo), profile.f_d1(lo)) if taylor else (1.0, 0.0)

        def arc_in_v(v):
            d = v * v
            if taylor and d < 1e-7 * max(1.0, abs(lo)):
                fx = f_lo + f1_lo * d
            else:
                fx = profile.f(lo + d)
            return 2.0 * v / math.sqrt(fx) if fx > 0.0 else 0.0

        def t_of_x(x):
            if x <= origin:
                return 0.0
            return quad(arc_in_v, 0.0, math.sqrt(x - origin), 1e-13)[0]
    else:
        def t_of_x(x):
            if x == origin:
                return 0.0
            if x > origin:
                return quad(profile.arc_density, origin, x, 1e-13)[0]
            return -quad(profile.arc_density, x, origin, 1e-13)[0]

    x_of_t = _InverseMap(t_of_x, lo if t_min == 0.0 else -math.inf)
    if t_min == -math.inf:
        # x ranges over (0, inf); solve in log x
        log_map = _InverseMap(lambda y: t_of_x(math.exp(y)), -math.inf)
        x_of_t = lambda t: math.exp(log_map(t))

    return WarpedProfile(
        lambda t: profile.warp(x_of_t(t)),
        lambda t: profile.warp_slope(x_of_t(t)),
        lambda t: profile.warp_curvature(x_of_t(t)),
        t_min=t_min,
        t_min_closed=profile.lo_closed and t_min == 0.0,
        sigma_area=profile.sigma_area,
        sigma_min_gauss=profile.sigma_min_gauss,
        af_end=profile.af_end,
        decay_order=profile.decay_order,
        complete=profile.complete,
        label=f"{profile.label}->warped",
        meta={"converted_from": profile.label, "t_of_x": t_of_x, "x_of_t": x_of_t},
    )


def hypotheses_nonneg_curvature(profile: Profile, x0: float | None = None, *, samples: int = 240,
                                tol: float = 1e-10) -> bool:
    """Sampled certificate that ``R >= 0`` on ``[x0, inf)`` (whole domain if ``x0`` is None).

    The dimensionless ``R a^2`` must stay above ``-tol`` at every sample.
    """
    if x0 is not None:
        start, include_start = float(x0), True
    else:
        start, include_start = profile.lo, profile.lo_closed
    if math.isfinite(start):
        offsets = np.geomspace(1e-6, 1e6, samples) * max(1.0, abs(start))
        xs = list(start + offsets)
        if include_start:
            xs.insert(0, start)
    else:
        half = np.geomspace(1e-3, 1e6, samples // 2)
        xs = list(-half[::-1]) + list(half)
    for x in xs:
        try:
            r = float(profile.scalar_curvature(float(x)))
            a = float(profile.warp(float(x)))
        except (ZeroDivisionError, OverflowError, ValueError):
            return False
        if not math.isfinite(r) or r * a * a < -tol:
            return False
    return True
