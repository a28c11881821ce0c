"""Built-in metric families and the profile JSON loader."""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np
from scipy.interpolate import PchipInterpolator

from .geometry import FOUR_PI, ConformalProfile, RadialProfile, WarpedProfile, from_mass_profile

FAMILIES = ("flat", "schwarzschild", "neg-schwarzschild", "mass-profile", "horn", "conformal", "sampled")


def flat(r_min: float = 0.0) -> RadialProfile:
    """Euclidean space outside the sphere ``r = r_min`` (punctured at the origin if 0)."""
    return RadialProfile(
        lambda r: 0.0 * r, lambda r: 0.0 * r, r_min=r_min, r_min_closed=r_min > 0,
        label="flat", meta={"family": "flat", "params": {}, "domain": [r_min, None]},
    )


def schwarzschild(mass: float, r_min: float | None = None) -> RadialProfile:
    """Spatial Schwarzschild exterior, by default from the horizon ``r = 2m``."""
    if mass < 0:
        raise ValueError("use neg_schwarzschild for negative mass")
    lo = 2.0 * mass if r_min is None else r_min
    if lo < 2.0 * mass:
        raise ValueError("domain must lie outside the horizon r = 2m")
    return RadialProfile(
        lambda r: mass + 0.0 * r, lambda r: 0.0 * r, r_min=lo, r_min_closed=lo > 0,
        label="schwarzschild",
        meta={"family": "schwarzschild", "params": {"mass": mass}, "domain": [lo, None]},
    )


def neg_schwarzschild(m: float) -> RadialProfile:
    """``(1 + 2m/r)^{-1} dr^2 + r^2 sigma_0`` on ``(0, inf)``; ADM mass ``-m``."""
    if not m > 0:
        raise ValueError("m must be positive (the ADM mass is -m)")
    return RadialProfile(
        lambda r: -m + 0.0 * r, lambda r: 0.0 * r, r_min=0.0, label="neg-schwarzschild",
        meta={"family": "neg-schwarzschild", "params": {"mass": m}, "domain": [0.0, None]},
    )


def _sech2(x):
    e = np.exp(-2.0 * np.abs(x))
    return 4.0 * e / (1.0 + e) ** 2


def tanh_mass(mass: float = 1.0, scale: float = 1.0, r_min: float = 2.2) -> RadialProfile:
    """``m(r) = mass * tanh(r/scale)``; nonnegative scalar curvature."""
    return from_mass_profile(
        lambda r: mass * np.tanh(r / scale),
        lambda r: mass / scale * _sech2(r / scale),
        r_min,
        label="mass-profile",
        meta={"family": "mass-profile", "params": {"kind": "tanh", "mass": mass, "scale": scale},
              "domain": [r_min, None]},
    )


def spline_mass(r_knots, m_knots, r_min: float | None = None) -> RadialProfile:
    """Monotone cubic (PCHIP) mass function through knots, constant past the last knot."""
    rk = np.asarray(r_knots, dtype=float)
    mk = np.asarray(m_knots, dtype=float)
    if rk.ndim != 1 or rk.size < 2 or rk.size != mk.size or np.any(np.diff(rk) <= 0):
        raise ValueError("spline knots must be strictly increasing with matching values")
    if np.any(np.diff(mk) < 0):
        raise ValueError("spline mass values must be nondecreasing")
    spline = PchipInterpolator(rk, mk, extrapolate=False)
    dspline = spline.derivative()
    r_last, m_last = float(rk[-1]), float(mk[-1])
    r_first, m_first = float(rk[0]), float(mk[0])

    def m(r):
        if np.ndim(r):
            r = np.asarray(r, dtype=float)
            out = spline(np.clip(r, r_first, r_last))
            return np.where(r >= r_last, m_last, np.where(r <= r_first, m_first, out))
        if r >= r_last:
            return m_last
        if r <= r_first:
            return m_first
        return float(spline(r))

    def dm(r):
        if np.ndim(r):
            r = np.asarray(r, dtype=float)
            out = dspline(np.clip(r, r_first, r_last))
            return np.where((r >= r_last) | (r <= r_first), 0.0, out)
        if r >= r_last or r <= r_first:
            return 0.0
        return float(dspline(r))

    lo = r_first if r_min is None else r_min
    return from_mass_profile(
        m, dm, lo, label="mass-profile",
        meta={"family": "mass-profile",
              "params": {"kind": "spline", "r": rk.tolist(), "m": mk.tolist()}, "domain": [lo, None]},
    )


def random_mass_profile(rng: np.random.Generator, *, knots: int = 6, r_min: float = 3.0,
                        span: float = 12.0) -> RadialProfile:
    """Monotone spline mass through sorted uniform knots on ``[r_min, r_min + span]``.

    The total mass is drawn from ``[0.1, 0.45 r_min]``, which keeps
    ``2 m(r) < r`` on the domain, and ``m(r_min)`` is a random fraction of it.
    """
    rk = np.concatenate(([r_min], np.sort(rng.uniform(r_min, r_min + span, knots - 1))))
    rk = rk + 1e-9 * np.arange(knots)  # strict increase even if draws coincide
    mk = np.sort(rng.uniform(0.0, 1.0, knots))
    total = rng.uniform(0.1, 0.45 * r_min)
    mk = total * mk / mk[-1]
    return spline_mass(rk, mk)


def horn(b: float, mass: float = 0.5) -> RadialProfile:
    """AF metric with an ``r^b``-horn tip: ``m(r) = M(1 - e^{-r^2}) - (b^2/2) r^{3-2/b} e^{-r}``.

    Near ``r = 0`` one has ``f ~ b^2 r^{2-2/b}``, so the warp in arc length
    behaves like ``t^b``; the ADM mass is ``M``.
    """
    if not 0.0 < b <= 1.0:
        raise ValueError("horn exponent must lie in (0, 1]")
    if not 0.0 <= mass < 0.75:
        raise ValueError("horn mass must lie in [0, 0.75) to keep f > 0")
    p = 3.0 - 2.0 / b
    c = 0.5 * b * b

    def m(r):
        return mass * -np.expm1(-r * r) - c * r**p * np.exp(-r)

    def dm(r):
        return 2.0 * mass * r * np.exp(-r * r) - c * (p * r ** (p - 1.0) - r**p) * np.exp(-r)

    return RadialProfile(m, dm, r_min=0.0, label="horn",
                         meta={"family": "horn", "params": {"b": b, "mass": mass}, "domain": [0.0, None]})


def power_warp(b: float, t_min: float = 0.0) -> WarpedProfile:
    """Model horn ``dt^2 + t^{2b} sigma_0`` (not asymptotically flat unless ``b = 1``)."""
    return WarpedProfile(
        lambda t: t**b, lambda t: b * t ** (b - 1.0), lambda t: b * (b - 1.0) * t ** (b - 2.0),
        t_min=t_min, t_min_closed=t_min > 0, af_end=(b == 1.0), label="power",
        meta={"family": "power", "params": {"b": b}},
    )


def cylinder_end() -> WarpedProfile:
    """``a(t) = 1 + log(1 + e^t)``: a cylindrical end at ``-inf`` joined to a flat end."""
    return WarpedProfile(
        lambda t: 1.0 + np.logaddexp(0.0, t),
        lambda t: 0.5 * (1.0 + np.tanh(0.5 * t)),
        lambda t: 0.25 * _sech2(0.5 * t),
        t_min=-math.inf, label="cylinder-end", meta={"family": "cylinder-end", "params": {}},
    )


def isotropic_schwarzschild(mass: float) -> ConformalProfile:
    """Two-ended Schwarzschild, ``psi = 1 + m/(2s)`` on ``(0, inf)``."""
    h = 0.5 * mass
    return ConformalProfile(
        lambda s: h / s, lambda s: -h / (s * s), lambda s: 2.0 * h / s**3,
        smooth_center=False, complete=True, label="isotropic-schwarzschild",
        meta={"family": "conformal", "params": {"kind": "isotropic-schwarzschild", "mass": mass},
              "domain": [0.0, None]},
    )


def gaussian_bump(eps: float) -> ConformalProfile:
    """``psi = 1 + eps e^{-s^2}``; smooth at ``s = 0`` with ``R(p) = 48 eps (1+eps)^{-5}``."""
    return ConformalProfile(
        lambda s: eps * np.exp(-s * s),
        lambda s: -2.0 * eps * s * np.exp(-s * s),
        lambda s: eps * (4.0 * s * s - 2.0) * np.exp(-s * s),
        label="gaussian",
        meta={"family": "conformal", "params": {"kind": "gaussian", "eps": eps}, "domain": [0.0, None]},
    )


def _plummer_terms(eps):
    def h(s):
        return eps / np.sqrt(1.0 + s * s)

    def h1(s):
        return -eps * s * (1.0 + s * s) ** -1.5

    def h2(s):
        q = 1.0 + s * s
        return eps * (2.0 * s * s - 1.0) * q**-2.5

    return h, h1, h2


def plummer(eps: float) -> ConformalProfile:
    """``psi = 1 + eps (1 + s^2)^{-1/2}``: positive scalar curvature, ADM mass ``2 eps``."""
    h, h1, h2 = _plummer_terms(eps)
    return ConformalProfile(
        h, h1, h2, label="plummer",
        meta={"family": "conformal", "params": {"kind": "plummer", "eps": eps}, "domain": [0.0, None]},
    )


def two_ended_plummer(mass: float, eps: float) -> ConformalProfile:
    """``psi = 1 + m/(2s) + eps (1+s^2)^{-1/2}``: two AF ends, ``R >= 0`` for ``eps >= 0``."""
    h, h1, h2 = _plummer_terms(eps)
    k = 0.5 * mass
    return ConformalProfile(
        lambda s: k / s + h(s), lambda s: -k / (s * s) + h1(s), lambda s: 2.0 * k / s**3 + h2(s),
        smooth_center=False, complete=True, label="two-ended-plummer",
        meta={"family": "conformal", "params": {"kind": "two-ended-plummer", "mass": mass, "eps": eps},
              "domain": [0.0, None]},
    )


def sampled_warp(t, a, sigma_area: float = FOUR_PI) -> WarpedProfile:
    """Warped profile through samples, monotone-cubic interpolated.

    Past the last sample the warp continues linearly with its final slope,
    so asymptotic flatness requires that slope to be 1.  Accuracy is that of
    the interpolant.
    """
    t = np.asarray(t, dtype=float)
    a = np.asarray(a, dtype=float)
    if t.ndim != 1 or t.size < 3 or t.size != a.size:
        raise ValueError("sampled profile needs matching 't' and 'a' arrays of length >= 3")
    if np.any(np.diff(t) <= 0):
        raise ValueError("sampled 't' must be strictly increasing")
    if np.any(a <= 0):
        raise ValueError("sampled warp must be positive")
    spl = PchipInterpolator(t, a, extrapolate=False)
    d1, d2 = spl.derivative(), spl.derivative(2)
    t_end, a_end = float(t[-1]), float(a[-1])
    slope = float(d1(t_end))

    def warp(x):
        return a_end + slope * (x - t_end) if x >= t_end else float(spl(x))

    def warp_d1(x):
        return slope if x >= t_end else float(d1(x))

    def warp_d2(x):
        return 0.0 if x >= t_end else float(d2(x))

    return WarpedProfile(
        warp, warp_d1, warp_d2, t_min=float(t[0]), t_min_closed=True, sigma_area=sigma_area,
        af_end=abs(slope * math.sqrt(sigma_area / FOUR_PI) - 1.0) < 1e-6, label="sampled",
        meta={"family": "sampled", "t": t.tolist(), "a": a.tolist(), "sigma_area": sigma_area},
    )


# --------------------------------------------------------------------------------------
# JSON


def _domain_lo(spec: dict, default):
    dom = spec.get("domain")
    if dom is None:
        return default
    if not isinstance(dom, (list, tuple)) or len(dom) != 2:
        raise ValueError("'domain' must be a two-element list [lo, hi]")
    hi = dom[1]
    if hi is not None and not (isinstance(hi, str) and hi.lower() in ("inf", "infinity")) and math.isfinite(float(hi)):
        raise ValueError("profiles extend to the asymptotically flat end; 'domain' hi must be null or 'inf'")
    return default if dom[0] is None else float(dom[0])


def profile_from_dict(spec: dict):
    """Build a profile from the JSON schema ``{family, params, domain, sigma_area}``."""
    if not isinstance(spec, dict):
        raise ValueError("profile spec must be a JSON object")
    family = spec.get("family")
    params = spec.get("params") or {}
    if not isinstance(params, dict):
        raise ValueError("'params' must be an object")
    if family == "flat":
        return flat(_domain_lo(spec, 0.0))
    if family == "schwarzschild":
        m = float(params["mass"])
        return schwarzschild(m, _domain_lo(spec, 2.0 * m))
    if family == "neg-schwarzschild":
        return neg_schwarzschild(float(params["mass"]))
    if family == "mass-profile":
        kind = params.get("kind", "tanh")
        if kind == "tanh":
            return tanh_mass(float(params.get("mass", 1.0)), float(params.get("scale", 1.0)),
                             _domain_lo(spec, 2.2))
        if kind == "spline":
            return spline_mass(params["r"], params["m"], _domain_lo(spec, None))
        raise ValueError(f"unknown mass-profile kind {kind!r}")
    if family == "horn":
        return horn(float(params["b"]), float(params.get("mass", 0.5)))
    if family == "conformal":
        kind = params.get("kind")
        if kind == "isotropic-schwarzschild":
            return isotropic_schwarzschild(float(params["mass"]))
        if kind == "gaussian":
            return gaussian_bump(float(params["eps"]))
        if kind == "plummer":
            return plummer(float(params["eps"]))
        if kind == "two-ended-plummer":
            return two_ended_plummer(float(params["mass"]), float(params["eps"]))
        raise ValueError(f"unknown conformal kind {kind!r}")
    if family == "sampled":
        src = spec if "t" in spec else params
        return sampled_warp(src["t"], src["a"], float(spec.get("sigma_area", FOUR_PI)))
    raise ValueError(f"unknown family {family!r}; expected one of {', '.join(FAMILIES)}")


def load_profile(path: str | Path):
    with open(path, encoding="utf-8") as fh:
        return profile_from_dict(json.load(fh))
