"""Small numerical helpers shared by the geometry, capacity and harmonic modules."""

from __future__ import annotations

import math
import os
import warnings

import numpy as np
from scipy import integrate, optimize

from .errors import AsymptoticsError, DomainError

DEFAULT_QUAD_TOL = 1e-10


def quad_tol() -> float:
    """Relative quadrature tolerance, overridable through ``MASSCAP_QUAD_TOL``."""
    raw = os.environ.get("MASSCAP_QUAD_TOL")
    if not raw:
        return DEFAULT_QUAD_TOL
    tol = float(raw)
    if not tol > 0:
        raise ValueError(f"MASSCAP_QUAD_TOL must be positive, got {raw!r}")
    return tol


def quad(func, a: float, b: float, tol: float | None = None) -> tuple[float, float]:
    """Adaptive Gauss-Kronrod on a finite interval, returning ``(value, abserr)``.

    Quadpack warnings are swallowed; the returned error estimate carries the
    information instead.
    """
    if a == b:
        return 0.0, 0.0
    rel = quad_tol() if tol is None else tol
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, err = integrate.quad(func, a, b, epsabs=0.0, epsrel=rel, limit=400)
    return float(val), float(err)


def log_quad(func, a: float, b: float, tol: float | None = None) -> tuple[float, float]:
    """Integrate ``func`` over ``[a, b]`` (0 < a < b) in the variable ``y = log x``."""
    return quad(lambda y: func(math.exp(y)) * math.exp(y), math.log(a), math.log(b), tol)


def extrapolate_limit(values, *, abs_floor: float = 1e-14) -> tuple[float, float]:
    """Limit of a sequence sampled on a geometric grid (ratio 2) via Richardson steps.

    The sequence is assumed to behave like ``L + c h**p`` with unknown
    ``p > 0``; the rate is estimated from three consecutive terms.  Returns
    ``(limit, error_estimate)``; raises :class:`AsymptoticsError` when no
    consistent rate is found.
    """
    v = np.asarray(values, dtype=float)
    if v.size < 2:
        raise AsymptoticsError("need at least two samples")
    if not np.all(np.isfinite(v)):
        raise AsymptoticsError("non-finite samples in limit sequence")
    scale = max(1.0, float(np.max(np.abs(v))))
    d = np.diff(v)
    # sequences that have already settled to round-off
    for j in range(1, d.size):
        if abs(d[j]) <= abs_floor * scale and abs(d[j - 1]) <= 1e3 * abs_floor * scale:
            return float(v[j + 1]), float(abs(d[j - 1]))
    best = None
    prev = None
    for j in range(1, d.size):
        if d[j] == 0.0:
            continue
        rho = d[j - 1] / d[j]
        if not rho > 1.0 + 1e-3:
            prev = None
            continue
        est = v[j + 1] + d[j] / (rho - 1.0)
        if prev is not None:
            err = abs(est - prev)
            if best is None or err < best[1]:
                best = (float(est), float(err))
        prev = est
    if best is None or best[1] > 1e-3 * scale:
        raise AsymptoticsError("limit sequence does not converge at a detectable power rate")
    return best


def power_rate(x, y) -> float:
    """Least-squares slope of ``log|y|`` against ``log x``."""
    lx = np.log(np.asarray(x, dtype=float))
    ly = np.log(np.abs(np.asarray(y, dtype=float)))
    slope, _ = np.polyfit(lx, ly, 1)
    return float(slope)


def solve_increasing(func, target: float, lo: float, hi: float, *, xtol: float = 1e-13) -> float:
    """Root of ``func(y) = target`` for a nondecreasing ``func`` on ``y`` in ``[lo, hi]``.

    The bracket is widened geometrically when it does not straddle the
    target; infinite ends are allowed.
    """
    g = lambda y: func(y) - target
    a = lo if math.isfinite(lo) else -1.0
    b = hi if math.isfinite(hi) else max(a + 1.0, 1.0)
    step = 1.0
    for _ in range(200):
        ga, gb = g(a), g(b)
        if ga <= 0.0 <= gb:
            if ga == 0.0:
                return a
            if gb == 0.0:
                return b
            return optimize.brentq(g, a, b, xtol=xtol, rtol=4 * np.finfo(float).eps, maxiter=500)
        if ga > 0.0:
            if math.isfinite(lo):
                raise DomainError(f"target {target!r} below the range of the map")
            a -= step
        if gb < 0.0:
            if math.isfinite(hi):
                raise DomainError(f"target {target!r} above the range of the map")
            b += step
        step *= 2.0
    raise DomainError(f"could not bracket target {target!r}")


def newton_bracketed(func, deriv, a: float, b: float, *, xtol: float = 1e-14, ftol: float = 0.0,
                     maxiter: int = 100) -> float:
    """Root of a monotone ``func`` on ``[a, b]`` by Newton steps safeguarded with bisection.

    An endpoint where ``|func| <= ftol`` is accepted even when rounding
    spoils the sign change.
    """
    fa, fb = func(a), func(b)
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if (fa > 0.0) == (fb > 0.0):
        if min(abs(fa), abs(fb)) <= ftol:
            return a if abs(fa) <= abs(fb) else b
        raise DomainError("root is not bracketed")
    lo, hi = (a, b) if fa < 0.0 else (b, a)  # func(lo) < 0 < func(hi)
    x = 0.5 * (a + b)
    for _ in range(maxiter):
        fx = func(x)
        if fx == 0.0:
            return x
        if fx < 0.0:
            lo = x
        else:
            hi = x
        d = deriv(x)
        step_ok = False
        if d != 0.0 and math.isfinite(d):
            nxt = x - fx / d
            step_ok = min(lo, hi) < nxt < max(lo, hi)
        if not step_ok:
            nxt = 0.5 * (lo + hi)
        if abs(nxt - x) <= xtol * max(1.0, abs(x)):
            return nxt
        x = nxt
    return x
