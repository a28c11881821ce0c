"""Mass sign criteria at singular ends.

Near a singular end the metric is modelled as ``dr^2 + a(r)^2 sigma`` on
``(0, delta]``, perturbed by a tensor ``h`` that is only known through two
envelope bounds: ``lam^{-1} <= |g_bar + h| <= lam`` and a bound
``|grad h|(r) <= grad_h_bound(r)``.  The mass is nonnegative when

    Q(r) = (int_r^delta a^{-2})^{-1} [ |a'(r)| + a(r) grad_h_bound(r) ]

tends to 0 as ``r -> 0``.  For ``a = r^b`` and ``r grad_h_bound = O(1)`` this
happens exactly when ``3b - 2 > 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np
from scipy.interpolate import PchipInterpolator

from ._numerics import log_quad, quad
from .capacity import capacity_exterior, relative_capacity
from .errors import DomainError
from .geometry import FOUR_PI, Profile, SurfaceSlice
from .harmonic import exterior_harmonic

RATE_THRESHOLD = 0.02


def _zero(r):
    return 0.0


@dataclass(frozen=True)
class HornSpec:
    """A singular end ``dr^2 + a(r)^2 sigma`` on ``(0, delta]`` with its perturbation envelope.

    When ``profile`` is set the end is read off that profile instead: ``r``
    is then the profile's native coordinate, ``delta`` a slice coordinate,
    and ``grad_h_bound`` is evaluated at the arc-length distance to the end.
    """

    warp: Callable[[float], float] | None
    warp_d1: Callable[[float], float] | None
    delta: float = 1.0
    lam: float = 1.0
    grad_h_bound: Callable[[float], float] = _zero
    b: float | None = None
    sigma_area: float = FOUR_PI
    profile: Profile | None = None
    meta: dict = field(default_factory=dict, compare=False, hash=False, repr=False)

    def __post_init__(self):
        if not self.lam >= 1.0:
            raise ValueError("envelope constant lambda must be >= 1")
        if not self.delta > 0:
            raise ValueError("delta must be positive")
        if not self.sigma_area > 0:
            raise ValueError("sigma_area must be positive")
        if self.profile is None and (self.warp is None or self.warp_d1 is None):
            raise ValueError("a horn needs a warp and its derivative, or a profile")

    # --- constructors ------------------------------------------------------------------
    @classmethod
    def power(cls, b: float, delta: float = 1.0, lam: float = 1.0, grad_h_bound=None,
              sigma_area: float = FOUR_PI) -> "HornSpec":
        if not b > 0:
            raise ValueError("horn exponent must be positive")
        return cls(lambda r: r**b, lambda r: b * r ** (b - 1.0), delta, lam,
                   grad_h_bound or _zero, b, sigma_area, meta={"b": b})

    @classmethod
    def from_samples(cls, r, a, delta: float | None = None, lam: float = 1.0, grad_h_bound=None,
                     sigma_area: float = FOUR_PI) -> "HornSpec":
        """Monotone-cubic warp through samples, continued below the first sample as a power law."""
        r = np.asarray(r, dtype=float)
        a = np.asarray(a, dtype=float)
        if r.ndim != 1 or r.size < 3 or r.size != a.size:
            raise ValueError("warp samples need matching 'r' and 'a' arrays of length >= 3")
        if np.any(np.diff(r) <= 0) or r[0] <= 0 or np.any(a <= 0):
            raise ValueError("warp samples need increasing positive 'r' and positive 'a'")
        spl = PchipInterpolator(r, a, extrapolate=False)
        d1 = spl.derivative()
        r0, a0 = float(r[0]), float(a[0])
        expo = math.log(a[1] / a[0]) / math.log(r[1] / r[0])
        top = float(r[-1])

        def warp(x):
            return a0 * (x / r0) ** expo if x < r0 else float(spl(min(x, top)))

        def warp_d1(x):
            return expo * a0 / r0 * (x / r0) ** (expo - 1.0) if x < r0 else float(d1(min(x, top)))

        return cls(warp, warp_d1, float(delta if delta is not None else top), lam, grad_h_bound or _zero,
                   None, sigma_area, meta={"samples": len(r)})

    @classmethod
    def from_profile(cls, profile: Profile, delta: float, lam: float = 1.0, grad_h_bound=None) -> "HornSpec":
        """The inner end of a profile, up to the slice ``delta``."""
        if not math.isfinite(profile.lo):
            raise DomainError("the inner end must lie at a finite coordinate")
        profile.check(delta)
        return cls(None, None, float(delta), lam, grad_h_bound or _zero, None, profile.sigma_area, profile,
                   meta={"profile": profile.label})

    @classmethod
    def from_dict(cls, spec: dict) -> "HornSpec":
        """``{"b": ...} | {"warp_samples": {"r": [...], "a": [...]}}`` plus optional
        ``delta``, ``lambda``, ``sigma_area`` and ``grad_h_bound``
        (``{"type": "power", "coeff": c, "exp": e}`` meaning ``c r^e``, or ``{"type": "zero"}``)."""
        grad = _grad_bound_from_dict(spec.get("grad_h_bound"))
        lam = float(spec.get("lambda", 1.0))
        sigma = float(spec.get("sigma_area", FOUR_PI))
        if "b" in spec:
            return cls.power(float(spec["b"]), float(spec.get("delta", 1.0)), lam, grad, sigma)
        if "warp_samples" in spec:
            ws = spec["warp_samples"]
            return cls.from_samples(ws["r"], ws["a"], spec.get("delta"), lam, grad, sigma)
        raise ValueError("horn spec needs 'b' or 'warp_samples'")

    # --- geometry of the end -----------------------------------------------------------
    @property
    def lo(self) -> float:
        return self.profile.lo if self.profile is not None else 0.0

    def a(self, r: float) -> float:
        return self.profile.warp(r) if self.profile is not None else self.warp(r)

    def a_d1(self, r: float) -> float:
        return self.profile.warp_slope(r) if self.profile is not None else self.warp_d1(r)

    def distance(self, r: float) -> float:
        if self.profile is None:
            return r
        return quad(self.profile.arc_density, self.lo, r)[0]

    def inv_area_integral(self, r: float) -> float:
        """``int_r^delta a^{-2}`` in arc length."""
        if self.profile is not None:
            return self.profile.inv_area_integral(r, self.delta)[0]
        if r >= self.delta:
            return 0.0
        if r > 0 and self.delta > 4.0 * r:
            return log_quad(lambda x: self.warp(x) ** -2, r, self.delta)[0]
        return quad(lambda x: self.warp(x) ** -2, r, self.delta)[0]

    def grid(self, levels: int = 40) -> np.ndarray:
        """``r_j`` approaching the end: ``delta 2^{-j}``, ``j = 1..levels``."""
        width = self.delta - self.lo
        return self.lo + width * 2.0 ** -np.arange(1, levels + 1)


def _grad_bound_from_dict(spec):
    if spec is None:
        return _zero
    kind = spec.get("type", "power")
    if kind == "zero":
        return _zero
    if kind == "power":
        c, e = float(spec["coeff"]), float(spec["exp"])
        return lambda r: c * r**e
    raise ValueError(f"unknown grad_h_bound type {kind!r}")


def load_horn(path: str | Path) -> HornSpec:
    import json

    with open(path) as fh:
        return HornSpec.from_dict(json.load(fh))


# --------------------------------------------------------------------------------------
# criterion


def criterion_Q(spec: HornSpec, r: float) -> float:
    """``(int_r^delta a^{-2})^{-1} [|a'(r)| + a(r) grad_h_bound(r)]`` for ``r`` strictly inside the end."""
    if not spec.lo < r < spec.delta:
        raise DomainError(f"r = {r!r} must lie strictly between the end and delta")
    integral = spec.inv_area_integral(r)
    return (abs(spec.a_d1(r)) + spec.a(r) * spec.grad_h_bound(spec.distance(r))) / integral


def _rate(xs, ys) -> float:
    """Three-point log-log slope at the small end of the grid."""
    lx = np.log(np.asarray(xs[-3:], dtype=float))
    ly = np.log(np.asarray(ys[-3:], dtype=float))
    return float(np.polyfit(lx, ly, 1)[0])


@dataclass(frozen=True)
class HornVerdict:
    """Classification of ``lim_{r->0} Q``.

    ``limit`` is ``"zero"``, ``"finite"`` or ``"divergent"``; ``verdict`` is
    ``"mass-nonneg-certified"`` only for ``"zero"``.  ``analytic`` is the
    power-law prediction (``3b - 2 > 0``) when the exponent is known and
    ``r grad_h_bound`` stays bounded.
    """

    verdict: str
    limit: str
    rate: float
    radii: tuple[float, ...]
    values: tuple[float, ...]
    analytic: str | None
    gradient_scaling_ok: bool
    agrees: bool | None


def horn_classify(spec: HornSpec, *, levels: int = 40, threshold: float = RATE_THRESHOLD) -> HornVerdict:
    rs = spec.grid(levels)
    qs = [criterion_Q(spec, float(r)) for r in rs]
    dist = rs if spec.profile is None else np.array([spec.distance(float(r)) for r in rs])
    rate = _rate(dist, qs)
    if rate > threshold:
        limit = "zero"
    elif rate < -threshold:
        limit = "divergent"
    else:
        limit = "finite"
    verdict = "mass-nonneg-certified" if limit == "zero" else "inconclusive"
    # r |grad h| = O(1): its log-log slope toward the end must not be negative
    rg = np.array([d * spec.grad_h_bound(d) for d in dist])
    scaling_ok = bool(np.all(rg[-3:] == 0.0)) or (bool(np.all(rg[-3:] > 0.0)) and _rate(dist, rg) >= -threshold)
    analytic = None
    if spec.b is not None and scaling_ok:
        analytic = "mass-nonneg-certified" if 3.0 * spec.b - 2.0 > 1e-12 else "inconclusive"
    agrees = None if analytic is None else analytic == verdict
    return HornVerdict(verdict, limit, rate, tuple(float(r) for r in rs), tuple(qs), analytic, scaling_ok, agrees)


# --------------------------------------------------------------------------------------
# envelope bounds


def envelope_constant(lam: float) -> float:
    """Dirichlet-energy comparison constant for ``lam``-equivalent metrics: ``lam^{5/2}``.

    The volume form changes by at most ``lam^{3/2}`` and ``|df|^2`` by at most
    ``lam``.
    """
    return lam**2.5


@dataclass(frozen=True)
class CapacityEnvelope:
    model: float
    constant: float
    bound: float


def envelope_capacity_bound(spec: HornSpec, s: float) -> CapacityEnvelope:
    """Model relative capacity of ``(Sigma_s, Sigma_delta)`` and its envelope bound."""
    if not spec.lo < s <= spec.delta:
        raise DomainError(f"s = {s!r} must lie in (end, delta]")
    c = envelope_constant(spec.lam)
    integral = spec.inv_area_integral(s)
    model = math.inf if integral == 0.0 else spec.sigma_area / FOUR_PI / integral
    return CapacityEnvelope(model, c, c * model)


@dataclass(frozen=True)
class WillmoreEnvelope:
    """``model`` is ``4 a'^2 |Sigma|``; ``bound`` the perturbed bound; ``product_bound``
    bounds ``c_(s, delta) W(Sigma_s)^{1/2}``, with ``model_product`` its unperturbed value."""

    model: float
    bound: float
    product_bound: float
    model_product: float


def envelope_willmore_bound(spec: HornSpec, s: float) -> WillmoreEnvelope:
    """Willmore bound ``4 lam |Sigma| [a'^2 (1 + |h|) + a^2 |grad h|^2]`` with ``|h| <= lam - 1``.

    The product bound follows from ``1 + |h| <= lam`` and
    ``sqrt(x^2 + y^2) <= x + y``: it is
    ``2 lam^3 (|Sigma|^{3/2} / 4 pi) (int_s^delta a^{-2})^{-1} [|a'| + a |grad h|]``,
    which is exact for an unperturbed round model.
    """
    if not spec.lo < s < spec.delta:
        raise DomainError(f"s = {s!r} must lie strictly inside (end, delta)")
    sigma, lam = spec.sigma_area, spec.lam
    a, a1 = spec.a(s), abs(spec.a_d1(s))
    g = spec.grad_h_bound(spec.distance(s))
    model = 4.0 * a1 * a1 * sigma
    bound = 4.0 * lam * sigma * (a1 * a1 * lam + a * a * g * g)
    integral = spec.inv_area_integral(s)
    product_bound = 2.0 * lam**3 * sigma**1.5 / FOUR_PI * (a1 + a * g) / integral
    model_product = sigma / FOUR_PI / integral * math.sqrt(model)
    return WillmoreEnvelope(model, bound, product_bound, model_product)


# --------------------------------------------------------------------------------------
# capacity sandwich


@dataclass(frozen=True)
class SandwichReport:
    """``beta^{-1} c_Sigma >= c_(Sigma, S~) >= c_Sigma`` with ``beta = u_Sigma(S~)``.

    ``products`` gives ``c W^{1/2}`` for the exterior and the relative
    capacity; one tends to 0 along a sequence exactly when the other does.
    """

    beta: float
    capacity: float
    relative: float
    upper_slack: float
    lower_slack: float
    holds: bool
    products: tuple[float, float]


def sandwich_check(profile: Profile, t_k: float, t_tilde: float, *, tol: float = 1e-10) -> SandwichReport:
    if not t_k < t_tilde:
        raise DomainError("need t_k < t_tilde")
    cap = capacity_exterior(profile, t_k).value
    rel = relative_capacity(profile, t_k, t_tilde).value
    beta = exterior_harmonic(profile, t_k).u(t_tilde)
    upper = cap / beta - rel
    lower = rel - cap
    scale = max(1.0, rel)
    holds = upper >= -tol * scale and lower >= -tol * scale
    w = math.sqrt(SurfaceSlice(profile, t_k).willmore)
    return SandwichReport(beta, cap, rel, upper, lower, holds, (cap * w, rel * w))
