"""Capacities of coordinate slices.

For a symmetric metric the capacitary potential of a slice is radial, and
every capacity reduces to a one-dimensional integral of ``a^{-2} dt``::

    c = (|Sigma|_sigma / 4 pi) / int a(t)^{-2} dt

over the region between the surfaces.  :func:`variational_capacity_oracle`
recomputes the exterior capacity by minimizing a discrete Dirichlet energy
instead, which gives an independent upper bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import CapacityError, DomainError
from .geometry import FOUR_PI, Profile

# increments of the exhaustion integral must shrink at least this fast to count as convergent
_GEOMETRIC_RATIO = 1.0 - 1e-3


@dataclass(frozen=True)
class CapacityResult:
    """A capacity (length units) with its provenance.

    ``exhaustion`` holds ``(coordinate, capacity)`` pairs for
    :func:`limit_capacity`; ``warning`` is set when a result is known to be
    unreliable (coarse oracle grid, divergent exhaustion, ...).
    """

    value: float
    method: str
    error_estimate: float
    exhaustion: tuple[tuple[float, float], ...] = ()
    warning: str | None = None

    def __float__(self) -> float:
        return self.value


def _from_integral(profile: Profile, integral: float, err: float, method: str = "quadrature") -> CapacityResult:
    value = profile.sigma_area / FOUR_PI / integral
    return CapacityResult(value, method, value * err / integral)


def capacity_exterior(profile: Profile, slice_coord: float) -> CapacityResult:
    """Capacity of the slice ``x = slice_coord`` in its exterior region."""
    if not profile.af_end:
        raise CapacityError(f"profile {profile.label!r} has no asymptotically flat end")
    return _exterior_cached(profile, profile.check(slice_coord))


@lru_cache(maxsize=8192)
def _exterior_cached(profile: Profile, x0: float) -> CapacityResult:
    integral, err = profile.inv_area_integral(x0)
    if not (math.isfinite(integral) and integral > 0.0):
        raise CapacityError(f"exterior integral of a^-2 is not finite and positive ({integral!r})")
    return _from_integral(profile, integral, err)


def relative_capacity(profile: Profile, inner_coord: float, outer_coord: float) -> CapacityResult:
    """Capacity of the inner slice relative to the outer one (potential 0 inside, 1 outside)."""
    x0 = profile.check(inner_coord)
    x1 = profile.check(outer_coord)
    if x1 < x0:
        raise DomainError(f"inner slice {x0!r} lies outside outer slice {x1!r}")
    if x1 == x0:
        raise CapacityError("coincident slices bound a degenerate annulus; the relative capacity is infinite")
    integral, err = profile.inv_area_integral(x0, x1)
    if not integral > 0.0:
        raise CapacityError("relative capacity is infinite at this resolution")
    return _from_integral(profile, integral, err)


def _exhaustion_grid(lo: float, x_ref: float, levels: int) -> list[float]:
    """Slices ``x_k`` below ``x_ref`` approaching ``lo``, dyadically."""
    if math.isfinite(lo):
        width = x_ref - lo
        floor = 1e-13 * max(1.0, abs(lo))
        xs = []
        for k in range(1, levels + 1):
            d = width * 2.0**-k
            if d < floor:
                break
            xs.append(lo + d)
        return xs
    return [x_ref - (2.0**k - 1.0) for k in range(1, levels + 1)]


def reference_coord(profile: Profile) -> float:
    lo = profile.lo
    return lo + max(1.0, abs(lo)) if math.isfinite(lo) else 0.0


@dataclass(frozen=True)
class InnerShells:
    """``int a^{-2} dt`` over dyadic shells between ``x_ref`` and the inner end.

    ``coords`` decrease from ``x_ref``; ``increments[k]`` is the integral over
    ``[coords[k+1], coords[k]]``.  ``tail`` is the remainder below the last
    slice: integrated directly when a slice bounds the domain, otherwise a
    geometric-series estimate (``inf`` when the integral diverges).
    """

    coords: tuple[float, ...]
    increments: tuple[float, ...]
    tail: float
    error: float

    @property
    def divergent(self) -> bool:
        return math.isinf(self.tail)

    @property
    def total(self) -> float:
        return sum(self.increments) + self.tail


def inner_shells(profile: Profile, x_ref: float, *, end: float | None = None, levels: int = 60) -> InnerShells:
    """Integrate ``a^{-2}`` from ``x_ref`` down to ``end`` (the inner end of the domain by default).

    Toward an open end, shell contributions that stop shrinking geometrically
    signal divergence; otherwise the remainder is summed as a geometric
    series, which is exact for power-law ends.
    """
    coords = [x_ref]
    increments: list[float] = []
    err = 0.0
    running = 0.0
    for x in _exhaustion_grid(profile.lo if end is None else end, x_ref, levels):
        inc, e = profile.inv_area_integral(x, coords[-1])
        coords.append(x)
        increments.append(inc)
        err += e
        running += inc
        if len(increments) >= 8 and increments[-1] > increments[-2] > increments[-3]:
            break  # growing shells: clearly divergent
        if inc <= 1e-17 * running:
            break
    tail = 0.0
    if end is not None and increments:
        # a slice bounds the domain: the remainder is an ordinary integral
        tail, e = profile.inv_area_integral(end, coords[-1])
        err += e
        if not math.isfinite(tail):
            tail = math.inf
    elif increments and increments[-1] > 1e-17 * running:
        ratios = [b / a for a, b in zip(increments[:-1], increments[1:]) if a > 0.0]
        recent = ratios[-3:]
        if not (recent and max(recent) < _GEOMETRIC_RATIO):
            tail = math.inf
        else:
            rho = recent[-1]
            tail = increments[-1] * rho / (1.0 - rho)
            # spread of the recent ratios bounds the error of the geometric tail
            err += increments[-1] * (max(recent) - min(recent)) / (1.0 - max(recent)) ** 2
    return InnerShells(tuple(coords), tuple(increments), tail, err)


def limit_capacity(profile: Profile, *, levels: int = 60) -> CapacityResult:
    """Infimum of slice capacities toward the inner end of the domain.

    Equals ``(|Sigma|_sigma/4 pi) / int a^{-2} dt`` over the whole domain, and
    0 when that integral diverges.  The capacities of the dyadic exhaustion
    slices are returned alongside; they form a non-increasing sequence.
    """
    if not profile.af_end:
        raise CapacityError(f"profile {profile.label!r} has no asymptotically flat end")
    scale = profile.sigma_area / FOUR_PI
    x_ref = reference_coord(profile)
    outer, err = profile.inv_area_integral(x_ref)
    shells = inner_shells(profile, x_ref, levels=levels)
    partial = np.cumsum((outer,) + shells.increments)
    seq = tuple((float(x), float(scale / j)) for x, j in zip(shells.coords, partial))
    if shells.divergent:
        return CapacityResult(0.0, "quadrature", 0.0, seq,
                              warning="integral of a^-2 diverges toward the inner end")
    total = outer + shells.total
    value = scale / total
    return CapacityResult(value, "quadrature", value * (err + shells.error) / total, seq)


def _gauss_nodes(order: int = 5):
    nodes, weights = np.polynomial.legendre.leggauss(order)
    return 0.5 * (nodes + 1.0), 0.5 * weights


def _discrete_capacity(profile: Profile, x0: float, n: int) -> float:
    """Minimum Dirichlet energy over potentials piecewise linear in the compactified coordinate."""
    span = x0 if x0 > 0.0 else 1.0
    # cells are graded toward the slice, where the density may blow up (a horizon)
    edges = np.linspace(0.0, 1.0, n + 1) ** 2
    nodes, weights = _gauss_nodes()
    y = edges[:-1, None] + (edges[1:] - edges[:-1])[:, None] * nodes[None, :]
    one_minus = 1.0 - y
    x = x0 + span * y / one_minus
    dxdy = span / one_minus**2
    w = profile.density_array(x) * dxdy
    with np.errstate(divide="ignore"):
        inv_w = np.where(np.isfinite(w), 1.0 / w, 0.0)
    h = edges[1:] - edges[:-1]
    cell = (inv_w * weights[None, :]).sum(axis=1) * h  # int_cell w^{-1} dy
    # energy per cell is (jump/h)^2 * cell; optimal jumps give 1 / sum(h^2 / cell)
    resistance = np.sum(h * h / cell)
    return profile.sigma_area / FOUR_PI / resistance


def variational_capacity_oracle(profile: Profile, slice_coord: float, grid_size: int = 10_000) -> CapacityResult:
    """Upper bound on the exterior capacity from a discrete Dirichlet minimization.

    Test potentials are piecewise linear in ``y = (x - x0)/(x - x0 + L)``,
    which maps the exterior onto ``[0, 1)``, on a grid refined toward
    ``y = 0``.  The minimizer over this class is found in closed form (a
    series of resistors), and the discrete capacity
    decreases to the true one as the grid is refined.  The error estimate
    compares the grid with its half-resolution counterpart.
    """
    if not profile.af_end:
        raise CapacityError(f"profile {profile.label!r} has no asymptotically flat end")
    x0 = profile.check(slice_coord)
    n = int(grid_size)
    if n < 2:
        raise ValueError("grid_size must be at least 2")
    fine = _discrete_capacity(profile, x0, n)
    coarse = _discrete_capacity(profile, x0, max(1, n // 2))
    err = abs(coarse - fine) / 3.0
    warning = None
    if n < 16 or not err <= 1e-3 * fine:
        warning = "grid too coarse to bracket the capacity"
    return CapacityResult(fine, "variational", err, warning=warning)


@dataclass(frozen=True)
class MonotonicityReport:
    coords: tuple[float, ...]
    capacities: tuple[float, ...]
    passed: bool


def capacity_monotonicity_check(profile: Profile, coords, *, rel_tol: float = 1e-12) -> MonotonicityReport:
    """Check that enclosing slices (larger coordinate) never have smaller capacity."""
    xs = tuple(float(x) for x in coords)
    if any(b <= a for a, b in zip(xs[:-1], xs[1:])):
        raise DomainError("coordinates must be strictly increasing")
    caps = tuple(capacity_exterior(profile, x).value for x in xs)
    passed = all(c1 >= c0 - rel_tol * max(1.0, abs(c0)) for c0, c1 in zip(caps[:-1], caps[1:]))
    return MonotonicityReport(xs, caps, passed)
