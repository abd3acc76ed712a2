"""Metric-space handles, axiom spot-checks and asymptotic-order fitting.

A metric space enters the library as a :class:`MetricSpaceHandle`: a name,
a distance oracle, a seeded sampler, and a magnitude function used to set
absolute zero floors. Everything downstream (arc fields, flows,
diagnostics) only ever talks to the handle.

The central measurement tool is :func:`estimate_order`: given gap values
g(t) on a decreasing positive grid it fits ``log g = log C + p log t`` and
classifies the decay as NOT_TANGENT / TANGENT / SECOND_ORDER, or
EXACT_ZERO when every gap sits below the floor.
"""

from dataclasses import dataclass, field
from typing import Any, Callable, Optional

import numpy as np

from arcflow.errors import (
    CurveEscapedError,
    InsufficientDataError,
    PointEscapedError,
    SamplerError,
)

# Verdict labels
NOT_TANGENT = "NOT_TANGENT"
TANGENT = "TANGENT"
SECOND_ORDER = "SECOND_ORDER"
EXACT_ZERO = "EXACT_ZERO"

# Slope p must beat 1 + MARGIN to count as tangent, 2 - MARGIN as 2nd order.
ORDER_MARGIN = 0.15

# Dyadic default grid: 2^-4 .. 2^-12, descending (2.4 decades).
DEFAULT_T_GRID = tuple(2.0 ** -k for k in range(4, 13))


def zero_floor(scale=0.0):
    """Absolute floor separating algebraic zeros from small-order gaps."""
    return 1e-11 * (1.0 + scale)


@dataclass(frozen=True)
class SampleRegion:
    """Where and how many points to draw from a space sampler."""
    center: Any
    radius: float
    count: int


@dataclass(frozen=True)
class MetricSpaceHandle:
    """A metric space as seen by the library.

    ``distance`` must be a true metric up to float slack; ``sampler``
    maps (seed, region) to a list of points; ``magnitude`` gives a scale
    for a point, used to normalize zero floors.
    """
    name: str
    distance: Callable[[Any, Any], float]
    sampler: Callable[[int, SampleRegion], list]
    magnitude: Callable[[Any], float] = field(default=lambda p: 1.0)
    default_center: Any = None
    # optional vectorized min-distance over a SampledSet; falls back to a
    # python loop over the set when absent
    nearest_distance: Optional[Callable[[Any, "SampledSet"], float]] = None

    def sample(self, seed, region):
        try:
            pts = self.sampler(seed, region)
        except Exception as exc:  # noqa: BLE001 - wrapped per contract
            raise SamplerError(f"sampler of space {self.name!r} failed: {exc}") from exc
        if not pts:
            raise SamplerError(f"sampler of space {self.name!r} returned no points")
        return pts


@dataclass(frozen=True)
class SampledSet:
    """Finite stand-in for a closed subset; minima proxy the infimum."""
    points: tuple
    provenance: str
    resolution: Optional[float] = None


@dataclass
class AxiomReport:
    """Result of a randomized metric-axiom check."""
    space: str
    n_triples: int
    seed: int
    passed: bool
    worst_triangle: float      # max (d(x,y) - d(x,z) - d(z,y)) / scale
    worst_symmetry: float      # max |d(x,y) - d(y,x)| / scale
    worst_self_distance: float
    rel_slack: float

    def to_dict(self):
        return {
            "space": self.space,
            "n_triples": self.n_triples,
            "seed": self.seed,
            "passed": bool(self.passed),
            "worst_triangle": self.worst_triangle,
            "worst_symmetry": self.worst_symmetry,
            "worst_self_distance": self.worst_self_distance,
            "rel_slack": self.rel_slack,
        }


@dataclass
class TangencyReport:
    """Fitted asymptotic order of a gap function t -> d(A(t), B(t))."""
    t_grid: list
    gaps: list
    order_p: Optional[float]
    constant_C: Optional[float]
    fit_residual: float
    verdict: str
    floor: float = 0.0

    def to_dict(self):
        return {
            "t_grid": list(self.t_grid),
            "gaps": list(self.gaps),
            "order_p": self.order_p,
            "constant_C": self.constant_C,
            "fit_residual": self.fit_residual,
            "verdict": self.verdict,
        }


def verify_metric_axioms(space, n_triples, seed, region=None, rel_slack=1e-9):
    """Spot-check positivity, symmetry and the triangle inequality.

    Violations are normalized by the scale of the triple so the slack is
    relative. Returns an :class:`AxiomReport`; sampler failures raise
    :class:`SamplerError`.
    """
    if n_triples < 1:
        raise ValueError("n_triples must be >= 1")
    if region is None:
        region = SampleRegion(space.default_center, 1.0, 3 * n_triples)
    else:
        region = SampleRegion(region.center, region.radius, 3 * n_triples)
    pts = space.sample(seed, region)
    if len(pts) < 3 * n_triples:
        raise SamplerError(
            f"sampler returned {len(pts)} points, need {3 * n_triples}")

    d = space.distance
    worst_tri = -np.inf
    worst_sym = 0.0
    worst_self = 0.0
    for i in range(n_triples):
        x, y, z = pts[3 * i], pts[3 * i + 1], pts[3 * i + 2]
        dxy, dyx = d(x, y), d(y, x)
        dxz, dzy = d(x, z), d(z, y)
        scale = max(1.0, dxy + dxz + dzy)
        worst_tri = max(worst_tri, (dxy - dxz - dzy) / scale)
        worst_sym = max(worst_sym, abs(dxy - dyx) / scale)
        worst_self = max(worst_self, abs(d(x, x)))
    passed = (worst_tri <= rel_slack
              and worst_sym <= rel_slack
              and worst_self <= rel_slack)
    return AxiomReport(space.name, n_triples, seed, passed,
                       float(worst_tri), float(worst_sym), float(worst_self),
                       rel_slack)


def _check_t_grid(t_grid):
    t = np.asarray(t_grid, dtype=float)
    if t.ndim != 1 or t.size == 0:
        raise ValueError("t_grid must be a nonempty 1-d sequence")
    if np.any(t <= 0):
        raise ValueError("t_grid entries must be strictly positive")
    if np.any(np.diff(t) >= 0):
        raise ValueError("t_grid must be sorted strictly descending")
    return t


def curve_gap(space, curve_a, curve_b, t_grid):
    """Evaluate d(A(t_i), B(t_i)) on a descending positive grid."""
    t = _check_t_grid(t_grid)
    gaps = np.empty(t.size)
    for i, ti in enumerate(t):
        try:
            gaps[i] = space.distance(curve_a(ti), curve_b(ti))
        except PointEscapedError as exc:
            raise CurveEscapedError(
                f"curve escaped at t_grid[{i}]={ti}: {exc}", index=i) from exc
    return gaps


def estimate_order(t_grid, gaps, floor=None, scale=0.0, margin=ORDER_MARGIN):
    """Fit the asymptotic order of a gap sequence.

    Entries at or below the zero floor are dropped from the fit; if all of
    them are, the verdict is EXACT_ZERO. Fewer than 4 usable points raise
    :class:`InsufficientDataError`.
    """
    t = _check_t_grid(t_grid)
    g = np.asarray(gaps, dtype=float)
    if g.shape != t.shape:
        raise ValueError("gaps and t_grid must have equal length")
    if np.any(g < 0):
        raise ValueError("gaps must be nonnegative")
    if t.size >= 2 and t.max() / t.min() < 100.0:
        raise ValueError("t_grid should span at least two decades")

    eps0 = zero_floor(scale) if floor is None else float(floor)
    usable = g > eps0
    if not np.any(usable):
        return TangencyReport(list(t), list(g), None, None, 0.0,
                              EXACT_ZERO, eps0)
    if usable.sum() < 4:
        raise InsufficientDataError(
            f"only {int(usable.sum())} gaps above the floor {eps0:g}; need >= 4")

    lt = np.log(t[usable])
    lg = np.log(g[usable])
    p, logc = np.polyfit(lt, lg, 1)
    resid = lg - (p * lt + logc)
    rms = float(np.sqrt(np.mean(resid ** 2)))

    if p >= 2.0 - margin:
        verdict = SECOND_ORDER
    elif p > 1.0 + margin:
        verdict = TANGENT
    else:
        verdict = NOT_TANGENT
    return TangencyReport(list(t), list(g), float(p), float(np.exp(logc)),
                          rms, verdict, eps0)


def distance_to_set(space, point, sampled_set):
    """Distance from a point to the nearest sample of a set."""
    if not len(sampled_set.points):
        raise ValueError("sampled set must be nonempty")
    if space.nearest_distance is not None:
        return space.nearest_distance(point, sampled_set)
    return min(space.distance(point, q) for q in sampled_set.points)
