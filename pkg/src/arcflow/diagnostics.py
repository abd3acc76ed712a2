"""Sampled estimators for the quantitative hypotheses of the calculus.

Every estimator here replaces a supremum or infimum over a neighborhood
by a seeded random sample and reports the witness realizing the extreme
value, so failures are reproducible. Estimates carry a refinement flag:
the sampler is rerun at half count, and a value that moves by more than
10% is marked diverging.
"""

import math
from dataclasses import dataclass
from typing import Any, Optional

import numpy as np

from arcflow.arcs import ArcField, bracket, evaluate, linear_combination
from arcflow.errors import InsufficientDataError, SurfaceDegenerateError
from arcflow.flows import Flow, solve
from arcflow.metric import (
    SampledSet,
    SampleRegion,
    distance_to_set,
    estimate_order,
    zero_floor,
)

_TIME_FLOOR_FACTOR = 1e-3   # drop |t| below this fraction of delta
_DISTANCE_FLOOR = 1e-12


@dataclass(frozen=True)
class RegionSampler:
    """Neighborhood + sampling budget for the estimators.

    ``delta`` bounds every sampled time; ``time_quantum`` snaps times to
    multiples (used when grid-exact translation times are needed).
    """
    center: Any
    radius: float
    n_pairs: int
    delta: float
    seed: int
    time_quantum: Optional[float] = None

    def __post_init__(self):
        if not (0.0 < self.delta <= 1.0):
            raise ValueError("delta must lie in (0, 1]")
        if self.radius < 0.0:
            raise ValueError("radius must be >= 0")

    def points(self, space, count):
        if self.radius == 0.0:
            return [self.center] * count
        return space.sample(self.seed, SampleRegion(self.center, self.radius, count))

    def times(self, count, offset=1):
        rng = np.random.default_rng(self.seed + offset)
        t = rng.uniform(-self.delta, self.delta, size=count)
        if self.time_quantum:
            t = np.round(t / self.time_quantum) * self.time_quantum
        floor = self.delta * _TIME_FLOOR_FACTOR
        bump = self.time_quantum if self.time_quantum else floor
        t = np.where(np.abs(t) < floor, np.sign(t + 0.5) * bump, t)
        return t


@dataclass
class ConstantEstimate:
    """Empirical supremum/infimum with its maximizing witness."""
    estimator: str
    value: float
    witness: dict
    diverging: bool
    n_samples: int
    seed: int

    def to_dict(self):
        return {
            "estimator": self.estimator,
            "value": self.value,
            "witness": self.witness,
            "diverging": bool(self.diverging),
            "n_samples": self.n_samples,
            "seed": self.seed,
        }


@dataclass(frozen=True)
class Distribution:
    """Span of generator arc fields, with their flows when available."""
    generators: tuple
    flows: tuple

    def __post_init__(self):
        if len(self.generators) < 1:
            raise ValueError("a distribution needs at least one generator")


@dataclass
class SampledSurface:
    """Points F_t G_s (x0) on an explicit parameter grid."""
    base_point: Any
    s_grid: np.ndarray
    t_grid: np.ndarray
    points: list
    resolution: float
    space: Any

    def as_sampled_set(self):
        pts = self.points
        if isinstance(pts, np.ndarray):
            return SampledSet(points=pts, provenance="sampled surface",
                              resolution=self.resolution)
        return SampledSet(points=tuple(pts), provenance="sampled surface",
                          resolution=self.resolution)


def _extreme(samples_fn, counts, maximize=True):
    """Run an extremum estimator at two counts; flag >10% drift."""
    small = samples_fn(counts // 2)
    full = samples_fn(counts)
    pick = max if maximize else min
    if not full:
        raise InsufficientDataError("no usable samples")
    v_small = pick(small, key=lambda r: r[0])[0] if small else None
    v_full, witness = pick(full, key=lambda r: r[0])
    if v_small is None:
        diverging = True
    else:
        denom = max(abs(v_full), 1e-12)
        diverging = abs(v_full - v_small) > 0.10 * denom
    return v_full, witness, diverging, len(full)


def _describe_point(space, x):
    return {"magnitude": space.magnitude(x)}


def estimate_E1(X, sampler):
    """Local Lipschitz-growth rate: sup ((d(X_t x, X_t y)/d(x,y)) - 1)/|t|."""
    space = X.space

    def run(count):
        pts = sampler.points(space, 2 * count)
        ts = sampler.times(count)
        rows = []
        for i in range(count):
            x, y = pts[2 * i], pts[2 * i + 1]
            base = space.distance(x, y)
            if base <= _DISTANCE_FLOOR:
                continue
            t = ts[i]
            ratio = space.distance(evaluate(X, x, t), evaluate(X, y, t)) / base
            rows.append(((ratio - 1.0) / abs(t),
                         {"t": float(t), "pair_distance": base,
                          "x": _describe_point(space, x)}))
        return rows

    value, witness, diverging, n = _extreme(run, sampler.n_pairs)
    return ConstantEstimate("E1", max(0.0, value), witness, diverging, n,
                            sampler.seed)


def estimate_E2(X, sampler):
    """Semigroup-defect rate: sup d(X_{s+t} x, X_t X_s x) / |st|."""
    space = X.space

    def run(count):
        pts = sampler.points(space, count)
        ss = sampler.times(count, offset=1)
        ts = sampler.times(count, offset=2)
        rows = []
        for i in range(count):
            s, t = ss[i], ts[i]
            x = pts[i]
            gap = space.distance(evaluate(X, x, s + t),
                                 evaluate(X, evaluate(X, x, s), t))
            rows.append((gap / abs(s * t),
                         {"s": float(s), "t": float(t),
                          "x": _describe_point(space, x)}))
        return rows

    value, witness, diverging, n = _extreme(run, sampler.n_pairs)
    return ConstantEstimate("E2", value, witness, diverging, n, sampler.seed)


def estimate_closeness(X, Y, sampler):
    """Commutation-defect rate of two arc fields: sup d(Y_s X_t, X_t Y_s)/|st|."""
    space = X.space

    def run(count):
        pts = sampler.points(space, count)
        ss = sampler.times(count, offset=1)
        ts = sampler.times(count, offset=2)
        rows = []
        for i in range(count):
            s, t, x = ss[i], ts[i], pts[i]
            gap = space.distance(
                evaluate(Y, evaluate(X, x, t), s),
                evaluate(X, evaluate(Y, x, s), t))
            rows.append((gap / abs(s * t),
                         {"s": float(s), "t": float(t),
                          "x": _describe_point(space, x)}))
        return rows

    value, witness, diverging, n = _extreme(run, sampler.n_pairs)
    return ConstantEstimate("closeness", value, witness, diverging, n,
                            sampler.seed)


def estimate_transversality(X, Y, sampler, floor=0.01):
    """Separation rate: inf d(X_s x, Y_t x) / (|s| + |t|).

    The estimate's witness records whether the infimum cleared ``floor``
    (the transversality verdict).
    """
    space = X.space

    def run(count):
        pts = sampler.points(space, count)
        ss = sampler.times(count, offset=1)
        ts = sampler.times(count, offset=2)
        rows = []
        for i in range(count):
            s, t, x = ss[i], ts[i], pts[i]
            denom = abs(s) + abs(t)
            gap = space.distance(evaluate(X, x, s), evaluate(Y, x, t))
            rows.append((gap / denom,
                         {"s": float(s), "t": float(t),
                          "x": _describe_point(space, x)}))
        return rows

    value, witness, diverging, n = _extreme(run, sampler.n_pairs, maximize=False)
    witness = dict(witness)
    witness["transverse"] = bool(value > floor)
    return ConstantEstimate("transversality", value, witness, diverging, n,
                            sampler.seed)


@dataclass
class SpeedGrowthFit:
    """Empirical speed profile rho(x, r) with its linear fit."""
    radii: list
    rho_values: list
    slope: float
    intercept: float

    def to_dict(self):
        return {"radii": self.radii, "rho_values": self.rho_values,
                "slope": self.slope, "intercept": self.intercept}


def estimate_speed_growth(X, base, radii, sampler):
    """Fit rho(base, r) ~ c1 r + c2 from sampled arc speeds."""
    space = X.space
    rhos = []
    for r in radii:
        region = RegionSampler(base, r, sampler.n_pairs, sampler.delta,
                               sampler.seed)
        pts = region.points(space, sampler.n_pairs) + [base]
        ss = region.times(sampler.n_pairs + 1, offset=1)
        ts = region.times(sampler.n_pairs + 1, offset=2)
        best = 0.0
        for y, s, t in zip(pts, ss, ts):
            if abs(s - t) < 1e-9:
                continue
            speed = space.distance(evaluate(X, y, s), evaluate(X, y, t)) / abs(s - t)
            best = max(best, speed)
        rhos.append(best)
    slope, intercept = np.polyfit(np.asarray(radii, dtype=float),
                                  np.asarray(rhos), 1)
    return SpeedGrowthFit(list(map(float, radii)), rhos, float(slope),
                          float(intercept))


def commutation_gap(F, G, sampler):
    """sup over sampled (x, s, t) of d(F_t G_s x, G_s F_t x) for two flows."""
    space = F.space

    def run(count):
        pts = sampler.points(space, count)
        ss = sampler.times(count, offset=1)
        ts = sampler.times(count, offset=2)
        rows = []
        for i in range(count):
            s, t, x = ss[i], ts[i], pts[i]
            gap = space.distance(F.at(G.at(x, s), t), G.at(F.at(x, t), s))
            rows.append((gap, {"s": float(s), "t": float(t),
                               "x": _describe_point(space, x)}))
        return rows

    value, witness, diverging, n = _extreme(run, sampler.n_pairs)
    return ConstantEstimate("commutation", value, witness, diverging, n,
                            sampler.seed)


@dataclass
class NagumoReport:
    """Invariance check of a sampled set along solution curves."""
    mode: str                 # "ratio" away from the set, "drift" on it
    lam: float
    base_distance: float
    entries: list             # rows {t, distance, ratio?}
    max_value: float
    tol: float

    def to_dict(self):
        return {"mode": self.mode, "lam": self.lam,
                "base_distance": self.base_distance,
                "entries": self.entries, "max_value": self.max_value,
                "tol": self.tol}


def nagumo_check(X, lam, S, x, t_grid, tol=1e-5, n_max=65536):
    """Bound d(sigma_x(t), S) by e^{lam |t|} d(x, S) along solved curves.

    If x starts on the set (within its sampling resolution) the absolute
    drift is reported instead of the ratio.
    """
    space = X.space
    base = distance_to_set(space, x, S)
    on_set = base <= max(S.resolution or 0.0, zero_floor(space.magnitude(x)))
    entries = []
    worst = 0.0
    for t in t_grid:
        res = solve(X, x, t, tol, n_max=n_max)
        dist = distance_to_set(space, res.endpoint, S)
        row = {"t": float(t), "distance": dist,
               "steps_used": res.steps_used}
        if on_set:
            worst = max(worst, dist)
        else:
            row["ratio"] = dist / (math.exp(lam * abs(t)) * base)
            worst = max(worst, row["ratio"])
        entries.append(row)
    return NagumoReport("drift" if on_set else "ratio", lam, base, entries,
                        worst, tol)


def sample_integral_surface(F, G, x0, s_grid, t_grid, injectivity_checks=2000,
                            collision_floor=None, seed=0):
    """Sample {F_t G_s (x0)} on the given parameter grids.

    Requires 0 on both grids so the base point belongs to the surface.
    A randomized spot-check rejects parameter pairs that collide in
    space (degenerate, non-transverse surfaces).
    """
    s_grid = np.asarray(s_grid, dtype=float)
    t_grid = np.asarray(t_grid, dtype=float)
    if not np.any(np.isclose(s_grid, 0.0)) or not np.any(np.isclose(t_grid, 0.0)):
        raise ValueError("both parameter grids must contain 0")
    space = F.space

    inner = [G.at(x0, s) for s in s_grid]
    rows = []
    for y in inner:
        rows.append([F.at(y, t) for t in t_grid])

    euclidean = isinstance(rows[0][0], np.ndarray)
    if euclidean:
        pts = np.array([p for row in rows for p in row])
    else:
        pts = [p for row in rows for p in row]

    # resolution: largest spacing between parameter-adjacent samples
    resolution = 0.0
    if euclidean:
        arr = pts.reshape(len(s_grid), len(t_grid), -1)
        if len(s_grid) > 1:
            resolution = max(resolution, float(
                np.linalg.norm(np.diff(arr, axis=0), axis=-1).max()))
        if len(t_grid) > 1:
            resolution = max(resolution, float(
                np.linalg.norm(np.diff(arr, axis=1), axis=-1).max()))
    else:
        for i in range(len(s_grid)):
            for j in range(len(t_grid)):
                if i + 1 < len(s_grid):
                    resolution = max(resolution,
                                     space.distance(rows[i][j], rows[i + 1][j]))
                if j + 1 < len(t_grid):
                    resolution = max(resolution,
                                     space.distance(rows[i][j], rows[i][j + 1]))

    floor = collision_floor
    if floor is None:
        floor = zero_floor(space.magnitude(x0))
    rng = np.random.default_rng(seed)
    n_total = len(s_grid) * len(t_grid)
    checks = min(injectivity_checks, n_total * (n_total - 1) // 2)
    flat = pts if euclidean else list(pts)
    for _ in range(checks):
        i, j = rng.integers(0, n_total, size=2)
        if i == j:
            continue
        if euclidean:
            d = float(np.linalg.norm(flat[i] - flat[j]))
        else:
            d = space.distance(flat[i], flat[j])
        if d <= floor:
            raise SurfaceDegenerateError(
                f"parameters {divmod(int(i), len(t_grid))} and "
                f"{divmod(int(j), len(t_grid))} collide (distance {d:g})")

    return SampledSurface(x0, s_grid, t_grid, pts, resolution, space)


def surface_tangency(surface, combo, base_points, t_grid, floor=None):
    """Fit the decay of the worst distance-to-surface over the base points.

    The zero floor defaults to the surface sampling resolution, which is
    the honest detection limit of the sampled-set proxy.
    """
    space = surface.space
    sset = surface.as_sampled_set()
    if floor is None:
        floor = surface.resolution
    gaps = []
    for tau in t_grid:
        worst = 0.0
        for b in base_points:
            worst = max(worst, distance_to_set(
                space, evaluate(combo, b, tau), sset))
        gaps.append(worst)
    return estimate_order(t_grid, gaps, floor=floor)


@dataclass
class PointInvolutivityFit:
    """Best constant-coefficient tangency of [F,G] at one base point."""
    a: float
    b: float
    order: Optional[float]
    exact_zero: bool

    def to_dict(self):
        return {"a": self.a, "b": self.b, "order": self.order,
                "exact_zero": self.exact_zero}


@dataclass
class InvolutivityReport:
    involutive: bool
    fits: list
    order_threshold: float

    def to_dict(self):
        return {"involutive": bool(self.involutive),
                "fits": [f.to_dict() for f in self.fits],
                "order_threshold": self.order_threshold}


def _golden_refine(score, lo, hi, iters=16):
    """Golden-section maximization of a 1-d score on [lo, hi]."""
    phi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - phi * (b - a)
    d = a + phi * (b - a)
    fc, fd = score(c), score(d)
    for _ in range(iters):
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - phi * (b - a)
            fc = score(c)
        else:
            a, c, fc = c, d, fd
            d = a + phi * (b - a)
            fd = score(d)
    return (c, fc) if fc >= fd else (d, fd)


def involutivity_check(dist, base_points, coeff_grid=None, t_grid=None,
                       order_threshold=1.15):
    """Search constant (a, b) making [F,G] tangent to a F + b G per point.

    Scores each candidate by the fitted order of d([F,G]_t, (aF+bG)_t);
    gaps below the zero floor count as a perfect fit. The distribution
    is involutive when every base point reaches an order above the
    threshold.
    """
    if len(dist.generators) != 2 or len(dist.flows) != 2:
        raise ValueError("exactly two generators with flows are supported")
    F, G = dist.flows
    Fa, Ga = F.as_arc_field(), G.as_arc_field()
    space = Fa.space
    br = bracket(Fa, Ga)
    if coeff_grid is None:
        coeff_grid = np.arange(-2.0, 2.0 + 0.125, 0.25)
    if t_grid is None:
        t_grid = tuple(2.0 ** -k for k in range(4, 13))
    t_grid = np.asarray(t_grid, dtype=float)

    fits = []
    for x in base_points:
        floor = zero_floor(space.magnitude(x))
        bracket_pts = [evaluate(br, x, tau) for tau in t_grid]

        def gaps_for(a, b):
            combo = linear_combination([(a, Fa), (b, Ga)])
            return [space.distance(bp, evaluate(combo, x, tau))
                    for bp, tau in zip(bracket_pts, t_grid)]

        def score(a, b):
            g = np.asarray(gaps_for(a, b))
            if np.all(g <= floor):
                return math.inf
            usable = g > floor
            if usable.sum() < 4:
                return -math.inf
            p, _ = np.polyfit(np.log(t_grid[usable]), np.log(g[usable]), 1)
            return float(p)

        best_a, best_b, best_s = 0.0, 0.0, -math.inf
        for a in coeff_grid:
            for b in coeff_grid:
                s = score(a, b)
                if s > best_s:
                    best_a, best_b, best_s = float(a), float(b), s
        if not math.isinf(best_s):
            step = float(coeff_grid[1] - coeff_grid[0]) if len(coeff_grid) > 1 else 0.25
            for _ in range(2):
                best_a, best_s = _golden_refine(
                    lambda a: score(a, best_b), best_a - step, best_a + step)
                best_b, best_s = _golden_refine(
                    lambda b: score(best_a, b), best_b - step, best_b + step)
        exact = math.isinf(best_s) and best_s > 0
        fits.append(PointInvolutivityFit(
            best_a, best_b, None if exact else best_s, exact))

    involutive = all(f.exact_zero or (f.order is not None
                                      and f.order > order_threshold)
                     for f in fits)
    return InvolutivityReport(involutive, fits, order_threshold)
