"""Concrete metric spaces and fixture arc fields.

Three families ship with the library:

* Euclidean R^n with the norm metric (points are 1-d numpy arrays),
* uniform-grid discretizations of square-integrable functions on
  [-L, L] (:class:`GridFunction`), with the rectangle-rule L2 norm,
* finite planar point sets under the Hausdorff metric
  (:class:`CompactSet`).

Grid shifts and argument dilations use linear interpolation with zero
extension; mass pushed past the boundary is accounted and a relative
loss above ``MASS_LOSS_THRESHOLD`` raises PointEscapedError. The
interpolation kernels come from the selected backend (numba or numpy).
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from arcflow.arcs import ArcField
from arcflow.backend import kernels
from arcflow.errors import GridMismatchError, PointEscapedError
from arcflow.flows import closed_form_flow
from arcflow.metric import MetricSpaceHandle, SampledSet

MASS_LOSS_THRESHOLD = 1e-6

# Default grid: the Gaussian and its low derivatives are below 1e-14 at
# |x| = 8, so zero extension is honest; 4097 nodes keep bracket sweeps fast.
DEFAULT_HALF_WIDTH = 8.0
DEFAULT_DX = 1.0 / 256.0


# ---------------------------------------------------------------------------
# Euclidean spaces

def _euclid_sampler(seed, region):
    rng = np.random.default_rng(seed)
    center = np.asarray(region.center, dtype=float)
    dim = center.shape[0]
    pts = []
    for _ in range(region.count):
        v = rng.standard_normal(dim)
        norm = np.linalg.norm(v)
        if norm == 0.0:
            v = np.ones(dim)
            norm = np.linalg.norm(v)
        radius = region.radius * rng.uniform() ** (1.0 / dim)
        pts.append(center + (radius / norm) * v)
    return pts


def _euclid_nearest(point, sampled_set):
    stack = sampled_set.__dict__.get("_stack")
    if stack is None:
        stack = np.ascontiguousarray(np.asarray(sampled_set.points, dtype=float))
        object.__setattr__(sampled_set, "_stack", stack)
    q = np.ascontiguousarray(np.asarray(point, dtype=float))
    return math.sqrt(kernels.min_dist_sq_to_points(q, stack))


def euclidean_space(dim, name=None):
    """R^dim with the Euclidean norm metric."""
    return MetricSpaceHandle(
        name=name or f"r{dim}",
        distance=lambda p, q: float(np.linalg.norm(np.asarray(p) - np.asarray(q))),
        sampler=_euclid_sampler,
        magnitude=lambda p: float(np.linalg.norm(p)),
        default_center=np.zeros(dim),
        nearest_distance=_euclid_nearest,
    )


def make_translation(u, space, name=None):
    """Arc field x + t u; it is its own (closed-form) flow."""
    u = np.asarray(u, dtype=float)
    name = name or f"trans({u.tolist()})"
    arc = ArcField(space, lambda x, t: x + t * u, name, is_exact_flow=True,
                   claimed_constants={"lam": 0.0, "omega": 0.0,
                                      "rho": float(np.linalg.norm(u))})
    flow = closed_form_flow(space, lambda x, s: x + s * u, name, arc)
    return arc, flow


def make_dilation(u, space, name=None):
    """Dilation arc (1+t)(x-u) + u and its closed-form flow e^t x - (e^t - 1) u.

    The arc itself is not a flow (the group law fails at second order),
    but it generates one; both are returned.
    """
    u = np.asarray(u, dtype=float)
    name = name or f"dil({u.tolist()})"
    arc = ArcField(space, lambda x, t: (1.0 + t) * (x - u) + u, name,
                   claimed_constants={"lam": 1.0})
    flow = closed_form_flow(
        space, lambda x, s: math.exp(s) * x - (math.exp(s) - 1.0) * u,
        f"flow:{name}", arc)
    return arc, flow


def vector_field_arc(f, space, name, lam=None):
    """Arc field x + t f(x) induced by a vector field f."""
    constants = {"lam": lam} if lam is not None else None
    return ArcField(space, lambda x, t: x + t * f(x), name,
                    claimed_constants=constants)


def rotation_field(space, name="rot"):
    """Quarter-turn generator on R^2: x + t J x."""
    def f(x):
        return np.array([-x[1], x[0]])
    return vector_field_arc(f, space, name, lam=1.0)


def heisenberg_field(space, name="heisY"):
    """Vector-field arc (0, 1, x1) on R^3 plus its closed-form flow."""
    def f(x):
        return np.array([0.0, 1.0, x[0]])

    arc = vector_field_arc(f, space, name, lam=1.0)
    flow = closed_form_flow(
        space, lambda x, s: np.array([x[0], x[1] + s, x[2] + s * x[0]]),
        f"flow:{name}", arc)
    return arc, flow


def circle_set(n_points, radius=1.0):
    """Unit-circle sample for invariance checks."""
    theta = np.linspace(0.0, 2.0 * np.pi, n_points, endpoint=False)
    pts = np.column_stack([radius * np.cos(theta), radius * np.sin(theta)])
    return SampledSet(points=pts, provenance=f"circle r={radius} n={n_points}",
                      resolution=float(2 * np.pi * radius / n_points))


def line_set(direction, half_length, spacing):
    """Evenly sampled segment through the origin along ``direction``."""
    direction = np.asarray(direction, dtype=float)
    direction = direction / np.linalg.norm(direction)
    s = np.arange(-half_length, half_length + spacing / 2, spacing)
    pts = s[:, None] * direction[None, :]
    return SampledSet(points=pts, provenance="line", resolution=float(spacing))


# ---------------------------------------------------------------------------
# Grid functions

@dataclass(frozen=True)
class GridSpec:
    """Uniform grid on [-L, L]: nodes x_i = -L + i dx, both ends included."""
    half_width: float = DEFAULT_HALF_WIDTH
    dx: float = DEFAULT_DX

    @property
    def n_nodes(self):
        return int(round(2.0 * self.half_width / self.dx)) + 1

    def nodes(self):
        return -self.half_width + self.dx * np.arange(self.n_nodes)


@dataclass(frozen=True)
class GridFunction:
    """Samples of a square-integrable function on a uniform grid."""
    spec: GridSpec
    samples: np.ndarray

    def __post_init__(self):
        if self.samples.shape != (self.spec.n_nodes,):
            raise GridMismatchError(
                f"expected {self.spec.n_nodes} samples, got {self.samples.shape}")

    @staticmethod
    def from_callable(fn, spec=None):
        spec = spec or GridSpec()
        return GridFunction(spec, np.asarray(fn(spec.nodes()), dtype=float))

    @staticmethod
    def zero(spec=None):
        spec = spec or GridSpec()
        return GridFunction(spec, np.zeros(spec.n_nodes))

    @staticmethod
    def gaussian(spec=None):
        return GridFunction.from_callable(lambda x: np.exp(-x ** 2), spec)

    @staticmethod
    def indicator(a, b, spec=None):
        return GridFunction.from_callable(
            lambda x: np.where((x >= a) & (x <= b), 1.0, 0.0), spec)


def _require_same_grid(f, g):
    if f.spec != g.spec:
        raise GridMismatchError(
            f"grid mismatch: {f.spec} vs {g.spec}")


def grid_norm(f):
    """Rectangle-rule L2 norm: sqrt(dx * sum of squares), all nodes weighted."""
    return math.sqrt(f.spec.dx * float(np.dot(f.samples, f.samples)))


def grid_axpy(alpha, f, g):
    """alpha * f + g on a shared grid."""
    _require_same_grid(f, g)
    return GridFunction(f.spec, alpha * f.samples + g.samples)


def grid_scale(alpha, f):
    return GridFunction(f.spec, alpha * f.samples)


def grid_distance(f, g):
    _require_same_grid(f, g)
    diff = f.samples - g.samples
    return math.sqrt(f.spec.dx * float(np.dot(diff, diff)))


def grid_shift(f, t):
    """Samples of x -> f(x + t); exact index shift when t is a node multiple.

    Mass shifted past the boundary is dropped; a relative squared-mass
    loss above ``MASS_LOSS_THRESHOLD`` raises PointEscapedError.
    """
    spec = f.spec
    if abs(t) >= spec.half_width:
        raise PointEscapedError(
            f"shift by {t:g} exceeds the grid half-width {spec.half_width:g}")
    offset = t / spec.dx
    total = float(np.dot(f.samples, f.samples))
    k = int(round(offset))
    if abs(offset - k) < 1e-12 * max(1.0, abs(offset)):
        shifted = kernels.shift_integer(f.samples, k)
        if k > 0:
            lost = float(np.dot(f.samples[:k], f.samples[:k]))
        elif k < 0:
            lost = float(np.dot(f.samples[k:], f.samples[k:]))
        else:
            lost = 0.0
    else:
        queries = spec.nodes() + t
        shifted = kernels.interp_zero_ext(f.samples, -spec.half_width,
                                          spec.dx, queries)
        if t > 0:
            mask = spec.nodes() < -spec.half_width + t
        else:
            mask = spec.nodes() > spec.half_width + t
        lost = float(np.dot(f.samples[mask], f.samples[mask]))
    if total > 0.0 and lost / total > MASS_LOSS_THRESHOLD:
        raise PointEscapedError(
            f"shift by {t:g} drops {lost / total:.3e} of the squared mass")
    return GridFunction(spec, shifted)


def grid_dilate_arg(f, t):
    """Samples of x -> f(e^t x) via interpolation; t = 0 is the identity."""
    if t == 0.0:
        return GridFunction(f.spec, f.samples.copy())
    queries = math.exp(t) * f.spec.nodes()
    out = kernels.interp_zero_ext(f.samples, -f.spec.half_width,
                                  f.spec.dx, queries)
    return GridFunction(f.spec, out)


def write_grid_csv(f, path):
    """CSV with one row per node, preceded by a grid-metadata comment."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# L={f.spec.half_width:g} dx={f.spec.dx!r}\n")
        fh.write("x,value\n")
        for x, v in zip(f.spec.nodes(), f.samples):
            fh.write(f"{x!r},{v!r}\n")


def read_grid_csv(path):
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        if not header.startswith("# L="):
            raise ValueError(f"{path}: missing grid metadata comment")
        parts = dict(item.split("=") for item in header[2:].split())
        spec = GridSpec(float(parts["L"]), float(parts["dx"]))
        fh.readline()  # column header
        values = [float(line.split(",")[1]) for line in fh if line.strip()]
    return GridFunction(spec, np.asarray(values))


def _grid_sampler_factory(spec):
    # taper random samples to zero near the boundary so unit-time shifts
    # do not push mass off the grid
    margin = min(2.0, spec.half_width / 4.0)
    x = spec.nodes()
    envelope = np.clip((spec.half_width - margin - np.abs(x)) / margin, 0.0, 1.0)

    def sampler(seed, region):
        rng = np.random.default_rng(seed)
        center = region.center if region.center is not None else GridFunction.zero(spec)
        pts = []
        for _ in range(region.count):
            noise = rng.standard_normal(spec.n_nodes) * envelope
            nrm = grid_norm(GridFunction(spec, noise))
            target = region.radius * rng.uniform()
            scalef = target / nrm if nrm > 0 else 0.0
            pts.append(GridFunction(spec, center.samples + scalef * noise))
        return pts
    return sampler


def grid_space(spec=None, name="l2"):
    """Metric space of grid functions with the rectangle-rule L2 metric."""
    spec = spec or GridSpec()
    return MetricSpaceHandle(
        name=name,
        distance=grid_distance,
        sampler=_grid_sampler_factory(spec),
        magnitude=grid_norm,
        default_center=GridFunction.zero(spec),
    )


# ---------------------------------------------------------------------------
# Hausdorff space of finite planar sets

@dataclass(frozen=True)
class CompactSet:
    """Finite nonempty planar point set, deduplicated within tolerance."""
    points: np.ndarray

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.points, dtype=float))
        if pts.size == 0:
            raise ValueError("compact set must be nonempty")
        dedup = []
        for row in pts:
            if not any(np.linalg.norm(row - q) <= 1e-12 for q in dedup):
                dedup.append(row)
        object.__setattr__(self, "points", np.array(dedup))

    def __len__(self):
        return self.points.shape[0]


def hausdorff_distance(A, B):
    """max of the two directed point-set deviations."""
    a = np.ascontiguousarray(A.points)
    b = np.ascontiguousarray(B.points)
    forward = kernels.directed_hausdorff_sq(a, b)
    backward = kernels.directed_hausdorff_sq(b, a)
    return math.sqrt(max(forward, backward))


def _hausdorff_sampler(seed, region):
    rng = np.random.default_rng(seed)
    center = region.center
    base = center.points if center is not None else np.zeros((1, 2))
    anchor = base.mean(axis=0)
    sets = []
    for _ in range(region.count):
        k = int(rng.integers(1, 9))
        pts = anchor + region.radius * rng.uniform(-1.0, 1.0, size=(k, 2))
        sets.append(CompactSet(pts))
    return sets


def hausdorff_space(name="hausdorff"):
    return MetricSpaceHandle(
        name=name,
        distance=hausdorff_distance,
        sampler=_hausdorff_sampler,
        magnitude=lambda A: float(np.max(np.linalg.norm(A.points, axis=1))),
        default_center=CompactSet(np.zeros((1, 2))),
    )


def set_translation(u, space, name=None):
    """Pointwise translation of every member of a compact set."""
    u = np.asarray(u, dtype=float)
    name = name or f"setTrans({u.tolist()})"
    arc = ArcField(space, lambda A, t: CompactSet(A.points + t * u), name,
                   is_exact_flow=True)
    flow = closed_form_flow(space, lambda A, s: CompactSet(A.points + s * u),
                            name, arc)
    return arc, flow


def set_dilation(u, space, name=None):
    """Pointwise dilation arc about u, with its pointwise exponential flow."""
    u = np.asarray(u, dtype=float)
    name = name or f"setDil({u.tolist()})"
    arc = ArcField(
        space, lambda A, t: CompactSet((1.0 + t) * (A.points - u) + u), name)
    flow = closed_form_flow(
        space,
        lambda A, s: CompactSet(math.exp(s) * A.points - (math.exp(s) - 1.0) * u),
        f"flow:{name}", arc)
    return arc, flow
