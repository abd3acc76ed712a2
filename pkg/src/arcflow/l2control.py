"""Two-flow control of discretized square-integrable functions.

Four elementary flows act on grid functions:

    X_t(f) = f + t h          (vector-space translation by h)
    Y_t(f)(x) = f(x + t)      (function translation)
    V_t(f) = e^t f            (vector-space dilation)
    W_t(f)(x) = f(e^t x)      (function dilation)

With h the Gaussian exp(-x^2), iterated brackets of X with Y behave like
translations by successive Gaussian derivatives. Expanding a target g in
those derivatives gives coefficients c_n, and following the combined
field sum_n c_n [X,n,Y] for unit time from the zero function reproduces
the partial sum using nothing but compositions of X and Y.
"""

import math
from dataclasses import dataclass, field as dataclass_field
from typing import Optional

import numpy as np

from arcflow import arcs
from arcflow.arcs import ArcField, iterated_bracket, linear_combination
from arcflow.errors import WeightOverflowError
from arcflow.flows import closed_form_flow, euler_curve
from arcflow.hermite import gaussian_derivative, hermite_eval
from arcflow.metric import DEFAULT_T_GRID, TangencyReport, estimate_order, zero_floor
from arcflow.spaces import (
    GridFunction,
    GridSpec,
    grid_axpy,
    grid_dilate_arg,
    grid_distance,
    grid_norm,
    grid_scale,
    grid_shift,
    grid_space,
)

SQRT_2PI = math.sqrt(2.0 * math.pi)


def l2_X(h, space, name="X"):
    """Vector-space translation by a fixed grid function h."""
    arc = ArcField(space, lambda f, t: grid_axpy(t, h, f), name,
                   is_exact_flow=True)
    flow = closed_form_flow(space, lambda f, s: grid_axpy(s, h, f), name, arc)
    return arc, flow


def l2_Y(space, name="Y"):
    """Function translation f(x) -> f(x + t)."""
    arc = ArcField(space, lambda f, t: grid_shift(f, t), name,
                   is_exact_flow=True)
    flow = closed_form_flow(space, lambda f, s: grid_shift(f, s), name, arc)
    return arc, flow


def l2_V(space, name="V"):
    """Vector-space dilation f -> e^t f."""
    arc = ArcField(space, lambda f, t: grid_scale(math.exp(t), f), name,
                   is_exact_flow=True)
    flow = closed_form_flow(space, lambda f, s: grid_scale(math.exp(s), f),
                            name, arc)
    return arc, flow


def l2_W(space, name="W"):
    """Function dilation f(x) -> f(e^t x)."""
    arc = ArcField(space, lambda f, t: grid_dilate_arg(f, t), name,
                   is_exact_flow=True)
    flow = closed_form_flow(space, lambda f, s: grid_dilate_arg(f, s), name, arc)
    return arc, flow


@dataclass(frozen=True)
class CoefficientVector:
    """Expansion coefficients c_0..c_N with their provenance."""
    values: tuple
    target: str
    provenance: str

    def __len__(self):
        return len(self.values)

    def to_dict(self):
        return {"values": list(self.values), "target": self.target,
                "provenance": self.provenance}


def coefficients_chi01(N):
    """Closed-form coefficients for the indicator of [0, 1].

    c_n = (-1)^n [H_{n+1}(1) - H_{n+1}(0)] / (2 (n+1) n! 2^n sqrt(2 pi)).
    The endpoint difference is an exact antiderivative of the integral
    of H_n over [0, 1].
    """
    if N < 0:
        raise ValueError("order must be >= 0")
    vals = []
    for n in range(N + 1):
        endpoint = hermite_eval(n + 1, 1.0) - hermite_eval(n + 1, 0.0)
        denom = 2.0 * (n + 1) * math.factorial(n) * 2.0 ** n * SQRT_2PI
        vals.append((-1.0) ** n * endpoint / denom)
    return CoefficientVector(tuple(vals), "chi01", "closed form")


def coefficients_general(g, N):
    """Quadrature coefficients c_n = (-1)^n / (n! 2^n sqrt(2 pi)) * int g H_n.

    The integrand is restricted to the support of g on the grid. The
    Gaussian-inverse weight must stay finite there; otherwise the caller
    has to truncate the support first.
    """
    if N < 0:
        raise ValueError("order must be >= 0")
    x = g.spec.nodes()
    support = g.samples != 0.0
    if np.any(support):
        xmax = float(np.max(np.abs(x[support])))
        if not np.isfinite(np.exp(xmax ** 2)):
            raise WeightOverflowError(
                f"exp(x^2) overflows at |x|={xmax:g} on the target support; "
                "truncate the target")
    vals = []
    gs = g.samples[support]
    xs = x[support]
    for n in range(N + 1):
        quad = g.spec.dx * float(np.dot(gs, hermite_eval(n, xs))) if xs.size else 0.0
        vals.append((-1.0) ** n * quad / (math.factorial(n) * 2.0 ** n * SQRT_2PI))
    return CoefficientVector(tuple(vals), "sampled", "quadrature")


def direct_sum_oracle(coeffs, spec=None):
    """Evaluate sum_n c_n h^[n] analytically on the grid (no compositions)."""
    spec = spec or GridSpec()
    x = spec.nodes()
    total = np.zeros_like(x)
    for n, c in enumerate(coeffs.values):
        total += c * gaussian_derivative(n, x)
    return GridFunction(spec, total)


def build_control_field(X, Y, coeffs, name="control"):
    """Compose sum_n c_n [X,n,Y], the n = 0 term applied first."""
    terms = [(c, iterated_bracket(X, Y, n)) for n, c in enumerate(coeffs.values)]
    return linear_combination(terms, name=name)


@dataclass(frozen=True)
class ReachabilitySpec:
    """Inputs for a reachability run: target, bracket order, Euler steps."""
    target: GridFunction
    target_name: str
    order: int
    steps: int
    trace_steps: tuple = (16, 64, 256)
    coeffs: Optional[CoefficientVector] = None

    def __post_init__(self):
        if self.order < 0:
            raise ValueError("order must be >= 0")
        if self.steps < 1:
            raise ValueError("steps must be >= 1")


@dataclass
class ReachResult:
    output: GridFunction
    oracle: GridFunction
    gap_oracle: float
    gap_target: float
    trace: list  # rows {n, gap_oracle, gap_target, cost_evals}
    coeffs: CoefficientVector

    def trace_dict(self, order):
        return {
            "N": order,
            "n_values": [row["n"] for row in self.trace],
            "gap_oracle": [row["gap_oracle"] for row in self.trace],
            "gap_target": [row["gap_target"] for row in self.trace],
            "cost_evals": [row["cost_evals"] for row in self.trace],
        }


def reach(spec, space=None):
    """Follow the control field for unit time from the zero function.

    Euler endpoints are reported for every step count in the trace (the
    requested ``steps`` is appended when missing); gaps are measured
    against the analytic partial sum and against the target.
    """
    grid = spec.target.spec
    space = space or grid_space(grid)
    h = GridFunction.gaussian(grid)
    X, _ = l2_X(h, space)
    Y, _ = l2_Y(space)
    coeffs = spec.coeffs
    if coeffs is None:
        if spec.target_name == "chi01":
            coeffs = coefficients_chi01(spec.order)
        else:
            coeffs = coefficients_general(spec.target, spec.order)
    field = build_control_field(X, Y, coeffs)
    oracle = direct_sum_oracle(coeffs, grid)

    steps_list = list(spec.trace_steps)
    if spec.steps not in steps_list:
        steps_list.append(spec.steps)
    steps_list = sorted(set(steps_list))

    zero = GridFunction.zero(grid)
    rows = []
    output = None
    for n in steps_list:
        arcs.reset_evaluation_count()
        endpoint = euler_curve(field, zero, 1.0, n)
        rows.append({
            "n": n,
            "gap_oracle": grid_distance(endpoint, oracle),
            "gap_target": grid_distance(endpoint, spec.target),
            "cost_evals": arcs.evaluation_count(),
        })
        if n == spec.steps:
            output = endpoint
    return ReachResult(output, oracle,
                       grid_distance(output, oracle),
                       grid_distance(output, spec.target),
                       rows, coeffs)


# Dyadic grids used by the bracket-relation table. Even exponents make
# sqrt(t) an exact node multiple, so translation legs do not interpolate.
EXACT_SHIFT_T_GRID = tuple(2.0 ** -k for k in range(4, 13, 2))
DILATION_T_GRID = tuple(2.0 ** -k for k in range(4, 12))


def bracket_table_check(spec=None):
    """Fit the tangency class of the six elementary bracket relations.

    Returns a dict of TangencyReports keyed by relation. The commuting
    pairs [Y,V] and [V,W] are checked against the identity arc and come
    out EXACT_ZERO; the other four are checked against their stated
    first-order candidates and come out TANGENT.
    """
    spec = spec or GridSpec()
    space = grid_space(spec)
    x = spec.nodes()
    h = GridFunction.gaussian(spec)
    hprime = GridFunction(spec, gaussian_derivative(1, x))
    x_hprime = GridFunction(spec, x * gaussian_derivative(1, x))

    X, _ = l2_X(h, space)
    Y, _ = l2_Y(space)
    V, _ = l2_V(space)
    W, _ = l2_W(space)
    shift_generator = ArcField(space, lambda f, t: grid_axpy(t, hprime, f),
                               "Z1", is_exact_flow=True)
    x_weighted = ArcField(space, lambda f, t: grid_axpy(t, x_hprime, f),
                          "xZ1", is_exact_flow=True)
    backward_Y = arcs.scale_field(-1.0, Y, name="Y-reversed")
    identity = arcs.zero_field(space)
    zero = GridFunction.zero(spec)

    floor = zero_floor(grid_norm(h))

    def fit(bracket_field, candidate, base, t_grid, floor_=None):
        ga = [grid_distance(arcs.evaluate(bracket_field, base, t),
                            arcs.evaluate(candidate, base, t)) for t in t_grid]
        return estimate_order(t_grid, ga, floor=floor_, scale=grid_norm(h))

    return {
        "XY_vs_Z": fit(arcs.bracket(X, Y), shift_generator, zero,
                       EXACT_SHIFT_T_GRID),
        "XV_vs_X": fit(arcs.bracket(X, V), X, zero, DILATION_T_GRID),
        "XW_vs_xZ": fit(arcs.bracket(X, W), x_weighted, zero, DILATION_T_GRID),
        "YV_zero": fit(arcs.bracket(Y, V), identity, h,
                       EXACT_SHIFT_T_GRID, floor_=floor),
        "YW_vs_backshift": fit(arcs.bracket(Y, W), backward_Y, h,
                               DILATION_T_GRID),
        "VW_zero": fit(arcs.bracket(V, W), identity, h,
                       EXACT_SHIFT_T_GRID, floor_=floor),
    }
