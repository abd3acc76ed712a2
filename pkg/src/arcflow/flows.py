"""Euler-curve integration, flow objects, pull-back and push-forward.

The solver follows an arc field by n-fold self-composition with step t/n
and estimates its error by Richardson comparison of the n-step and
2n-step endpoints, doubling n until the estimate meets the tolerance.
Flows are either CLOSED_FORM (the map is the true flow) or EULER(n).
"""

import math
from dataclasses import dataclass
from typing import Any, Callable, Optional

from arcflow.arcs import ArcField, bracket, evaluate, scale_field, sum_fields
from arcflow.errors import NoConvergenceError, PointEscapedError

CLOSED_FORM = "CLOSED_FORM"
EULER = "EULER"


@dataclass
class SolveResult:
    """Outcome of following an arc field to time t."""
    endpoint: Any
    steps_used: int
    error_estimate: float
    escaped: bool = False
    escape_time: Optional[float] = None
    trace: Optional[list] = None  # [(n, estimate)] per doubling, solver only

    def to_dict(self, describe=str):
        return {
            "endpoint_ref": describe(self.endpoint),
            "steps_used": self.steps_used,
            "error_estimate": self.error_estimate,
            "escaped": bool(self.escaped),
            "escape_time": self.escape_time,
        }


@dataclass(frozen=True)
class Flow:
    """Two-parameter family of maps; inverse of F_t is F_{-t}.

    ``map_fn(x, s)`` is unclamped in s. CLOSED_FORM flows satisfy the
    group law to float precision; EULER flows carry their step count.
    """
    space: Any
    map_fn: Callable[[Any, float], Any]
    name: str
    exactness: str = CLOSED_FORM
    euler_steps: Optional[int] = None
    generator: Optional[ArcField] = None

    def at(self, x, s):
        return self.map_fn(x, s)

    def as_arc_field(self):
        """View the flow as an arc field (clamped to |t| <= 1)."""
        return ArcField(self.space, self.map_fn, self.name,
                        is_exact_flow=(self.exactness == CLOSED_FORM))

    def __repr__(self):
        return f"Flow({self.name}, {self.exactness})"


def closed_form_flow(space, map_fn, name, generator=None):
    return Flow(space, map_fn, name, CLOSED_FORM, None, generator)


def euler_flow(X, n):
    """Approximate flow of X by n-step Euler curves."""
    def map_fn(x, s):
        return euler_curve(X, x, s, n)
    return Flow(X.space, map_fn, f"euler[{n}]({X.name})", EULER, n, X)


def euler_curve(X, x, t, n):
    """n-fold self-composition of X with step t/n starting at x."""
    if n < 1:
        raise ValueError("step count must be >= 1")
    step = t / n
    for i in range(n):
        try:
            x = evaluate(X, x, step)
        except PointEscapedError as exc:
            raise PointEscapedError(
                f"escaped after {i} of {n} steps: {exc}",
                steps_completed=i, time_fraction=i / n) from exc
    return x


def solve(X, x, t, tol, n_max=4096):
    """Follow X to time t, doubling Euler steps from 16 until converged.

    The endpoint always comes from the finest level computed. If the cap
    is exceeded, NoConvergenceError carries the last result; an escape
    returns a result flagged escaped with the estimated escape time.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    n = 16
    trace = []
    try:
        coarse = euler_curve(X, x, t, n)
        while True:
            fine = euler_curve(X, x, t, 2 * n)
            est = X.space.distance(coarse, fine)
            trace.append((2 * n, est))
            if est <= tol:
                return SolveResult(fine, 2 * n, est, trace=trace)
            if 4 * n > n_max:
                raise NoConvergenceError(
                    f"no convergence to tol={tol:g} within n_max={n_max} "
                    f"steps (last estimate {est:g})",
                    result=SolveResult(fine, 2 * n, est, trace=trace))
            n *= 2
            coarse = fine
    except PointEscapedError as exc:
        frac = exc.time_fraction if exc.time_fraction is not None else 0.0
        return SolveResult(None, n, math.inf, escaped=True,
                           escape_time=abs(t) * frac, trace=trace)


def pull_back(F, s, X, name=None):
    """Conjugate an arc field by a flow map: F_{-s} o X_t o F_s."""
    def ev(x, t):
        return F.at(evaluate(X, F.at(x, s), t), -s)
    return ArcField(X.space, ev, name or f"pullback({F.name},{s:g})*{X.name}",
                    composite=True)


def push_forward(F, s, X, name=None):
    """Mirror of pull_back: F_s o X_t o F_{-s}."""
    def ev(x, t):
        return F.at(evaluate(X, F.at(x, -s), t), s)
    return ArcField(X.space, ev, name or f"pushforward({F.name},{s:g})*{X.name}",
                    composite=True)


def lie_identity_gap(F, G, x, t):
    """Distance between F_t^* G_t (x) and its bracket expansion.

    For t >= 0 the right side is (t[F,G] + G)_t(x); for t < 0 it is
    (-t[-F,-G] - G)_{-t}(x). For exact flows both sides telescope to the
    same composition, so the gap is pure float (or interpolation) noise.
    """
    Fa, Ga = F.as_arc_field(), G.as_arc_field()
    lhs = F.at(G.at(F.at(x, t), t), -t)
    if t >= 0:
        rhs_field = sum_fields(scale_field(t, bracket(Fa, Ga)), Ga)
        rhs = evaluate(rhs_field, x, t)
    else:
        neg_br = bracket(scale_field(-1.0, Fa), scale_field(-1.0, Ga))
        rhs_field = sum_fields(scale_field(-t, neg_br), scale_field(-1.0, Ga))
        rhs = evaluate(rhs_field, x, -t)
    return F.space.distance(lhs, rhs)
