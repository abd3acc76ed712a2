"""Arc fields as composable values.

An arc field assigns to every point a short Lipschitz curve through it,
``eval(x, t)`` with ``eval(x, 0) = x`` and t clamped to [-1, 1]. Sums,
scalar multiples and brackets are plain compositions of these maps:

    (X + Y)_t(x)  = Y_t(X_t(x))
    (a X)_t(x)    = X(x, clamp(a(x) * t))
    [X, Y]_t(x)   = Y_{-r} X_{-r} Y_r X_r (x),  r = sqrt(t),  t >= 0
    [X, Y]_t(x)   = X_{-r} Y_{-r} X_r Y_r (x),  r = sqrt(-t), t < 0

Composite fields are closures over their operands (a composition tree,
never flattened), so an n-fold iterated bracket costs Theta(4^n) leaf
evaluations. Leaf evaluations are counted for cost reporting.
"""

from dataclasses import dataclass
from typing import Any, Callable, Optional

from arcflow.errors import SpaceMismatchError
from arcflow.metric import MetricSpaceHandle

_leaf_evaluations = 0


def reset_evaluation_count():
    global _leaf_evaluations
    _leaf_evaluations = 0


def evaluation_count():
    """Number of primitive (non-composite) arc evaluations since last reset."""
    return _leaf_evaluations


def clamp_time(t):
    return -1.0 if t < -1.0 else (1.0 if t > 1.0 else float(t))


@dataclass(frozen=True)
class ScalarField:
    """Real-valued function on a space, optionally a declared constant.

    The Lipschitz bound is advisory metadata; nothing in the algebra
    assumes it.
    """
    eval_fn: Callable[[Any], float]
    name: str
    lipschitz_bound: Optional[float] = None
    constant_value: Optional[float] = None

    @staticmethod
    def constant(c, name=None):
        c = float(c)
        return ScalarField(lambda x: c, name or f"{c:g}",
                           lipschitz_bound=0.0, constant_value=c)

    @property
    def is_constant(self):
        return self.constant_value is not None

    def __call__(self, x):
        return self.eval_fn(x)


def as_scalar_field(a):
    if isinstance(a, ScalarField):
        return a
    return ScalarField.constant(a)


@dataclass(frozen=True)
class ArcField:
    """Evaluatable family of arcs on a metric space.

    ``is_exact_flow`` declares that eval satisfies the group law exactly
    (translations, dilation flows, the elementary L2 flows); it is never
    assumed, only tested. ``claimed_constants`` may carry advisory
    lam / omega / rho values.
    """
    space: MetricSpaceHandle
    eval_fn: Callable[[Any, float], Any]
    name: str
    is_exact_flow: bool = False
    claimed_constants: Optional[dict] = None
    composite: bool = False

    def at(self, x, t):
        return evaluate(self, x, t)

    def __repr__(self):
        return f"ArcField({self.name})"


def evaluate(X, x, t):
    """Evaluate an arc field with the time clamped into [-1, 1]."""
    global _leaf_evaluations
    if not X.composite:
        _leaf_evaluations += 1
    return X.eval_fn(x, clamp_time(t))


def _require_same_space(*fields):
    s0 = fields[0].space
    for f in fields[1:]:
        if f.space is not s0 and f.space.name != s0.name:
            raise SpaceMismatchError(
                f"arc fields live on different spaces: {s0.name!r} vs {f.space.name!r}")
    return s0


def zero_field(space):
    """The constant arc field: every arc sits still at its base point."""
    return ArcField(space, lambda x, t: x, "0", is_exact_flow=True)


def sum_fields(X, Y, name=None):
    """(X + Y)_t(x) = Y_t(X_t(x)); X is applied first."""
    space = _require_same_space(X, Y)

    def ev(x, t):
        return evaluate(Y, evaluate(X, x, t), t)

    return ArcField(space, ev, name or f"sum({X.name},{Y.name})", composite=True)


def scale_field(a, X, name=None):
    """(a X)_t(x) = X(x, clamp(a(x) t)); a(x) = 0 freezes the arc."""
    a = as_scalar_field(a)

    def ev(x, t):
        return evaluate(X, x, a(x) * t)

    exact = X.is_exact_flow and a.is_constant
    return ArcField(X.space, ev, name or f"scale({a.name},{X.name})",
                    is_exact_flow=exact, composite=True)


def linear_combination(terms, name=None):
    """Compose scaled fields left to right; first listed term innermost.

    ``terms`` is an ordered list of (scalar, field) pairs; scalars may be
    plain numbers. The empty list gives the zero field.
    """
    terms = [(as_scalar_field(a), X) for a, X in terms]
    if not terms:
        raise ValueError("linear_combination of no terms has no space; "
                         "use zero_field(space)")
    space = _require_same_space(*[X for _, X in terms])
    scaled = [scale_field(a, X) for a, X in terms]

    def ev(x, t):
        for f in scaled:
            x = evaluate(f, x, t)
        return x

    if name is None:
        name = "+".join(f"({a.name}){X.name}" for a, X in terms)
    return ArcField(space, ev, name, composite=True)


def bracket(X, Y, name=None):
    """Commutation-defect arc: four legs at time sqrt(|t|).

    The t < 0 branch swaps the roles of X and Y, which realizes
    [X, Y] = -[Y, X] as an exact identity of composed maps.
    """
    space = _require_same_space(X, Y)

    def ev(x, t):
        if t >= 0.0:
            r = t ** 0.5
            x = evaluate(X, x, r)
            x = evaluate(Y, x, r)
            x = evaluate(X, x, -r)
            x = evaluate(Y, x, -r)
        else:
            r = (-t) ** 0.5
            x = evaluate(Y, x, r)
            x = evaluate(X, x, r)
            x = evaluate(Y, x, -r)
            x = evaluate(X, x, -r)
        return x

    return ArcField(space, ev, name or f"bracket({X.name},{Y.name})",
                    composite=True)


def iterated_bracket(X, Y, n, name=None):
    """n-fold right-iterated bracket; n = 0 returns X itself."""
    if n < 0:
        raise ValueError("iteration depth must be >= 0")
    field = X
    for _ in range(n):
        field = bracket(field, Y)
    if name is not None and n > 0:
        field = ArcField(field.space, field.eval_fn, name, composite=True)
    return field
