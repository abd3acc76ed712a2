"""Numerics for flows, brackets and integrability diagnostics on metric spaces.

Modules:
- metric: space handles, axiom checks, asymptotic-order fitting
- arcs: arc-field algebra (sum, scale, bracket, iterated bracket)
- flows: Euler curves, solver, pull-back/push-forward
- spaces: Euclidean, grid-function and Hausdorff fixtures
- diagnostics: sampled estimators, surfaces, involutivity, invariance
- hermite / l2control: the two-flow reachability machinery
- cli: the ``arcflow`` command
"""

__version__ = "0.1.0"

from arcflow.backend import BACKEND_NAME

__all__ = ["BACKEND_NAME", "__version__"]
