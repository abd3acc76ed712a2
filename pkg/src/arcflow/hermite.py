"""Physicists' Hermite polynomials and Gaussian derivatives.

H_0 = 1, H_1(x) = 2x, H_{n+1}(x) = 2x H_n(x) - 2n H_{n-1}(x).
The n-th derivative of exp(-x^2) is (-1)^n H_n(x) exp(-x^2).
"""

import math

import numpy as np

from arcflow.spaces import GridSpec


def hermite_eval(n, x):
    """H_n(x) by the three-term recurrence; x may be a scalar or array."""
    if n < 0:
        raise ValueError("degree must be >= 0")
    x = np.asarray(x, dtype=float)
    prev = np.ones_like(x)
    if n == 0:
        return prev if prev.shape else float(prev)
    cur = 2.0 * x
    for k in range(1, n):
        prev, cur = cur, 2.0 * x * cur - 2.0 * k * prev
    return cur if cur.shape else float(cur)


def gaussian_derivative(n, x):
    """n-th derivative of exp(-x^2): (-1)^n H_n(x) exp(-x^2)."""
    x = np.asarray(x, dtype=float)
    out = (-1.0) ** n * hermite_eval(n, x) * np.exp(-x ** 2)
    return out if np.ndim(out) else float(out)


def hermite_orthogonality(m, n, spec=None):
    """Rectangle-rule quadrature of H_m H_n exp(-x^2) over the grid.

    The exact value is n! 2^n sqrt(pi) when m = n, else 0.
    """
    spec = spec or GridSpec()
    x = spec.nodes()
    integrand = hermite_eval(m, x) * hermite_eval(n, x) * np.exp(-x ** 2)
    return float(spec.dx * integrand.sum())


def hermite_diagonal_exact(n):
    """Closed form n! 2^n sqrt(pi) for the orthogonality diagonal."""
    return math.factorial(n) * 2.0 ** n * math.sqrt(math.pi)
