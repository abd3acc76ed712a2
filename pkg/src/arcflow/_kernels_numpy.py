"""Pure-numpy twins of the numba kernels.

Every function here computes the exact same arithmetic expression as its
numba counterpart so the two backends agree to the last bit.
"""

import numpy as np


def interp_zero_ext(samples, x0, dx, queries):
    """Sample a piecewise-linear, zero-extended grid function.

    ``samples[i]`` holds the value at ``x0 + i*dx``; queries outside the
    grid read zero.
    """
    pos = (queries - x0) / dx
    j = np.floor(pos).astype(np.int64)
    frac = pos - j
    n = samples.shape[0]
    left = np.where((j >= 0) & (j < n), samples[np.clip(j, 0, n - 1)], 0.0)
    jr = j + 1
    right = np.where((jr >= 0) & (jr < n), samples[np.clip(jr, 0, n - 1)], 0.0)
    return left * (1.0 - frac) + right * frac


def shift_integer(samples, k):
    """Shift samples left by k slots (value at i becomes value at i+k), zero fill."""
    n = samples.shape[0]
    out = np.zeros(n)
    src_lo = max(0, k)
    src_hi = min(n, n + k)
    if src_hi > src_lo:
        out[src_lo - k:src_hi - k] = samples[src_lo:src_hi]
    return out


def directed_hausdorff_sq(a, b):
    """max over rows of ``a`` of the squared distance to the closest row of ``b``."""
    worst = 0.0
    # chunk the broadcast so huge sets do not blow memory
    step = 512
    for lo in range(0, a.shape[0], step):
        diff = a[lo:lo + step, None, :] - b[None, :, :]
        d2 = np.einsum("ijk,ijk->ij", diff, diff)
        m = d2.min(axis=1).max()
        if m > worst:
            worst = m
    return worst


def pairwise_min_dist_sq(pts):
    """Smallest squared distance between two distinct rows of ``pts``."""
    best = np.inf
    step = 512
    n = pts.shape[0]
    for lo in range(0, n, step):
        chunk = pts[lo:lo + step]
        diff = chunk[:, None, :] - pts[None, :, :]
        d2 = np.einsum("ijk,ijk->ij", diff, diff)
        rows = np.arange(lo, min(lo + step, n))
        d2[rows - lo, rows] = np.inf
        m = d2.min()
        if m < best:
            best = m
    return best


def min_dist_sq_to_points(q, pts):
    """Squared distance from a single point ``q`` to the closest row of ``pts``."""
    diff = pts - q[None, :]
    d2 = np.einsum("ij,ij->i", diff, diff)
    return d2.min()
