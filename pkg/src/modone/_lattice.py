"""Compiled kernels for counting lattice points of Z^2 M + xi in a polygon.

The support of the test function is a convex polygon. Its preimage under
``w -> (w - xi) M^{-1}`` is enumerated column by column along whichever
integer axis needs fewer columns; each column's chord fixes a short run of
candidates that are then tested with the exact indicator.
"""
import math

import numpy as np
from numba import config, njit, prange

# the bundled TBB is too old for numba; prefer OpenMP, then the builtin pool
config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]

RECTANGLE = 0
TRIANGLE = 1


@njit(cache=True, inline="always")
def _inside(kind, L, wx, wy):
    if not (wx > 0.0 and wx <= 1.0):
        return False
    if kind == RECTANGLE:
        return -0.5 * L <= wy and wy <= 0.5 * L
    r = wy / wx
    return -L < r and r <= L


@njit(cache=True)
def count_points(m00, m01, m10, m11, x0, x1, kind, L, budget):
    """Exact F(M, xi); returns -1 when more than ``budget`` cells are needed."""
    if L <= 0.0:
        return 0
    if kind == RECTANGLE:
        nv = 4
        vx = np.array([0.0, 1.0, 1.0, 0.0])
        vy = np.array([-0.5 * L, -0.5 * L, 0.5 * L, 0.5 * L])
    else:
        nv = 3
        vx = np.array([0.0, 1.0, 1.0])
        vy = np.array([0.0, -L, L])
    det = m00 * m11 - m01 * m10
    i00 = m11 / det
    i01 = -m01 / det
    i10 = -m10 / det
    i11 = m00 / det
    pa = np.empty(nv)
    pb = np.empty(nv)
    for k in range(nv):
        dx = vx[k] - x0
        dy = vy[k] - x1
        pa[k] = dx * i00 + dy * i10
        pb[k] = dx * i01 + dy * i11
    # iterate columns along the axis with the smaller extent
    swap = (pb.max() - pb.min()) < (pa.max() - pa.min())
    if swap:
        tmp = pa
        pa = pb
        pb = tmp
    amin = pa.min()
    amax = pa.max()
    tol = 1e-9 * (1.0 + max(abs(amin), abs(amax)))
    c_lo = math.ceil(amin - tol)
    c_hi = math.floor(amax + tol)
    used = 0
    count = 0
    for c in range(c_lo, c_hi + 1):
        cc = min(max(float(c), amin), amax)
        lo = np.inf
        hi = -np.inf
        for k in range(nv):
            a1 = pa[k]
            b1 = pb[k]
            a2 = pa[(k + 1) % nv]
            b2 = pb[(k + 1) % nv]
            if (a1 <= cc and cc <= a2) or (a2 <= cc and cc <= a1):
                if a1 == a2:
                    lo = min(lo, b1, b2)
                    hi = max(hi, b1, b2)
                else:
                    b = b1 + (cc - a1) / (a2 - a1) * (b2 - b1)
                    lo = min(lo, b)
                    hi = max(hi, b)
        if lo > hi:
            continue
        d_lo = math.floor(lo) - 1
        d_hi = math.ceil(hi) + 1
        used += d_hi - d_lo + 1
        if used > budget:
            return -1
        for d in range(d_lo, d_hi + 1):
            if swap:
                p = float(d)
                q = float(c)
            else:
                p = float(c)
                q = float(d)
            wx = p * m00 + q * m10 + x0
            wy = p * m01 + q * m11 + x1
            if _inside(kind, L, wx, wy):
                count += 1
    return count


@njit(cache=True, parallel=True)
def count_points_batch(mats, xis, kind, L, budget):
    n = mats.shape[0]
    out = np.empty(n, dtype=np.int64)
    for i in prange(n):
        out[i] = count_points(
            mats[i, 0, 0], mats[i, 0, 1], mats[i, 1, 0], mats[i, 1, 1],
            xis[i, 0], xis[i, 1], kind, L, budget,
        )
    return out


@njit(cache=True)
def pair_window_sum(pts, ell, kind):
    """``sum_{i != j} psi((xi_i - xi_j)/ell)`` over circular differences.

    ``kind`` 0 is the triangle ``max(1-|x|, 0)``, 1 the box ``[-1/2, 1/2)``.
    Points must be sorted in [0, 1) and ``ell * radius <= 1/2``.
    """
    n = pts.size
    reach = ell if kind == 0 else 0.5 * ell
    total = 0.0
    for i in range(n):
        for step in range(1, n):
            j = i + step
            d = pts[j] - pts[i] if j < n else pts[j - n] + 1.0 - pts[i]
            if d > reach:
                break
            x = d / ell
            if kind == 0:
                total += 2.0 * max(1.0 - x, 0.0)
            elif x < 0.5:
                total += 2.0
            else:
                total += 1.0  # the half-open box keeps -1/2 but not +1/2
    return total
