"""Point sequences on the unit circle: m*alpha, sqrt(m*alpha) and i.i.d. uniform.

Every generator returns an :class:`OrderedPointArray`, a sorted, read-only
array of points in ``[0, 1)`` tagged with the generator that produced it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from .errors import InvalidArgument


@dataclass(frozen=True)
class OrderedPointArray:
    points: np.ndarray
    meta: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)  # private copy
        if pts.ndim != 1 or pts.size < 1:
            raise InvalidArgument("need a non-empty 1-D array of points")
        if not np.all(np.isfinite(pts)):
            raise InvalidArgument("points must be finite")
        if pts[0] < 0.0 or pts[-1] >= 1.0:
            raise InvalidArgument("points must lie in [0, 1)")
        if np.any(np.diff(pts) < 0):
            raise InvalidArgument("points must be sorted")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def n(self) -> int:
        return int(self.points.size)

    def __len__(self):
        return self.n

    def __array__(self, dtype=None, copy=None):
        return self.points if dtype is None else self.points.astype(dtype)


def _frac(x: np.ndarray) -> np.ndarray:
    f = x - np.floor(x)
    # x slightly below an integer can round up to exactly 1.0
    f[f >= 1.0] = 0.0
    return f


def _ordered(values: np.ndarray, meta: dict) -> OrderedPointArray:
    return OrderedPointArray(np.sort(values, kind="stable"), meta)


def gen_malpha(alpha: float, n: int) -> OrderedPointArray:
    """Sorted fractional parts of ``m*alpha`` for ``m = 1..n``."""
    if not math.isfinite(alpha):
        raise InvalidArgument(f"alpha must be finite, got {alpha!r}")
    if n < 1:
        raise InvalidArgument("n must be >= 1")
    a = alpha - math.floor(alpha)
    m = np.arange(1, n + 1, dtype=float)
    return _ordered(_frac(m * a), {"generator": "malpha", "alpha": alpha, "n": n})


def gen_sqrt_malpha(alpha: float, n: int) -> OrderedPointArray:
    """Sorted fractional parts of ``sqrt(m*alpha)``, ``m = 1..n``.

    Perfect squares (for rational alpha) are kept; they land on 0.
    """
    if not (math.isfinite(alpha) and alpha > 0):
        raise InvalidArgument(f"alpha must be positive, got {alpha!r}")
    if n < 1:
        raise InvalidArgument("n must be >= 1")
    m = np.arange(1, n + 1, dtype=float)
    return _ordered(_frac(np.sqrt(m * alpha)), {"generator": "sqrt_malpha", "alpha": alpha, "n": n})


def gen_iid_uniform(n: int, seed: int) -> OrderedPointArray:
    if n < 1:
        raise InvalidArgument("n must be >= 1")
    rng = np.random.default_rng(seed)
    return _ordered(rng.random(n), {"generator": "iid", "seed": seed, "n": n})


def rescale_by_density(points: OrderedPointArray, cdf: Callable[[np.ndarray], np.ndarray]) -> OrderedPointArray:
    """Map each point through an integrated density ``cdf`` to unfold it.

    ``cdf`` is applied elementwise; because the input is sorted, a strictly
    increasing ``cdf`` yields sorted output, and any decrease is reported.
    """
    out = np.asarray(cdf(points.points), dtype=float)
    if out.shape != points.points.shape:
        raise InvalidArgument("cdf must act elementwise")
    if np.any(np.diff(out) < 0):
        raise InvalidArgument("cdf is not monotone on the sample")
    if out.size and (out[0] < 0.0 or out[-1] >= 1.0):
        raise InvalidArgument("cdf must map [0,1) into [0,1)")
    meta = dict(points.meta, rescaled=getattr(cdf, "__name__", "cdf"))
    return OrderedPointArray(out, meta)
