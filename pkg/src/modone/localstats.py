"""Local statistics of a point set on the circle.

Window counts, the exact count distribution E_N(k, L) over a uniformly
random window centre, gap statistics, pair correlation (direct and through
exponential sums) and the number variance.

Windows are half-open, ``[x0 - ell/2, x0 + ell/2)`` taken mod 1, with
``ell = L / n``. ``closed=True`` switches to ``[x0 - ell/2, x0 + ell/2]``,
the convention used by the lattice-counting side in :mod:`modone.homspace`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from ._lattice import pair_window_sum
from .errors import InvalidArgument
from .seqgen import OrderedPointArray

GapConvention = Literal["circular", "open-chain"]


@dataclass(frozen=True)
class Window:
    x0: float
    L: float
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise InvalidArgument("n must be >= 1")
        if not self.L >= 0:
            raise InvalidArgument("L must be non-negative")
        if self.ell > 1.0:
            raise InvalidArgument(f"window length {self.ell} exceeds the circle")

    @property
    def ell(self) -> float:
        return self.L / self.n


@dataclass
class CountDistribution:
    """Probability masses ``masses[k]`` of finding k points in a window.

    ``stderr`` is filled in by Monte-Carlo producers and is ``None`` for
    exact ones. ``mean_L`` is the nominal mean (the scaled length L).
    """

    masses: np.ndarray
    mean_L: float
    stderr: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    def mass(self, k: int) -> float:
        return float(self.masses[k]) if 0 <= k < self.masses.size else 0.0

    def err(self, k: int) -> float:
        if self.stderr is None:
            return 0.0
        return float(self.stderr[k]) if 0 <= k < self.stderr.size else 0.0

    @property
    def total(self) -> float:
        return float(self.masses.sum())

    @property
    def mean(self) -> float:
        return float(np.dot(np.arange(self.masses.size), self.masses))

    @property
    def variance(self) -> float:
        k = np.arange(self.masses.size)
        return float(np.dot((k - self.mean) ** 2, self.masses))


@dataclass(frozen=True)
class GapStatistics:
    gaps: np.ndarray
    convention: GapConvention
    n: int


@dataclass(frozen=True)
class Histogram:
    bin_width: float
    num_bins: int
    masses: np.ndarray
    outliers: np.ndarray
    total: int

    @property
    def edges(self) -> np.ndarray:
        return self.bin_width * np.arange(self.num_bins + 1)

    @property
    def outlier_mass(self) -> float:
        return self.outliers.size / self.total

    def exponential_reference(self) -> np.ndarray:
        """Mass of the unit exponential law in each bin."""
        e = self.edges
        return np.exp(-e[:-1]) - np.exp(-e[1:])


@dataclass(frozen=True)
class Estimate:
    value: float
    stderr: float = 0.0


# ---------------------------------------------------------------- counting

def _window_bounds(x0, ell):
    lo = np.mod(np.asarray(x0, dtype=float) - 0.5 * ell, 1.0)
    return np.where(lo >= 1.0, 0.0, lo)


def window_counts(points: OrderedPointArray, x0, L: float, closed: bool = False) -> np.ndarray:
    """Vectorised :func:`count_in_window` over an array of centres."""
    pts = points.points
    n = points.n
    ell = L / n
    if ell > 1.0:
        raise InvalidArgument("window longer than the circle")
    lo = _window_bounds(x0, ell)
    hi = lo + ell
    right = "right" if closed else "left"
    start = np.searchsorted(pts, lo, side="left")
    inner = np.searchsorted(pts, hi, side=right)
    wrapped = np.searchsorted(pts, hi - 1.0, side=right)
    counts = np.where(hi < 1.0, inner - start, (n - start) + wrapped)
    return counts.astype(np.int64)


def count_in_window(points: OrderedPointArray, w: Window, closed: bool = False) -> int:
    """Number of points in the window ``w`` (see module docstring for ends)."""
    if w.n != points.n:
        raise InvalidArgument("window was built for a different n")
    return int(window_counts(points, w.x0, w.L, closed=closed))


def count_distribution_exact(points: OrderedPointArray, L: float) -> CountDistribution:
    """Exact E_N(k, L): Lebesgue measure of centres whose window holds k points.

    Circular sweep over the 2N positions ``xi_j -/+ ell/2`` where a point enters
    or leaves the window. The count just after x0 = 0 is recovered from the
    requirement that the mean count is exactly L, which keeps the sweep free of
    float-sensitive initialisation.
    """
    n = points.n
    ell = L / n
    if ell > 1.0 or L < 0:
        raise InvalidArgument("need 0 <= L/n <= 1")
    if L == 0:
        return CountDistribution(np.array([1.0]), 0.0, meta={"method": "sweep"})
    pts = points.points
    enter = np.mod(pts - 0.5 * ell, 1.0)
    leave = np.mod(pts + 0.5 * ell, 1.0)
    pos = np.concatenate([enter, leave])
    pos[pos >= 1.0] = 0.0
    delta = np.concatenate([np.ones(n, np.int64), -np.ones(n, np.int64)])
    order = np.lexsort((delta, pos))  # ties: leave before enter
    pos = pos[order]
    run = np.cumsum(delta[order])
    lengths = np.diff(np.append(pos, pos[0] + 1.0))
    base = round(L - float(np.dot(run, lengths)))
    counts = run + base
    if counts.min() < 0:
        raise AssertionError("sweep produced a negative count")
    masses = np.bincount(counts, weights=lengths)
    masses = masses / masses.sum()
    return CountDistribution(masses, L, meta={"method": "sweep", "n": n})


# -------------------------------------------------------------------- gaps

def gap_statistics(points: OrderedPointArray, convention: GapConvention = "circular") -> GapStatistics:
    """Consecutive spacings in units of the mean spacing 1/N.

    ``circular`` gives N gaps including the wrap-around one; ``open-chain``
    gives the N-1 interior gaps (still scaled by N).
    """
    n = points.n
    if n < 2:
        raise InvalidArgument("need at least two points for gaps")
    pts = points.points
    if convention == "circular":
        gaps = n * np.diff(np.append(pts, pts[0] + 1.0))
    elif convention == "open-chain":
        gaps = n * np.diff(pts)
    else:
        raise InvalidArgument(f"unknown gap convention {convention!r}")
    return GapStatistics(gaps, convention, n)


def gap_histogram(gaps: GapStatistics | np.ndarray, bin_width: float, num_bins: int) -> Histogram:
    """Normalised histogram on ``[0, num_bins*bin_width)`` plus sorted outliers."""
    if bin_width <= 0 or num_bins < 1:
        raise InvalidArgument("need bin_width > 0 and num_bins >= 1")
    values = np.asarray(gaps.gaps if isinstance(gaps, GapStatistics) else gaps, dtype=float)
    edges = bin_width * np.arange(num_bins + 1)
    inside = values < edges[-1]
    idx = np.searchsorted(edges, values[inside], side="right") - 1
    counts = np.bincount(idx, minlength=num_bins)
    total = values.size
    return Histogram(bin_width, num_bins, counts / total, np.sort(values[~inside]), total)


def ep_zero_gap_transform(gaps: GapStatistics, L: float) -> float:
    """``1 - mean(min(s_j, L))`` over circular gaps; equals E_N(0, L)."""
    if gaps.convention != "circular":
        raise InvalidArgument("the gap transform needs circular gaps")
    return 1.0 - float(np.minimum(gaps.gaps, L).sum()) / gaps.n


# -------------------------------------------------------- pair correlation

@dataclass(frozen=True)
class Window1D:
    """Even test function on the line used in the pair correlation."""

    kind: Literal["triangle", "box"]

    @property
    def radius(self) -> float:
        return 1.0 if self.kind == "triangle" else 0.5

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == "triangle":
            return np.maximum(1.0 - np.abs(x), 0.0)
        return ((x >= -0.5) & (x < 0.5)).astype(float)

    def hat(self, y):
        """Fourier transform; ``sinc`` here is numpy's normalised sinc."""
        y = np.asarray(y, dtype=float)
        if self.kind == "triangle":
            return np.sinc(y) ** 2
        return np.sinc(y)

    def periodised_hat_sum(self, step: float) -> float:
        """``sum_n hat(step*n)`` over all integers, via Poisson summation."""
        if self.kind != "triangle":
            raise InvalidArgument("closed-form tail only for the triangle")
        m = np.arange(-math.floor(step), math.floor(step) + 1)
        return float(self(m / step).sum()) / step


TRIANGLE = Window1D("triangle")
BOX = Window1D("box")


def _psi(psi) -> Window1D:
    if isinstance(psi, Window1D):
        return psi
    return Window1D(psi)


def close_pairs(points: OrderedPointArray, reach: float) -> np.ndarray:
    """Forward circular differences ``0 <= d < reach`` over unordered pairs.

    Scans the doubled array ``[xi, xi + 1]``; each index i is paired with the
    following indices j (i < j < i + N) whose lift lies within ``reach``.
    """
    pts = points.points
    n = points.n
    ext = np.concatenate([pts, pts + 1.0])
    stop = np.searchsorted(ext, pts + reach, side="left")
    stop = np.minimum(stop, np.arange(n) + n)
    k = stop - np.arange(n) - 1
    k = np.maximum(k, 0)
    if k.sum() == 0:
        return np.empty(0)
    i = np.repeat(np.arange(n), k)
    offs = np.arange(k.sum()) - np.repeat(np.cumsum(k) - k, k)
    j = i + 1 + offs
    return ext[j] - pts[i]


def pair_correlation_direct(points: OrderedPointArray, L: float, psi="triangle") -> float:
    """``(1/N) sum_{i != j} sum_m psi((xi_i - xi_j + m)/ell)``."""
    psi = _psi(psi)
    n = points.n
    ell = L / n
    if L <= 0:
        raise InvalidArgument("L must be positive")
    if ell * psi.radius > 0.5:
        raise InvalidArgument("window too wide: pair differences wrap ambiguously")
    kind = 0 if psi.kind == "triangle" else 1
    return pair_window_sum(points.points, ell, kind) / n


@dataclass(frozen=True)
class FourierPairCorrelation:
    value: float
    bound: float
    n_max: int


def exponential_sums(points: OrderedPointArray, n_max: int, chunk: int = 2048) -> np.ndarray:
    """``|sum_j e(n xi_j)|^2`` for n = 1..n_max."""
    pts = points.points
    out = np.empty(n_max)
    for start in range(1, n_max + 1, chunk):
        ns = np.arange(start, min(start + chunk, n_max + 1))
        ph = np.exp(2j * np.pi * np.outer(ns, pts))
        out[ns - 1] = np.abs(ph.sum(axis=1)) ** 2
    return out


def pair_correlation_fourier(points: OrderedPointArray, L: float, psi="triangle", n_max: int = 4096) -> FourierPairCorrelation:
    """Pair correlation through exponential sums, truncated at ``|n| <= n_max``.

    The truncation bound uses ``0 <= |S_n|^2 <= N^2`` together with the exact
    tail of ``sum_n hat(L n / N)``, which Poisson summation gives in closed
    form for the triangle.
    """
    psi = _psi(psi)
    if n_max < 1:
        raise InvalidArgument("n_max must be >= 1")
    n = points.n
    ns = np.arange(1, n_max + 1)
    h = psi.hat(L * ns / n)
    s2 = exponential_sums(points, n_max)
    head = psi.hat(0.0) * (n * n - n) + 2.0 * float(np.dot(h, s2 - n))
    value = L / n**2 * head
    tail = psi.periodised_hat_sum(L / n) - float(psi.hat(0.0)) - 2.0 * float(h.sum())
    tail = max(tail, 0.0)
    bound = L / n**2 * (n * n - n) * tail + 1e-12 * max(1.0, abs(value))
    return FourierPairCorrelation(value, bound, n_max)


# --------------------------------------------------------- number variance

def number_variance(
    points: OrderedPointArray,
    L: float,
    method: Literal["identity", "monte-carlo", "sweep"] = "identity",
    samples: int = 100_000,
    seed: int = 0,
) -> Estimate:
    """Variance of the window count over a uniform centre.

    ``identity`` uses ``L - L^2 + L * R2(L, triangle)``; ``monte-carlo``
    averages ``(S_N - L)^2`` over random centres and reports its standard
    error; ``sweep`` reads the variance off the exact count distribution.
    """
    if method == "identity":
        return Estimate(L - L * L + L * pair_correlation_direct(points, L, TRIANGLE))
    if method == "sweep":
        dist = count_distribution_exact(points, L)
        k = np.arange(dist.masses.size)
        return Estimate(float(np.dot((k - L) ** 2, dist.masses)))
    if method == "monte-carlo":
        rng = np.random.default_rng(seed)
        dev = (window_counts(points, rng.random(samples), L) - L) ** 2
        return Estimate(float(dev.mean()), float(dev.std(ddof=1) / math.sqrt(samples)))
    raise InvalidArgument(f"unknown method {method!r}")
