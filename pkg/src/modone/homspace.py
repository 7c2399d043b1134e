"""The space of affine lattices and the counting function on it.

G is SL(2,R) x R^2 with the product ``(M, xi)(M', xi') = (M M', xi M' + xi')``
(row vectors). Gamma = SL(2,Z) x Z^2 acts on the left and

    F(M, xi) = #{m in Z^2 : m M + xi in supp(psi)}

is Gamma-invariant. Window counts of ``m*alpha`` and ``sqrt(m)`` mod 1 are
values of F along orbits of the diagonal flow; E(k, L) is the Haar
probability that F equals k, estimated here by Monte Carlo.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Literal

import numpy as np

from . import _lattice
from .errors import FlowRangeError, InvalidArgument, NumericFailure, ResourceLimit
from .localstats import CountDistribution

DEFAULT_BUDGET = 10**9
HAAR_BLOCK = 1 << 16
SQRT3_2 = math.sqrt(3.0) / 2.0


@dataclass(frozen=True, eq=False)
class GroupElement:
    M: np.ndarray
    xi: np.ndarray

    def __post_init__(self):
        M = np.array(self.M, dtype=float).reshape(2, 2)
        xi = np.array(self.xi, dtype=float).reshape(2)
        det = M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0]
        if not abs(det - 1.0) < 1e-12 * max(1.0, np.abs(M).max() ** 2):
            raise InvalidArgument(f"determinant {det!r} is not 1")
        M.setflags(write=False)
        xi.setflags(write=False)
        object.__setattr__(self, "M", M)
        object.__setattr__(self, "xi", xi)

    @classmethod
    def identity(cls) -> GroupElement:
        return cls(np.eye(2), np.zeros(2))

    def __mul__(self, other: GroupElement) -> GroupElement:
        return GroupElement(self.M @ other.M, self.xi @ other.M + other.xi)

    def inverse(self) -> GroupElement:
        (a, b), (c, d) = self.M
        Minv = np.array([[d, -b], [-c, a]])  # adjugate, det = 1
        return GroupElement(Minv, -self.xi @ Minv)

    def allclose(self, other: GroupElement, atol: float = 1e-10) -> bool:
        return np.allclose(self.M, other.M, rtol=0, atol=atol) and np.allclose(
            self.xi, other.xi, rtol=0, atol=atol
        )

    def __repr__(self):
        return f"GroupElement(M={self.M.tolist()}, xi={self.xi.tolist()})"


def group_op(a: GroupElement, b: GroupElement | None = None, mode: str = "multiply") -> GroupElement:
    if mode == "multiply":
        return a * b
    if mode == "inverse":
        return a.inverse()
    raise InvalidArgument(f"unknown mode {mode!r}")


# ------------------------------------------------------------- coordinates

def shear(u: float) -> np.ndarray:
    return np.array([[1.0, u], [0.0, 1.0]])


def rotation(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, s], [-s, c]])


@dataclass(frozen=True)
class IwasawaCoords:
    """``M = sign * shear(u) diag(v^1/2, v^-1/2) rotation(phi/2)``.

    ``phi`` lives in ``[0, 2pi)``, the range that matters once M and -M are
    identified; ``sign`` keeps the round trip exact.
    """

    u: float
    v: float
    phi: float
    sign: int = 1

    def matrix(self) -> np.ndarray:
        rv = math.sqrt(self.v)
        D = np.diag([rv, 1.0 / rv])
        return self.sign * (shear(self.u) @ D @ rotation(self.phi / 2))

    @property
    def tau(self) -> complex:
        return complex(self.u, self.v)


def iwasawa(M) -> IwasawaCoords:
    M = np.asarray(M, dtype=float)
    (a, b), (c, d) = M
    det = a * d - b * c
    if not abs(det - 1.0) < 1e-12 * max(1.0, np.abs(M).max() ** 2):
        raise NumericFailure(f"matrix is not in SL(2,R): det = {det!r}")
    r2 = c * c + d * d
    if not (r2 > 0 and math.isfinite(r2)):
        raise NumericFailure("degenerate bottom row")
    v = 1.0 / r2
    u = (a * c + b * d) / r2
    theta = math.atan2(-c, d)  # rotation angle phi/2 in (-pi, pi]
    phi = (2.0 * theta) % (4.0 * math.pi)
    sign = 1
    if phi >= 2.0 * math.pi:
        phi -= 2.0 * math.pi
        sign = -1
    return IwasawaCoords(u, v, phi, sign)


# -------------------------------------------------------- flow and orbits

def flow_element(t: float) -> GroupElement:
    if abs(t) / 2 > 700.0:
        raise FlowRangeError(f"flow time {t} overflows")
    return GroupElement(np.diag([math.exp(-t / 2), math.exp(t / 2)]), np.zeros(2))


def flow_translate(g: GroupElement, t: float) -> GroupElement:
    """Right translation ``g Phi^t``."""
    return g * flow_element(t)


def embed(kind: Literal["n_minus", "n_plus", "n_one"], *params: float) -> GroupElement:
    """One-parameter and two-parameter unipotent subgroups of G.

    ``n_minus(alpha, y)`` and ``n_plus(beta, x)`` are the unstable and stable
    horospherical pieces; ``n_one(x)`` is the orbit used for sqrt(m).
    """
    if kind == "n_minus":
        alpha, y = params
        return GroupElement(shear(alpha), (0.0, y))
    if kind == "n_plus":
        beta, x = params
        return GroupElement(np.array([[1.0, 0.0], [beta, 1.0]]), (x, 0.0))
    if kind == "n_one":
        (x,) = params
        return GroupElement(shear(2.0 * x), (x, x * x))
    raise InvalidArgument(f"unknown subgroup {kind!r}")


# ---------------------------------------------------------- test functions

@dataclass(frozen=True)
class TestFunction2D:
    """Indicator of a rectangle or triangle of area L in the plane.

    rectangle: ``0 < x <= 1`` and ``-L/2 <= y <= L/2``
    triangle:  ``0 < x <= 1`` and ``-L < y/x <= L``
    """

    __test__ = False  # not a pytest class

    kind: Literal["rectangle", "triangle"]
    L: float

    def __post_init__(self):
        if self.kind not in ("rectangle", "triangle"):
            raise InvalidArgument(f"unknown test function {self.kind!r}")
        if not self.L >= 0:
            raise InvalidArgument("L must be non-negative")

    @property
    def code(self) -> int:
        return _lattice.RECTANGLE if self.kind == "rectangle" else _lattice.TRIANGLE

    @property
    def vertices(self) -> np.ndarray:
        L = self.L
        if self.kind == "rectangle":
            return np.array([[0, -L / 2], [1, -L / 2], [1, L / 2], [0, L / 2]], dtype=float)
        return np.array([[0, 0], [1, -L], [1, L]], dtype=float)

    @property
    def area(self) -> float:
        return self.L

    def __call__(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        inx = (x > 0) & (x <= 1)
        if self.kind == "rectangle":
            return inx & (y >= -self.L / 2) & (y <= self.L / 2)
        with np.errstate(divide="ignore", invalid="ignore"):
            r = y / x
        return inx & (r > -self.L) & (r <= self.L)


def f_count(g: GroupElement, psi: TestFunction2D, budget: int = DEFAULT_BUDGET) -> int:
    (m00, m01), (m10, m11) = g.M
    c = _lattice.count_points(m00, m01, m10, m11, g.xi[0], g.xi[1], psi.code, float(psi.L), budget)
    if c < 0:
        raise ResourceLimit(f"lattice enumeration needs more than {budget} cells")
    return int(c)


def f_count_batch(mats: np.ndarray, xis: np.ndarray, psi: TestFunction2D, budget: int = DEFAULT_BUDGET) -> np.ndarray:
    counts = _lattice.count_points_batch(
        np.ascontiguousarray(mats, dtype=float), np.ascontiguousarray(xis, dtype=float),
        psi.code, float(psi.L), budget,
    )
    if counts.size and counts.min() < 0:
        raise ResourceLimit(f"lattice enumeration needs more than {budget} cells")
    return counts


# ------------------------------------------------------------------- Gamma

_S = np.array([[0, -1], [1, 0]], dtype=np.int64)
_T = np.array([[1, 1], [0, 1]], dtype=np.int64)


def gamma_element(seed: int, word_length: int, shift: tuple[int, int] | None = None) -> GroupElement:
    """Random element of Gamma: a word in S, T and an integer translation."""
    if word_length < 0:
        raise InvalidArgument("word_length must be >= 0")
    rng = np.random.default_rng(seed)
    gamma = np.eye(2, dtype=np.int64)
    for letter in rng.integers(0, 2, size=word_length):
        gamma = gamma @ (_S if letter == 0 else _T)
    n = np.array(shift if shift is not None else rng.integers(-5, 6, size=2))
    return GroupElement(gamma.astype(float), n.astype(float))


# -------------------------------------------------------------- Haar measure

@dataclass(frozen=True)
class HaarSample:
    g: GroupElement
    u: float
    v: float
    phi: float
    x: float
    y: float


def _coords_to_group(u, v, phi, x, y):
    """Vectorised ``(1, (x, y)) (M(u, v, phi), 0)``; returns (mats, xis)."""
    rv = np.sqrt(v)
    c = np.cos(phi / 2)
    s = np.sin(phi / 2)
    mats = np.empty(np.shape(u) + (2, 2))
    mats[..., 0, 0] = rv * c - u / rv * s
    mats[..., 0, 1] = rv * s + u / rv * c
    mats[..., 1, 0] = -s / rv
    mats[..., 1, 1] = c / rv
    xis = np.empty(np.shape(u) + (2,))
    xis[..., 0] = x * mats[..., 0, 0] + y * mats[..., 1, 0]
    xis[..., 1] = x * mats[..., 0, 1] + y * mats[..., 1, 1]
    return mats, xis


def haar_coords(rng: np.random.Generator, size: int) -> tuple[np.ndarray, ...]:
    """Draw (u, v, phi, x, y) from the normalised Haar measure on Gamma\\G.

    (u, v) is uniform for ``du dv / v^2`` on the Siegel strip
    ``|u| <= 1/2, v >= sqrt(3)/2`` and rejected outside the unit circle.
    Returns the accepted coordinates and the number of proposals used.
    """
    us, vs = [], []
    have = 0
    proposed = 0
    while have < size:
        want = size - have
        batch = int(want * 1.11) + 16
        u = rng.random(batch) - 0.5
        v = SQRT3_2 / (1.0 - rng.random(batch))
        proposed += batch
        ok = u * u + v * v >= 1.0
        # keep exactly the first `want` acceptances so draws are reproducible
        idx = np.flatnonzero(ok)[:want]
        if idx.size == want:
            proposed -= batch - (idx[-1] + 1)
        us.append(u[idx])
        vs.append(v[idx])
        have += idx.size
    u = np.concatenate(us)
    v = np.concatenate(vs)
    phi = 2.0 * np.pi * rng.random(size)
    x = rng.random(size)
    y = rng.random(size)
    return u, v, phi, x, y, proposed


def haar_sample(seed: int) -> HaarSample:
    rng = np.random.default_rng(seed)
    u, v, phi, x, y, _ = haar_coords(rng, 1)
    mats, xis = _coords_to_group(u, v, phi, x, y)
    return HaarSample(GroupElement(mats[0], xis[0]), float(u[0]), float(v[0]), float(phi[0]), float(x[0]), float(y[0]))


def _block_counts(seed, block, size, psi, budget):
    rng = np.random.default_rng(np.random.SeedSequence([seed, block]))
    u, v, phi, x, y, _ = haar_coords(rng, size)
    mats, xis = _coords_to_group(u, v, phi, x, y)
    return f_count_batch(mats, xis, psi, budget)


def haar_counts(psi: TestFunction2D, samples: int, seed: int, workers: int | None = None, budget: int = DEFAULT_BUDGET) -> np.ndarray:
    """F evaluated on ``samples`` Haar draws.

    Draws come in fixed blocks seeded by ``(seed, block index)``, so the
    result does not depend on how many workers process them.
    """
    if samples < 1:
        raise InvalidArgument("samples must be >= 1")
    sizes = [min(HAAR_BLOCK, samples - b * HAAR_BLOCK) for b in range(-(-samples // HAAR_BLOCK))]
    jobs = [(seed, b, s, psi, budget) for b, s in enumerate(sizes)]
    if workers and workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(lambda a: _block_counts(*a), jobs))
    else:
        parts = [_block_counts(*a) for a in jobs]
    return np.concatenate(parts)


def ekl_oracle(psi: TestFunction2D, k_max: int, samples: int, seed: int, workers: int | None = None) -> CountDistribution:
    """Monte-Carlo E(k, L) = Haar probability that F = k.

    ``masses`` covers every observed k (so it sums to one); ``stderr`` holds
    the binomial standard error of each mass. ``meta['mean_stderr']`` is
    the standard error of the sample mean of F.
    """
    counts = haar_counts(psi, samples, seed, workers)
    size = max(k_max + 1, int(counts.max()) + 1)
    masses = np.bincount(counts, minlength=size) / samples
    stderr = np.sqrt(masses * (1.0 - masses) / samples)
    meta = {
        "method": "haar-monte-carlo",
        "psi": psi.kind,
        "samples": samples,
        "seed": seed,
        "k_max": k_max,
        "sample_mean": float(counts.mean()),
        "mean_stderr": float(counts.std(ddof=1) / math.sqrt(samples)) if samples > 1 else math.inf,
    }
    return CountDistribution(masses, psi.L, stderr, meta)


# ----------------------------------------------------------- orbit counts

def malpha_orbit_point(alpha: float, x0: float, n: int) -> GroupElement:
    """``n_minus(alpha, -x0) Phi^(2 log n)`` written out with exact 1/n, n."""
    M = np.array([[1.0 / n, alpha * n], [0.0, float(n)]])
    return GroupElement(M, (0.0, -x0 * n))


def sqrt_orbit_point(x0: float, n: int) -> GroupElement:
    """``n_one(x0) Phi^(log n)`` written out entrywise."""
    r = math.sqrt(n)
    M = np.array([[1.0 / r, 2.0 * x0 * r], [0.0, r]])
    return GroupElement(M, (x0 / r, r * x0 * x0))


def orbit_count(kind: Literal["malpha", "sqrt"], alpha: float, x0: float, n: int, L: float, budget: int = DEFAULT_BUDGET) -> int:
    """Window count of the sequence read off as F at a point of a flow orbit."""
    if n < 1:
        raise InvalidArgument("n must be >= 1")
    if kind == "malpha":
        return f_count(malpha_orbit_point(alpha, x0, n), TestFunction2D("rectangle", L), budget)
    if kind == "sqrt":
        if alpha != 1:
            raise InvalidArgument("the sqrt orbit is only set up for alpha = 1")
        return f_count(sqrt_orbit_point(x0, n), TestFunction2D("triangle", L), budget)
    raise InvalidArgument(f"unknown orbit kind {kind!r}")


def s_tilde_direct(alpha: float, x0: float, n: int, L: float, eps: float = 0.0, delta: float = 0.0) -> int:
    """Direct evaluation of the smoothed-boundary count for sqrt(m*alpha).

    Sums the indicator product over the integer pairs (j, k) for which

        (x0 - j) / sqrt(n alpha)           lies in (-eps, 1 + eps]
        (sqrt(n)(k alpha - (x0 - j)^2) + delta) / ((x0 - j)/sqrt(n))  in [-L, L)

    enumerating j over the first window and, for each j, the handful of k
    allowed by the second.
    """
    if not alpha > 0:
        raise InvalidArgument("alpha must be positive")
    if L <= 0:
        return 0
    rn = math.sqrt(n)
    scale = math.sqrt(n * alpha)
    j = np.arange(math.floor(x0 - (1 + eps) * scale) - 1, math.ceil(x0 + eps * scale) + 2)
    r = x0 - j
    t = r / scale
    j, r = j[(t > -eps) & (t <= 1 + eps) & (r != 0)], r[(t > -eps) & (t <= 1 + eps) & (r != 0)]
    if j.size == 0:
        return 0
    centre = (r * r - delta / rn) / alpha
    half = L * np.abs(r) / (n * alpha)
    k_lo = np.floor(centre - half).astype(np.int64) - 1
    k_hi = np.ceil(centre + half).astype(np.int64) + 1
    width = k_hi - k_lo + 1
    rr = np.repeat(r, width)
    k = np.repeat(k_lo, width) + (np.arange(width.sum()) - np.repeat(np.cumsum(width) - width, width))
    ratio = (rn * (k * alpha - rr * rr) + delta) / (rr / rn)
    return int(np.count_nonzero((ratio >= -L) & (ratio < L)))
