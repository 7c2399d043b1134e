"""Independent random points: Poisson law, CLT regime and the X-model.

The X-model is the independence heuristic for ``sqrt(m alpha)``: it keeps
the window probabilities ``2 L m / M^2`` of the individual terms but drops
all correlations between them.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import stats
from scipy.special import gammaln

from .errors import InvalidArgument
from .localstats import CountDistribution, number_variance, window_counts
from .seqgen import gen_iid_uniform


def poisson_pmf(k: int, L: float) -> float:
    """``L^k e^{-L} / k!``, evaluated in log space."""
    if k < 0 or int(k) != k:
        raise InvalidArgument("k must be a non-negative integer")
    if L < 0:
        raise InvalidArgument("L must be non-negative")
    if L == 0:
        return 1.0 if k == 0 else 0.0
    return math.exp(k * math.log(L) - L - gammaln(k + 1))


def poisson_masses(L: float, k_max: int) -> np.ndarray:
    return np.array([poisson_pmf(k, L) for k in range(k_max + 1)])


def total_variation(p, q) -> float:
    """Half the l1 distance, padding the shorter pmf with zeros."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    size = max(p.size, q.size)
    p = np.pad(p, (0, size - p.size))
    q = np.pad(q, (0, size - q.size))
    return 0.5 * float(np.abs(p - q).sum())


# ---------------------------------------------------------------- CLT regime

@dataclass(frozen=True)
class CLTResult:
    ks: float
    pvalue: float
    sample: np.ndarray
    L: float


def sqrt_rule(n: int) -> float:
    return math.sqrt(n)


def clt_statistic(
    n: int,
    L_of_n: Callable[[int], float] | float = sqrt_rule,
    trials: int = 10_000,
    seed: int = 0,
) -> CLTResult:
    """KS distance of ``(S_N - L) / sqrt(Sigma^2_N(L))`` to the standard normal.

    Every trial draws a fresh i.i.d. array and one uniform centre; the
    variance of each array comes from the pair-correlation identity.
    """
    if trials < 1:
        raise InvalidArgument("trials must be >= 1")
    if n < 1:
        raise InvalidArgument("n must be >= 1")
    L = float(L_of_n(n)) if callable(L_of_n) else float(L_of_n)
    if not 0 < L <= n / 2:
        raise InvalidArgument("need 0 < L <= n/2")
    z = np.empty(trials)
    for t in range(trials):
        ss = np.random.SeedSequence([seed, t])
        arr_seed, x_seed = ss.generate_state(2)
        pts = gen_iid_uniform(n, int(arr_seed))
        var = number_variance(pts, L, method="identity").value
        x0 = np.random.default_rng(int(x_seed)).random()
        count = window_counts(pts, x0, L)
        z[t] = (count - L) / math.sqrt(var) if var > 0 else 0.0
    res = stats.kstest(z, "norm")
    return CLTResult(float(res.statistic), float(res.pvalue), z, L)


# ------------------------------------------------------------------ X-model

def _check_x_model(M: int, L: float):
    if M < 1:
        raise InvalidArgument("M must be >= 1")
    if L < 0:
        raise InvalidArgument("L must be non-negative")
    if 2 * L / M > 1:
        raise InvalidArgument("2L/M > 1: window probabilities exceed one")


def x_model_pmf(M: int, L: float, k_max: int = 30) -> np.ndarray:
    """Exact law of ``X`` (a Poisson-binomial) truncated after ``k_max``."""
    _check_x_model(M, L)
    p = 2.0 * L * np.arange(1, M + 1) / M**2
    pmf = np.zeros(k_max + 1)
    pmf[0] = 1.0
    for pm in p:
        pmf[1:] = pmf[1:] * (1.0 - pm) + pmf[:-1] * pm
        pmf[0] *= 1.0 - pm
    return pmf


def _x_model_block(rng: np.random.Generator, M: int, L: float, trials: int) -> np.ndarray:
    # Thinning: m is a candidate with probability q = 2L/M and a candidate is
    # kept with probability m/M, so P(X_m = 1) = 2Lm/M^2 as required. Given
    # its size K, the candidate set is a uniform K-subset of 1..M: positions
    # are drawn uniformly and repeated entries are redrawn until all differ.
    # The procedure is symmetric in the labels, so the final set is uniform.
    q = 2.0 * L / M
    k = rng.binomial(M, q, size=trials)
    owner = np.repeat(np.arange(trials), k)
    pos = rng.integers(1, M + 1, size=owner.size)
    while True:
        order = np.lexsort((pos, owner))
        same = (np.diff(owner[order]) == 0) & (np.diff(pos[order]) == 0)
        if not same.any():
            break
        dup = order[1:][same]
        pos[dup] = rng.integers(1, M + 1, size=dup.size)
    kept = rng.random(owner.size) * M < pos
    return np.bincount(owner, weights=kept, minlength=trials).astype(np.int64)


def heuristic_x_model(M: int, L: float, trials: int, seed: int = 0, block: int = 1 << 18) -> CountDistribution:
    """Empirical pmf of ``X = sum_m X_m`` with independent ``X_m``.

    ``X_m`` is the indicator of ``|eta_m| <= L m / M^2`` for ``eta_m`` uniform
    on ``[-1/2, 1/2)``. Blocks of trials use seeds derived from
    ``(seed, block index)``, so the result does not depend on scheduling.
    """
    _check_x_model(M, L)
    if trials < 1:
        raise InvalidArgument("trials must be >= 1")
    hist = np.zeros(1, dtype=np.int64)
    for b, start in enumerate(range(0, trials, block)):
        rng = np.random.default_rng(np.random.SeedSequence([seed, b]))
        x = _x_model_block(rng, M, L, min(block, trials - start))
        counts = np.bincount(x)
        if counts.size > hist.size:
            hist = np.pad(hist, (0, counts.size - hist.size))
        hist[: counts.size] += counts
    masses = hist / trials
    stderr = np.sqrt(masses * (1.0 - masses) / trials)
    values = np.arange(hist.size)
    mean_err = math.sqrt(float(np.dot((values - np.dot(values, masses)) ** 2, masses)) / trials)
    return CountDistribution(
        masses, L * (M + 1) / M, stderr,
        meta={"method": "x-model", "M": M, "trials": trials, "seed": seed, "mean_stderr": mean_err},
    )


def tv_stderr(dist: CountDistribution) -> float:
    """Scale of the Monte-Carlo noise in a total-variation distance."""
    if dist.stderr is None:
        return 0.0
    return 0.5 * float(dist.stderr.sum())
