"""Continued fractions, diophantine type, three gaps and singular averages."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import InvalidArgument, SingularInput
from .localstats import gap_statistics
from .seqgen import gen_malpha


def continued_fraction(alpha: float, depth: int) -> list[int]:
    """Leading partial quotients of ``alpha`` from the Gauss map.

    Stops early once the remainder drops below 1e-12, which is how a
    (near-)rational input shows up in double precision.
    """
    if depth < 1:
        raise InvalidArgument("depth must be >= 1")
    a0 = math.floor(alpha)
    quotients = [int(a0)]
    x = alpha - a0
    while len(quotients) < depth and x >= 1e-12:
        x = 1.0 / x
        a = math.floor(x)
        quotients.append(int(a))
        x -= a
    return quotients


def dist_to_int(x):
    x = np.asarray(x, dtype=float)
    return np.abs(x - np.rint(x))


def _q_alpha_norms(alpha: float, q_max: int) -> np.ndarray:
    frac = alpha - math.floor(alpha)
    return dist_to_int(np.arange(1, q_max + 1, dtype=float) * frac)


@dataclass(frozen=True)
class DiophantineProfile:
    """Finite-range estimate of the type of ``alpha``.

    ``kappa_estimate`` is a lower-bound style estimate, never a certificate.
    ``records`` are the denominators q at which ``||q alpha||`` reaches a new
    minimum; ``stable`` is False when there are too few of them, or the fit
    over the upper half of the range disagrees with the full fit.
    """

    alpha: float
    partial_quotients: list[int]
    kappa_estimate: float
    c_estimate: float
    q_max: int
    records: list[int] = field(default_factory=list)
    kappa_sup: float = 2.0
    stable: bool = True

    def to_dict(self) -> dict:
        return asdict(self)


def _slope_kappa(q: np.ndarray, d: np.ndarray) -> float:
    if q.size < 2:
        return math.inf if q.size and d[-1] == 0 else 2.0
    slope = np.polyfit(np.log(q), np.log(d), 1)[0]
    return max(2.0, 1.0 - float(slope))


def dioph_type_estimate(alpha: float, q_max: int = 100_000) -> DiophantineProfile:
    """Estimate kappa with ``||q alpha|| ~ q^{1-kappa}`` along record q.

    The exponent is the least-squares slope of ``log ||q alpha||`` against
    ``log q`` over the best-approximation denominators up to ``q_max``;
    ``c_estimate = min_q q^{kappa-1} ||q alpha||`` for that kappa. A rational
    alpha with denominator in range gets ``kappa = inf`` and ``c = 0``.
    """
    if q_max < 2:
        raise InvalidArgument("q_max must be >= 2")
    d = _q_alpha_norms(alpha, q_max)
    q = np.arange(1, q_max + 1, dtype=float)
    running = np.minimum.accumulate(d)
    is_record = np.empty(q_max, dtype=bool)
    is_record[0] = True
    is_record[1:] = d[1:] < running[:-1]
    rq, rd = q[is_record], d[is_record]
    cf = continued_fraction(alpha, 20)

    if rd[-1] == 0.0:
        return DiophantineProfile(alpha, cf, math.inf, 0.0, q_max, rq.astype(int).tolist(),
                                  math.inf, False)

    kappa = _slope_kappa(rq, rd)
    c = float(np.min(q ** (kappa - 1.0) * d))
    big = rq >= 2
    kappa_sup = max(2.0, float(np.max(1.0 + np.log(1.0 / rd[big]) / np.log(rq[big])))) if big.any() else 2.0
    upper = rq >= math.sqrt(q_max)
    stable = rq.size >= 4 and upper.sum() >= 2 and abs(_slope_kappa(rq[upper], rd[upper]) - kappa) < 0.25
    return DiophantineProfile(alpha, cf, kappa, c, q_max, rq.astype(int).tolist(), kappa_sup, bool(stable))


def three_gap_check(alpha: float, n: int, tol: float = 1e-9) -> list[float]:
    """Distinct circular gaps of ``{m alpha}``, m <= n, in mean-spacing units.

    Sorted gaps are split wherever consecutive values differ by more than
    ``tol``; each group is represented by its mean.
    """
    if n < 2:
        raise InvalidArgument("n must be >= 2")
    gaps = np.sort(gap_statistics(gen_malpha(alpha, n), "circular").gaps)
    cuts = np.flatnonzero(np.diff(gaps) > tol) + 1
    return [float(g.mean()) for g in np.split(gaps, cuts)]


# ------------------------------------------------------- counting lemma

@dataclass(frozen=True)
class CountingReport:
    count: int
    bound: float
    regime: str
    satisfied: bool


def count_hits(alpha: float, n: int, x0: float, ell: float) -> int:
    """``#{m <= n : m alpha in [x0, x0 + ell] + Z}``."""
    if ell >= 1.0:
        return n
    frac = alpha - math.floor(alpha)
    offs = np.mod(np.arange(1, n + 1, dtype=float) * frac - x0, 1.0)
    return int(np.count_nonzero(offs <= ell))


def counting_bound_check(profile: DiophantineProfile, n: int, x0: float, ell: float, B: float = 4.0) -> CountingReport:
    """Check the small-interval counting bound for ``{m alpha}``.

    When ``n^{kappa-1} ell < c`` the window is shorter than every gap, so it
    holds at most one point; otherwise the count must not exceed
    ``B n ell^{1/(kappa-1)}``.
    """
    if profile.q_max < n:
        raise InvalidArgument("profile must cover q_max >= n")
    if not ell > 0:
        raise InvalidArgument("ell must be positive")
    k = profile.kappa_estimate
    count = count_hits(profile.alpha, n, x0, ell)
    if n ** (k - 1.0) * ell < profile.c_estimate:
        return CountingReport(count, 1.0, "below-gap", count <= 1)
    bound = B * n * ell ** (1.0 / (k - 1.0))
    return CountingReport(count, bound, "scaling", count <= bound)


@dataclass(frozen=True)
class CountingSweep:
    reports: list[CountingReport]
    max_ratio: float

    @property
    def satisfied(self) -> bool:
        return all(r.satisfied for r in self.reports)


def counting_sweep(
    profile: DiophantineProfile,
    n: int,
    samples: int,
    seed: int,
    B: float = 4.0,
    ell_range: tuple[float, float] = (1e-10, 1.0),
) -> CountingSweep:
    """Counting bound over random centres and log-uniform lengths.

    ``max_ratio`` is the largest ``count / (n ell^{1/(kappa-1)})`` seen in the
    scaling regime, i.e. the smallest B that would have passed.
    """
    rng = np.random.default_rng(seed)
    x0 = rng.random(samples)
    ell = np.exp(rng.uniform(math.log(ell_range[0]), math.log(ell_range[1]), samples))
    reports = [counting_bound_check(profile, n, float(a), float(b), B) for a, b in zip(x0, ell)]
    k = profile.kappa_estimate
    ratios = [r.count / (n * b ** (1.0 / (k - 1.0))) for r, b in zip(reports, ell) if r.regime == "scaling"]
    return CountingSweep(reports, max(ratios, default=0.0))


def singular_average(alpha: float, beta: float, n: int, profile: DiophantineProfile | None = None) -> float:
    """``(1/n) sum_{m<=n} ||m alpha||^{-beta}``.

    For ``beta < 1/(kappa-1)`` this tends to ``2^beta / (1 - beta)``.
    """
    kappa = profile.kappa_estimate if profile is not None else 2.0
    if not 0 <= beta < 1.0 / (kappa - 1.0):
        raise InvalidArgument(f"need 0 <= beta < 1/(kappa-1) = {1.0 / (kappa - 1.0):.6g}")
    if n < 1:
        raise InvalidArgument("n must be >= 1")
    total = 0.0
    frac = alpha - math.floor(alpha)
    for start in range(1, n + 1, 1 << 20):
        m = np.arange(start, min(start + (1 << 20), n + 1), dtype=float)
        d = dist_to_int(m * frac)
        if np.any(d == 0.0):
            raise SingularInput(f"||m alpha|| = 0 at m = {int(m[np.argmax(d == 0.0)])}")
        total += float(np.sum(d ** -beta))
    return total / n


def singular_limit(beta: float) -> float:
    return 2.0**beta / (1.0 - beta)
