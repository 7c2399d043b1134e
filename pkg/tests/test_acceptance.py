"""Acceptance gate: thirteen end-to-end checks at their stated tolerances.

Each test prints one PASS/FAIL line; the lines are repeated in the pytest
terminal summary. Run standalone with ``pytest tests/test_acceptance.py -v``.
"""
import math
import time
from fractions import Fraction

import numpy as np
import pytest
from scipy import integrate, stats

from modone import dioph, homspace, localstats, randmodel, seqgen
from modone.experiments import compare_distributions, ekl_sqrt, empirical_distribution, malpha_counts
from modone.worksheet import PAPER_OUTLIERS, repro_maple, worksheet_gaps

from conftest import GOLDEN, SQRT2, record

L_VALUES = (0.5, 1.0, 2.0)
K_MAX = 5
ORACLE_SAMPLES = 1_000_000
KS_GAPS_THRESHOLD = 0.02  # pre-build run: 0.01359
SINGULAR_TOLERANCE = 0.01  # pre-build run: relative error 8.2e-4


@pytest.fixture(scope="module")
def oracles():
    """E(k, L) for both test functions, 10^6 Haar samples per (psi, L)."""
    out = {}
    for kind in ("rectangle", "triangle"):
        for i, L in enumerate(L_VALUES):
            psi = homspace.TestFunction2D(kind, L)
            out[kind, L] = homspace.ekl_oracle(psi, K_MAX, ORACLE_SAMPLES, seed=9000 + 10 * i + (kind == "triangle"))
    return out


def _worst(rows):
    return max(rows, key=lambda r: r.z)


# 1 ---------------------------------------------------------------------------
def test_criterion_01_worksheet_outliers():
    t = time.perf_counter()
    res = repro_maple()
    elapsed = time.perf_counter() - t
    ok = res.matched and res.outliers.size == 15 and elapsed < 1.0
    record(1, ok, f"{res.outliers.size} outliers, max |err| {res.max_error:.2e} (tol 1e-6), {elapsed:.2f}s (< 1s)")
    assert res.outliers.size == len(PAPER_OUTLIERS) == 15
    assert res.max_error <= 1e-6
    assert elapsed < 1.0


# 2 ---------------------------------------------------------------------------
def test_criterion_02_exponential_gap_law():
    gaps = np.array([float(g) for g in worksheet_gaps(6001)])
    ks = stats.kstest(gaps, "expon").statistic
    ok = gaps.size == 6000 and ks < KS_GAPS_THRESHOLD
    record(2, ok, f"KS to 1-exp(-s) over {gaps.size} gaps = {ks:.4f} (< {KS_GAPS_THRESHOLD})")
    assert ok


# 3 ---------------------------------------------------------------------------
def test_criterion_03_three_gaps():
    rng = np.random.default_rng(3)
    alphas = rng.random(100)
    t = time.perf_counter()
    worst = 0
    for a in alphas:
        for n in (10, 100, 1000):
            worst = max(worst, len(dioph.three_gap_check(float(a), n, 1e-9)))
    elapsed = time.perf_counter() - t
    ok = worst <= 3 and elapsed < 5.0
    record(3, ok, f"max distinct gaps {worst} over 300 cases (<= 3), {elapsed:.2f}s (< 5s)")
    assert ok


# 4 ---------------------------------------------------------------------------
def test_criterion_04_orbit_identities():
    rng = np.random.default_rng(4)
    t = time.perf_counter()
    bad_malpha = 0
    for _ in range(1000):
        alpha, x0 = rng.random(), rng.random()
        n = int(rng.integers(1, 501))
        L = float(rng.uniform(0.0, min(5.0, n)))
        direct = int(localstats.window_counts(seqgen.gen_malpha(alpha, n), x0, L, closed=True))
        bad_malpha += homspace.orbit_count("malpha", alpha, x0, n, L) != direct
    bad_sqrt = 0
    for _ in range(1000):
        x0 = rng.random()
        n = int(rng.integers(1, 501))
        L = float(rng.uniform(0.0, 5.0))
        bad_sqrt += homspace.orbit_count("sqrt", 1.0, x0, n, L) != homspace.s_tilde_direct(1.0, x0, n, L)
    elapsed = time.perf_counter() - t
    ok = bad_malpha == 0 and bad_sqrt == 0 and elapsed < 30.0
    record(4, ok, f"mismatches malpha {bad_malpha}/1000, sqrt {bad_sqrt}/1000, {elapsed:.1f}s (< 30s)")
    assert ok


# 5 ---------------------------------------------------------------------------
def test_criterion_05_gamma_invariance():
    rng = np.random.default_rng(5)
    gammas = [homspace.gamma_element(int(s), int(rng.integers(0, 11))) for s in rng.integers(0, 2**31, 100)]
    samples = [homspace.haar_sample(int(s)).g for s in rng.integers(0, 2**31, 100)]
    mismatches = 0
    for kind in ("rectangle", "triangle"):
        psi = homspace.TestFunction2D(kind, 2.0)
        for g in samples:
            base = homspace.f_count(g, psi)
            for gam in gammas:
                mismatches += homspace.f_count(gam * g, psi) != base
    record(5, mismatches == 0, f"{mismatches} mismatches over 2 x 100 x 100 evaluations")
    assert mismatches == 0


# 6 ---------------------------------------------------------------------------
def test_criterion_06_variance_identity():
    worst = 0.0
    fails = 0
    for s in range(20):
        pts = seqgen.gen_iid_uniform(1000, 600 + s)
        for L in L_VALUES:
            ident = localstats.number_variance(pts, L, "identity").value
            mc = localstats.number_variance(pts, L, "monte-carlo", samples=100_000, seed=700 + s)
            z = abs(mc.value - ident) / mc.stderr
            worst = max(worst, z)
            fails += z > 3.0
    record(6, fails == 0, f"worst |MC - identity| = {worst:.2f} SE over 60 cases (<= 3)")
    assert fails == 0


# 7 ---------------------------------------------------------------------------
def test_criterion_07_fourier_pair_correlation():
    rng = np.random.default_rng(7)
    worst = 0.0
    fails = 0
    for s in range(100):
        n = int(rng.integers(50, 501))
        L = float(rng.uniform(0.25, 3.0))
        pts = seqgen.gen_iid_uniform(n, 800 + s)
        direct = localstats.pair_correlation_direct(pts, L)
        four = localstats.pair_correlation_fourier(pts, L, n_max=4096)
        err = abs(direct - four.value)
        worst = max(worst, err / four.bound)
        fails += err > four.bound
    record(7, fails == 0, f"worst |direct - fourier| / bound = {worst:.3f} over 100 arrays (<= 1)")
    assert fails == 0


# 8 ---------------------------------------------------------------------------
def test_criterion_08_poisson_baseline():
    masses = np.zeros((50, K_MAX + 1))
    r2 = np.zeros(50)
    for s in range(50):
        pts = seqgen.gen_iid_uniform(10_000, 1000 + s)
        d = localstats.count_distribution_exact(pts, 1.0)
        masses[s] = [d.mass(k) for k in range(K_MAX + 1)]
        r2[s] = localstats.pair_correlation_direct(pts, 1.0)
    mean = masses.mean(axis=0)
    se = masses.std(axis=0, ddof=1) / math.sqrt(50)
    target = randmodel.poisson_masses(1.0, K_MAX)
    z = np.abs(mean - target) / se
    z_r2 = abs(r2.mean() - 1.0) / (r2.std(ddof=1) / math.sqrt(50))
    ok = bool(np.all(z <= 3.0)) and z_r2 <= 3.0
    record(8, ok, f"E_N(k,1) worst {z.max():.2f} SE (k <= 5), R2 off by {z_r2:.2f} SE (<= 3)")
    assert ok


# 9 ---------------------------------------------------------------------------
def test_criterion_09_oracle_cross_validation(oracles):
    t = time.perf_counter()
    counts = malpha_counts(2000, L_VALUES, 10_000, seed=909)
    lines, ok = [], True
    for j, L in enumerate(L_VALUES):
        emp = empirical_distribution(counts[j], L)
        w = _worst(compare_distributions(emp, oracles["rectangle", L], K_MAX))
        ok &= w.z <= 3.0
        lines.append(f"rect L={L}: worst k={w.k} {w.z:.2f} SE")
    for L in L_VALUES:
        emp = ekl_sqrt(50_000, L)
        w = _worst(compare_distributions(emp, oracles["triangle", L], K_MAX))
        ok &= w.z <= 3.0
        lines.append(f"tri L={L}: worst k={w.k} {w.z:.2f} SE (diff {w.diff:+.4f})")
    elapsed = time.perf_counter() - t
    ok &= elapsed < 300
    record(9, ok, "; ".join(lines) + f"; {elapsed:.0f}s excl. oracle")
    assert ok


# 10 --------------------------------------------------------------------------
def test_criterion_10_oracle_sanity(oracles):
    worst = 0.0
    for (kind, L), dist in oracles.items():
        worst = max(worst, abs(dist.meta["sample_mean"] - L) / dist.meta["mean_stderr"])
    closed = math.pi * math.sqrt(3.0) / 6.0
    fd, _ = integrate.quad(lambda u: 1.0 / math.sqrt(1.0 - u * u), -0.5, 0.5)  # inner dv/v^2 integral done
    strip, _ = integrate.quad(lambda v: 1.0 / v**2, math.sqrt(3.0) / 2.0, math.inf)
    quad_rate = fd / strip
    rng = np.random.default_rng(10)
    *_, proposed = homspace.haar_coords(rng, ORACLE_SAMPLES)
    rate = ORACLE_SAMPLES / proposed
    z_rate = abs(rate - closed) / math.sqrt(closed * (1 - closed) / proposed)
    ok = worst <= 3.0 and z_rate <= 3.0 and abs(quad_rate - closed) < 1e-10
    record(10, ok, f"oracle mean worst {worst:.2f} SE; acceptance {rate:.5f} vs {closed:.5f} "
                   f"({z_rate:.2f} SE), quadrature {quad_rate:.10f}")
    assert ok


# 11 --------------------------------------------------------------------------
def test_criterion_11_x_model():
    M = 10_000
    dist = randmodel.heuristic_x_model(M, 1.0, 1_000_000, seed=11)
    tv = randmodel.total_variation(dist.masses, randmodel.poisson_masses(1.0, dist.masses.size + 10))
    threshold = 10.0 / M + 3.0 * randmodel.tv_stderr(dist)
    record(11, tv < threshold, f"TV to Poisson(1) = {tv:.2e} (< 10/M + 3 SE = {threshold:.2e})")
    assert tv < threshold


# 12 --------------------------------------------------------------------------
def test_criterion_12_diophantine():
    details, ok = [], True
    for name, alpha, seed in (("sqrt2", SQRT2, 12), ("golden", GOLDEN, 13)):
        prof = dioph.dioph_type_estimate(alpha, 100_000)
        sweep = dioph.counting_sweep(prof, 10_000, 1000, seed, B=4.0)
        ok &= sweep.satisfied
        details.append(f"{name}: bound holds={sweep.satisfied} (B needed {sweep.max_ratio:.2f} <= 4)")
    avg = dioph.singular_average(SQRT2, 0.5, 1_000_000)
    rel = abs(avg - 2 * SQRT2) / (2 * SQRT2)
    ok &= rel < SINGULAR_TOLERANCE
    details.append(f"singular average {avg:.5f} vs {2 * SQRT2:.5f} (rel {rel:.1e} < {SINGULAR_TOLERANCE})")
    record(12, ok, "; ".join(details))
    assert ok


# 13 --------------------------------------------------------------------------
def test_criterion_13_fixed_center(oracles):
    x0 = math.sqrt(3.0) - 1.0
    counts = malpha_counts(2000, [1.0], 10_000, seed=1313, x0=x0)[0]
    emp = empirical_distribution(counts, 1.0)
    w = _worst(compare_distributions(emp, oracles["rectangle", 1.0], K_MAX))
    record(13, w.z <= 3.0, f"fixed x0=sqrt3-1: worst k={w.k} at {w.z:.2f} combined SE (<= 3)")
    assert w.z <= 3.0
