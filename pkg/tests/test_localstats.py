import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from modone import localstats as ls
from modone.errors import InvalidArgument
from modone.seqgen import OrderedPointArray, gen_iid_uniform, gen_malpha

from conftest import direct_window_count

QUARTERS = OrderedPointArray(np.array([0.0, 0.25, 0.5, 0.75]))

arrays = st.builds(
    lambda n, seed: gen_iid_uniform(n, seed),
    st.integers(2, 300),
    st.integers(0, 10**6),
)


def test_count_in_window_examples():
    assert ls.count_in_window(QUARTERS, ls.Window(0.5, 1.2, 4)) == 1
    assert ls.count_in_window(QUARTERS, ls.Window(0.0, 4.0, 4)) == 4


def test_window_rejects_long_window():
    with pytest.raises(InvalidArgument):
        ls.Window(0.0, 5.0, 4)


@settings(deadline=None)
@given(arrays, st.floats(0, 1, exclude_max=True), st.floats(0.01, 1.0), st.booleans())
def test_window_counts_match_scan(points, x0, frac_len, closed):
    L = frac_len * points.n
    got = ls.window_counts(points, x0, L, closed=closed)
    assert got == direct_window_count(points.points, x0, L / points.n, closed)


def test_sweep_equally_spaced():
    d = ls.count_distribution_exact(QUARTERS, 1.0)
    assert d.mass(1) == pytest.approx(1.0)
    assert d.total == pytest.approx(1.0, abs=1e-12)


def test_sweep_small_window_is_empty():
    d = ls.count_distribution_exact(gen_iid_uniform(100, 0), 1e-6)
    assert d.mass(0) > 1 - 1e-5


@settings(deadline=None)
@given(arrays, st.floats(0.05, 0.95))
def test_sweep_invariants_and_monte_carlo(points, frac_len):
    L = frac_len * points.n
    d = ls.count_distribution_exact(points, L)
    assert d.total == pytest.approx(1.0, abs=1e-12)
    assert d.mean == pytest.approx(L, abs=1e-9)
    # the sweep must agree with a fine grid of window centres
    grid = (np.arange(20000) + 0.5) / 20000
    counts = ls.window_counts(points, grid, L)
    freq = np.bincount(counts, minlength=d.masses.size) / grid.size
    assert np.abs(freq[: d.masses.size] - d.masses).max() < 2 * points.n / grid.size + 1e-9


def test_gap_examples():
    assert ls.gap_statistics(QUARTERS).gaps.tolist() == [1.0, 1.0, 1.0, 1.0]
    g = ls.gap_statistics(OrderedPointArray(np.array([0.0, 0.1])))
    np.testing.assert_allclose(g.gaps, [0.2, 1.8])
    assert ls.gap_statistics(QUARTERS, "open-chain").gaps.size == 3
    with pytest.raises(InvalidArgument):
        ls.gap_statistics(OrderedPointArray(np.array([0.3])))


@given(arrays)
def test_circular_gaps_sum_to_n(points):
    g = ls.gap_statistics(points)
    assert g.gaps.sum() == pytest.approx(points.n, abs=1e-9)
    assert np.all(g.gaps >= 0)


def test_histogram_basic():
    h = ls.gap_histogram(ls.gap_statistics(QUARTERS), 0.2, 35)
    assert h.masses[5] == 1.0 and h.outliers.size == 0
    h = ls.gap_histogram(np.array([0.1, 7.5, 7.0, 3.0]), 0.2, 35)
    assert h.outliers.tolist() == [7.0, 7.5]
    assert h.masses.sum() + h.outlier_mass == pytest.approx(1.0, abs=1e-12)


def test_histogram_tracks_exponential_for_iid():
    g = ls.gap_statistics(gen_iid_uniform(100_000, 4))
    h = ls.gap_histogram(g, 0.2, 35)
    ref = h.exponential_reference()
    se = np.sqrt(ref * (1 - ref) / h.total)
    assert np.all(np.abs(h.masses - ref) < 5 * se + 1e-4)


def test_ep_transform_examples():
    g = ls.gap_statistics(QUARTERS)
    assert ls.ep_zero_gap_transform(g, 1.0) == 0.0
    assert ls.ep_zero_gap_transform(g, 0.5) == 0.5
    with pytest.raises(InvalidArgument):
        ls.ep_zero_gap_transform(ls.gap_statistics(QUARTERS, "open-chain"), 1.0)


@settings(deadline=None)
@given(arrays, st.floats(0.01, 0.99))
def test_ep_transform_equals_sweep(points, frac_len):
    L = frac_len * points.n
    e0 = ls.count_distribution_exact(points, L).mass(0)
    assert ls.ep_zero_gap_transform(ls.gap_statistics(points), L) == pytest.approx(e0, abs=1e-9)


def test_pair_correlation_examples():
    two = OrderedPointArray(np.array([0.0, 0.5]))
    assert ls.pair_correlation_direct(two, 0.9) == 0.0
    same = OrderedPointArray(np.array([0.0, 0.0]))
    assert ls.pair_correlation_direct(same, 1.0) == 1.0
    with pytest.raises(InvalidArgument):
        ls.pair_correlation_direct(two, 2.5)


@settings(deadline=None, max_examples=30)
@given(arrays, st.floats(0.1, 5.0), st.sampled_from(["triangle", "box"]))
def test_pair_correlation_matches_quadratic_sum(points, L, kind):
    if L / points.n * (1.0 if kind == "triangle" else 0.5) > 0.5:
        L = 0.4 * points.n
    psi = ls.Window1D(kind)
    ell = L / points.n
    x = points.points
    d = x[:, None] - x[None, :]
    total = sum(psi((d + m) / ell) for m in (-1, 0, 1))
    np.fill_diagonal(total, 0.0)
    assert ls.pair_correlation_direct(points, L, kind) == pytest.approx(total.sum() / points.n, rel=1e-12, abs=1e-12)


def test_triangle_transform():
    assert ls.TRIANGLE.hat(0.0) == 1.0
    y = 0.37
    assert ls.TRIANGLE.hat(y) == pytest.approx((math.sin(math.pi * y) / (math.pi * y)) ** 2)


def test_periodised_hat_sum_against_direct():
    step = 0.37
    n = np.arange(-200_000, 200_001)
    direct = ls.TRIANGLE.hat(step * n).sum()
    assert ls.TRIANGLE.periodised_hat_sum(step) == pytest.approx(direct, rel=1e-5)


def test_fourier_two_coincident_points():
    same = OrderedPointArray(np.array([0.0, 0.0]))
    four = ls.pair_correlation_fourier(same, 1.0, n_max=64)
    assert abs(four.value - 1.0) <= four.bound


@settings(deadline=None, max_examples=25)
@given(arrays, st.floats(0.2, 4.0), st.integers(16, 2048))
def test_fourier_within_bound(points, L, n_max):
    L = min(L, 0.5 * points.n)
    four = ls.pair_correlation_fourier(points, L, n_max=n_max)
    assert abs(four.value - ls.pair_correlation_direct(points, L)) <= four.bound


def test_pair_correlation_iid_near_one():
    vals = np.array([ls.pair_correlation_direct(gen_iid_uniform(10_000, s), 1.0) for s in range(30)])
    assert abs(vals.mean() - 1.0) < 3 * vals.std(ddof=1) / math.sqrt(vals.size)


def test_number_variance_lattice_is_zero():
    assert ls.number_variance(QUARTERS, 1.0).value == 0.0


@settings(deadline=None, max_examples=20)
@given(arrays, st.floats(0.05, 0.45))
def test_identity_equals_sweep_variance(points, frac_len):
    L = frac_len * points.n
    a = ls.number_variance(points, L, "identity").value
    b = ls.number_variance(points, L, "sweep").value
    assert a == pytest.approx(b, abs=1e-8 * max(1.0, L * L))


def test_number_variance_iid_close_to_L():
    L = 20.0
    v = np.mean([ls.number_variance(gen_iid_uniform(20_000, s), L).value for s in range(20)])
    assert abs(v - L) < 0.1 * L


def test_number_variance_unknown_method():
    with pytest.raises(InvalidArgument):
        ls.number_variance(QUARTERS, 1.0, "magic")


def test_malpha_counts_are_three_valued_gaps():
    # sanity link between gaps and windows: a window shorter than the
    # smallest gap never holds two points
    pts = gen_malpha(math.sqrt(2), 500)
    smallest = ls.gap_statistics(pts).gaps.min()
    d = ls.count_distribution_exact(pts, 0.99 * smallest)
    assert d.masses.size == 2
