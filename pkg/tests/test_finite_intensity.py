import math

import numpy as np
import pytest

from ipvt import stats
from ipvt.finite_intensity import (NucleiSet, boundary_escape_stat,
                                   delay_center, delay_convergence_test,
                                   delay_count_mean_exact,
                                   delay_count_mean_limit, delay_window_radius,
                                   delays, escape_stat_fast,
                                   first_delay_cdf_exact,
                                   first_delay_cdf_limit, voronoi_assign)
from ipvt.hyperbolic import DISK, random_mobius
from ipvt.product import (ProductIsometry, ProductPoint, ball_volume, dist_l1,
                          origin)


def test_delay_center():
    lam = 1e-4
    big_l = math.log(1e4)
    assert delay_center(lam) == pytest.approx(big_l - math.log(big_l))
    with pytest.raises(ValueError):
        delay_center(0.5)       # needs lam < 1/e
    with pytest.raises(ValueError):
        delay_center(0.0)


def test_delay_window_radius_monotone():
    assert delay_window_radius(1e-4, 1.0) > delay_window_radius(1e-4, 0.0)


def test_nuclei_sorted_and_delays():
    nuc = NucleiSet.sample(1e-2, 8.0, stats.rng_stream(1, 0))
    assert np.all(np.diff(nuc.distances) >= 0)
    d = delays(nuc)
    assert np.allclose(d, nuc.distances - delay_center(1e-2))
    # a nucleus at distance exactly the recentering constant has delay 0
    c = delay_center(1e-2)
    one = NucleiSet([ProductPoint(math.tanh(c / 2.0), 0.0, DISK)], 1e-2, 10.0)
    assert delays(one)[0] == pytest.approx(0.0, abs=1e-12)


def test_voronoi_assign_trivial():
    pts = [ProductPoint(0.3, 0.0), ProductPoint(-0.3, 0.0)]
    nuc = NucleiSet(pts, 1e-2, 5.0)
    assert voronoi_assign(pts[0], nuc) == 0
    assert voronoi_assign(origin(), nuc) == 0    # tie -> lowest index
    with pytest.raises(ValueError):
        voronoi_assign(origin(), NucleiSet([], 1e-2, 5.0))


def test_voronoi_assign_isometry_invariant():
    rng = stats.rng_stream(2, 0)
    nuc = NucleiSet.sample(3e-2, 6.0, stats.rng_stream(2, 1))
    g = ProductIsometry(random_mobius(rng, 0.4), random_mobius(rng, 0.4),
                        bool(rng.integers(0, 2)))
    moved_pts = [g.apply(p) for p in nuc.points]
    for _ in range(30):
        z = ProductPoint(rng.uniform(0, .8) * np.exp(1j * rng.uniform(-np.pi, np.pi)),
                         rng.uniform(0, .8) * np.exp(1j * rng.uniform(-np.pi, np.pi)))
        i = voronoi_assign(z, nuc)
        gz = g.apply(z)
        d = [dist_l1(gz, q) for q in moved_pts]
        assert int(np.argmin(d)) == i


def test_delay_count_means():
    # integral of pi^2 e^s over [-1, 0]
    assert delay_count_mean_limit(-1.0, 0.0) == pytest.approx(
        math.pi**2 * (1.0 - math.exp(-1.0)))
    assert delay_count_mean_limit(-1.0, 0.0) == pytest.approx(6.2383, abs=5e-4)
    # the exact mean approaches the limit as lam -> 0
    for a, b in ((-2.0, -1.0), (-1.0, 0.0), (0.0, 1.0)):
        lim = delay_count_mean_limit(a, b)
        e4 = delay_count_mean_exact(1e-4, a, b)
        e8 = delay_count_mean_exact(1e-8, a, b)
        assert abs(e8 - lim) < abs(e4 - lim)


def test_first_delay_cdfs():
    assert first_delay_cdf_limit(0.0) == pytest.approx(1.0 - math.exp(-math.pi**2))
    cdf = first_delay_cdf_exact(1e-4)
    s = np.linspace(-6, 2, 50)
    v = cdf(s)
    assert np.all(np.diff(v) >= 0)
    assert v[0] >= 0 and v[-1] <= 1
    # exact void probability: P(D1 > s) = exp(-lam vol(ball(c+s)))
    c = delay_center(1e-4)
    assert cdf(0.5) == pytest.approx(1.0 - math.exp(-1e-4 * ball_volume(c + 0.5)))


def test_delay_convergence_exact_reference():
    rep = delay_convergence_test(1e-3, 300, np.linspace(-3, 1, 9), seed=5)
    assert rep.passed(reference="exact")
    # the limit reference is biased low at finite intensity: observed counts
    # undershoot pi^2 e^s systematically (logarithmically slow convergence)
    assert np.all(rep.z_limit < 0)
    assert np.max(np.abs(rep.z_limit)) > 3.0


def test_delay_convergence_rejects_few_replicas():
    with pytest.raises(ValueError):
        delay_convergence_test(1e-3, 50, np.linspace(-3, 1, 9), seed=0)


def test_boundary_escape_stat():
    nuc = NucleiSet.sample(1e-2, 8.0, stats.rng_stream(7, 0))
    k = min(len(nuc), 5)
    es = boundary_escape_stat(nuc, k)
    assert es.imbalance.shape == (k,)
    assert np.all((es.imbalance >= 0) & (es.imbalance <= 1))
    with pytest.raises(ValueError):
        boundary_escape_stat(nuc, len(nuc) + 1)


def test_escape_imbalance_concentrates_away_from_one():
    # as the intensity vanishes both factors escape at comparable speed:
    # the fraction of first nuclei with near-total imbalance decreases
    fracs = []
    for lam in (1e-2, 1e-4, 1e-6):
        r_max = delay_window_radius(lam, 1.0)
        a1, a2, imb = escape_stat_fast(lam, r_max, 250, seed=11)
        fracs.append(float(np.mean(imb > 0.99)))
    assert fracs[-1] <= fracs[0]
    assert fracs[-1] < 0.2


def test_escape_angles_uniform():
    lam = 1e-4
    r_max = delay_window_radius(lam, 1.0)
    a1, a2, _ = escape_stat_fast(lam, r_max, 600, seed=13)
    d, p = stats.ks_statistic(np.sort(a1), lambda t: (t + np.pi) / (2 * np.pi))
    assert p > 0.01
    d, p = stats.ks_statistic(np.sort(a2), lambda t: (t + np.pi) / (2 * np.pi))
    assert p > 0.01
