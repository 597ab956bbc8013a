import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ipvt import stats
from ipvt.crosses import (BallModelReport, DepositionEvent, HyperbolicCross,
                          ball_model_intensity_check, ball_radii_from_events,
                          coverage_run, grid_centers, inscribed_disk,
                          mushroom_membership, mushroom_region,
                          sample_deposition)

crosses_st = st.tuples(st.floats(-5, 5), st.floats(-5, 5),
                       st.floats(1e-3, 10.0)).map(lambda t: HyperbolicCross(*t))


def test_cross_validation():
    with pytest.raises(ValueError):
        HyperbolicCross(0.0, 0.0, 0.0)


@given(crosses_st)
@settings(max_examples=60)
def test_cross_contains_center_and_axes(hc):
    assert hc.contains(hc.a, hc.b)
    assert hc.contains(hc.a, hc.b + 100.0)     # vertical line through center
    assert hc.contains(hc.a - 1000.0, hc.b)    # horizontal line through center


@given(crosses_st)
@settings(max_examples=60)
def test_cross_corner_escape(hc):
    q = hc.k ** 0.25
    assert not hc.contains(hc.a + q + 1e-6, hc.b + q + 1e-6)
    assert hc.contains(hc.a + q * (1 - 1e-9), hc.b + q * (1 - 1e-9))


def test_inscribed_disk_closed_forms():
    center, radius = inscribed_disk(HyperbolicCross(0.0, 0.0, 1.0))
    assert center == (0.0, 0.0)
    assert radius == pytest.approx(math.sqrt(2.0))
    _, radius = inscribed_disk(HyperbolicCross(1.0, 1.0, 1.0))
    assert radius == pytest.approx(2.0)


def test_inscribed_disk_containment_and_maximality():
    rng = stats.rng_stream(1, 0)
    ang = np.linspace(-np.pi, np.pi, 10000, endpoint=False)
    for _ in range(100):
        hc = HyperbolicCross(rng.standard_cauchy(), rng.standard_cauchy(),
                             rng.exponential() + 1e-3)
        (cx, cy), rad = inscribed_disk(hc)
        # back off one part in 1e9 from the exact radius: the disk is
        # tangent to the boundary, so points at the exact radius can round
        # to either side
        rin = rad * (1.0 - 1e-9)
        inside = hc.contains(cx + rin * np.cos(ang), cy + rin * np.sin(ang))
        assert np.all(inside)
        inflated = hc.contains(cx + 1.001 * rad * np.cos(ang),
                               cy + 1.001 * rad * np.sin(ang))
        assert not np.all(inflated)


# ---------------------------------------------------------------------------
# deposition model

def test_deposition_event_validation():
    with pytest.raises(ValueError):
        DepositionEvent(0.0, 0.0, 0.0)


def test_deposition_law():
    x, y, t = sample_deposition(100000, stats.rng_stream(2, 0))
    # Cauchy quartiles: P(|x| <= 1) = 1/2
    for v in (x, y):
        p_hat = float(np.mean(np.abs(v) <= 1.0))
        assert abs(p_hat - 0.5) <= 4 * math.sqrt(0.25 / v.size)
        d, p = stats.ks_statistic(np.sort(v),
                                  lambda u: 0.5 + np.arctan(u) / np.pi)
        assert p > 0.01
    incr = np.diff(np.concatenate([[0.0], t]))
    assert np.all(incr > 0)
    d, p = stats.ks_statistic(np.sort(incr), lambda u: 1.0 - np.exp(-u))
    assert p > 0.01
    assert abs(float(np.mean(incr)) - 1.0) <= 4.0 / math.sqrt(incr.size)


def test_deposition_two_paths_agree():
    x1, y1, t1 = sample_deposition(50000, stats.rng_stream(3, 0), via="direct")
    x2, y2, t2 = sample_deposition(50000, stats.rng_stream(3, 1), via="corona")
    d, p = stats.ks_two_sample(x1, x2)
    assert p > 0.01
    d, p = stats.ks_two_sample(y1, y2)
    assert p > 0.01
    with pytest.raises(ValueError):
        sample_deposition(10, stats.rng_stream(3, 2), via="nope")


# ---------------------------------------------------------------------------
# coverage

def test_coverage_validation():
    rng = stats.rng_stream(4, 0)
    ev = sample_deposition(10, rng)
    with pytest.raises(ValueError):
        coverage_run(1.0, (np.array([]), np.array([]), np.array([])))
    with pytest.raises(ValueError):
        coverage_run(1.0, ev, mode="nope")
    with pytest.raises(ValueError):
        coverage_run(-1.0, ev)


def test_coverage_monotone_and_dominated():
    ev = sample_deposition(800, stats.rng_stream(5, 0))
    crosses = coverage_run(1.0, ev, L=6.0, n=128, mode="crosses")
    disks = coverage_run(1.0, ev, L=6.0, n=128, mode="inscribed_disks")
    assert np.all(np.diff(crosses.fractions) >= 0)
    assert np.all(np.diff(disks.fractions) >= 0)
    assert np.all(disks.fractions <= crosses.fractions + 1e-15)


def test_coverage_stop_fraction():
    ev = sample_deposition(20000, stats.rng_stream(6, 0))
    res = coverage_run(1.0, ev, L=10.0, n=256, stop_fraction=0.99)
    assert res.fractions[-1] >= 0.99
    assert res.events_used < 20000
    assert res.events_to_fraction(0.99) == res.events_used
    assert res.events_to_fraction(2.0) is None


def test_grid_centers():
    cs = grid_centers(10.0, 512)
    assert cs.size == 512
    assert cs[0] == pytest.approx(-10.0 + 10.0 / 512)
    assert cs[-1] == pytest.approx(10.0 - 10.0 / 512)


# ---------------------------------------------------------------------------
# ball model change of variables

def test_ball_radii_boundary_limit():
    # at deposition time 0+ the radius sits on the constraint boundary
    x = np.array([0.5, -2.0])
    y = np.array([1.0, 0.0])
    rho0 = ball_radii_from_events(1.0, x, y, np.array([1e-12, 1e-12]))
    bound = np.sqrt(2.0) * ((1 + x**2) * (1 + y**2)) ** 0.25
    assert np.allclose(rho0, bound, rtol=1e-9)


def test_ball_model_intensity():
    rep = ball_model_intensity_check(1.0, 200000, stats.rng_stream(7, 0))
    assert isinstance(rep, BallModelReport)
    assert rep.constraint_violations == 0
    assert rep.fitted_exponent == pytest.approx(-5.0, abs=0.2)
    assert rep.passed
    with pytest.raises(ValueError):
        ball_model_intensity_check(1.0, 100, stats.rng_stream(7, 1))


# ---------------------------------------------------------------------------
# mushroom region

def test_mushroom_rejects_degenerate():
    with pytest.raises(ValueError):
        mushroom_region(0.0, 0.5, 2.0, 1.0, 0.5)


def test_mushroom_membership_on_axis():
    # on the line Re(z2) = y the competitor never strictly wins, and the
    # single touch point is at x1 = theta
    theta, phi, r, r1, y = 0.7, -0.4, 2.0, 1.0, 0.9
    xs = np.linspace(-10, 10, 1001)
    strict = mushroom_membership(theta, phi, r, r1, y, xs, y, strict=True)
    assert not np.any(strict)
    weak = mushroom_membership(theta, phi, r, r1, y, xs, y, strict=False)
    assert np.array_equal(np.nonzero(weak)[0], np.array([], dtype=int)) or \
        np.all(np.abs(xs[weak] - theta) < 1e-9)
    assert mushroom_membership(theta, phi, r, r1, y, theta, y, strict=False)


def test_mushroom_region_report():
    rep = mushroom_region(0.7, -0.4, 2.0, 1.0, 0.9)
    assert rep.line_violations == 0
    assert rep.touch_within_cell
    assert all(rep.edge_hits)            # the region is unbounded
    assert rep.mask.any()


def test_mushroom_random_configurations():
    rng = stats.rng_stream(8, 0)
    for _ in range(50):
        theta, phi, y = rng.standard_cauchy(3)
        r1 = rng.exponential() + 1e-2
        r = r1 + rng.exponential()
        if abs(phi - y) < 1e-3:
            y += 1.0
        rep = mushroom_region(theta, phi, r, r1, y, n=128)
        assert rep.line_violations == 0
        assert rep.touch_within_cell
