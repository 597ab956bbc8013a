import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ipvt import stats
from ipvt.hyperbolic import (DISK, HALFPLANE, Mobius, cayley, cayley_inv,
                             check_disk, check_halfplane, circular_distance,
                             dist_disk, dist_h2, dist_halfplane, kernel,
                             kernel_disk, kernel_disk_max, kernel_disk_radial,
                             kernel_halfplane, mobius_to_i,
                             mobius_to_origin_disk, norm_angle, random_mobius,
                             ste, ste_inv)

angles = st.floats(-50.0, 50.0, allow_nan=False)
disk_pts = st.tuples(st.floats(0.0, 0.95), st.floats(-math.pi, math.pi)).map(
    lambda t: t[0] * np.exp(1j * t[1]))


@given(angles)
def test_norm_angle_range(theta):
    out = norm_angle(theta)
    assert -math.pi <= out < math.pi
    assert math.isclose(math.cos(out), math.cos(theta), abs_tol=1e-9)
    assert math.isclose(math.sin(out), math.sin(theta), abs_tol=1e-9)


@given(angles, angles)
def test_circular_distance_symmetric(a, b):
    # symmetry up to rounding in the angle reduction (inputs may be many
    # turns away from the principal branch)
    assert circular_distance(a, b) == pytest.approx(circular_distance(b, a),
                                                    abs=1e-9)
    assert 0.0 <= circular_distance(a, b) <= math.pi + 1e-12


def test_check_rejects_boundary():
    with pytest.raises(ValueError):
        check_disk(1.0)
    with pytest.raises(ValueError):
        check_halfplane(2.0 + 0j)


def test_dist_disk_radial():
    # the disk point tanh(d/2) lies at hyperbolic distance d from 0
    for d in (0.1, 1.0, 3.0, 10.0):
        assert dist_disk(0.0, math.tanh(d / 2.0)) == pytest.approx(d, rel=1e-12)


@given(disk_pts, disk_pts)
@settings(max_examples=100)
def test_dist_model_consistency(z1, z2):
    d_disk = dist_disk(z1, z2)
    d_half = dist_halfplane(cayley(z1), cayley(z2))
    assert d_half == pytest.approx(d_disk, rel=1e-9, abs=1e-9)


def test_dist_dispatch():
    assert dist_h2(0.0, 0.5, DISK) == dist_disk(0.0, 0.5)
    assert dist_h2(1j, 2j, HALFPLANE) == dist_halfplane(1j, 2j)
    with pytest.raises(ValueError):
        dist_h2(0.0, 0.5, "nope")


# ---------------------------------------------------------------------------
# kernels

def test_kernel_disk_at_origin():
    for theta in np.linspace(-math.pi, math.pi, 7):
        assert kernel_disk(0.0, theta) == pytest.approx(1.0)


def test_kernel_disk_value():
    # (1 - 1/4) / |1/2 - 1|^2 = 3
    assert kernel_disk(0.5, 0.0) == pytest.approx(3.0, rel=1e-14)


def test_kernel_disk_harmonic_total_mass():
    # the kernel integrates to 1 against the uniform probability measure
    thetas = np.linspace(-math.pi, math.pi, 20001)
    for z in (0.3, 0.5j, -0.7 + 0.2j, 0.9):
        avg = np.trapezoid(kernel_disk(z, thetas), thetas) / (2.0 * math.pi)
        assert avg == pytest.approx(1.0, rel=1e-6)


@given(st.floats(1e-8, 1.0), angles)
@settings(max_examples=100)
def test_kernel_disk_radial_matches(eps, delta):
    # kernel_disk loses ~eps-relative precision to the cancellation
    # 1 - (1-eps)^2; the radial form is the accurate one
    assert kernel_disk_radial(eps, delta) == pytest.approx(
        kernel_disk(1.0 - eps, delta), rel=max(1e-9, 1e-14 / eps))


def test_kernel_disk_max():
    thetas = np.linspace(-math.pi, math.pi, 100001)
    for z in (0.5, 0.2 - 0.6j, 0.95j):
        grid_max = float(np.max(kernel_disk(z, thetas)))
        assert kernel_disk_max(z) >= grid_max
        assert kernel_disk_max(z) == pytest.approx(grid_max, rel=1e-6)


def test_kernel_halfplane_normalization():
    for x in (-5.0, 0.0, 1.0, 100.0, math.inf):
        assert kernel_halfplane(1j, x) == pytest.approx(1.0)
    assert kernel_halfplane(3.0 + 2.0j, math.inf) == pytest.approx(2.0)


@given(disk_pts, st.floats(-math.pi, math.pi - 1e-9))
@settings(max_examples=150)
def test_kernel_cayley_compatibility(z, theta):
    # regression pin: the convention constant between the two models is
    # exactly 1 -- the half-plane kernel at the Cayley image equals the
    # disk kernel, no rescaling
    kd = kernel_disk(z, theta)
    kh = kernel_halfplane(cayley(z), ste(theta))
    assert kh == pytest.approx(kd, rel=1e-9)


def test_kernel_dispatch():
    assert kernel(0.0, 1.0, DISK) == kernel_disk(0.0, 1.0)
    assert kernel(1j, 0.0, HALFPLANE) == kernel_halfplane(1j, 0.0)
    with pytest.raises(ValueError):
        kernel(0.0, 1.0, "nope")


# ---------------------------------------------------------------------------
# Cayley transform and boundary trace

def test_cayley_special_points():
    assert cayley(0.0) == pytest.approx(1j)
    assert cayley(-1.0) == pytest.approx(0.0)
    assert cayley(1.0).real == math.inf
    assert cayley_inv(1j) == pytest.approx(0.0)
    assert cayley_inv(complex(math.inf, 0.0)) == pytest.approx(1.0)


@given(disk_pts)
@settings(max_examples=100)
def test_cayley_roundtrip(z):
    assert cayley_inv(cayley(z)) == pytest.approx(z, abs=1e-10)


@given(st.floats(-math.pi, math.pi - 1e-6))
@settings(max_examples=100)
def test_ste_roundtrip(theta):
    assert ste_inv(ste(theta)) == pytest.approx(norm_angle(theta), abs=1e-9)


def test_ste_uniform_to_cauchy():
    rng = stats.rng_stream(17, 0)
    theta = rng.uniform(-np.pi, np.pi, size=100000)
    x = np.sort(np.asarray(ste(theta)))
    d, p = stats.ks_statistic(x, lambda v: 0.5 + np.arctan(v) / np.pi)
    assert p > 0.01


# ---------------------------------------------------------------------------
# Mobius maps

def _random_mobius_list(seed, n, reversing=False):
    rng = stats.rng_stream(seed, 0)
    return [random_mobius(rng, 0.7, allow_reversing=reversing)
            for _ in range(n)]


def test_mobius_determinant_normalized():
    for m in _random_mobius_list(3, 20, reversing=True):
        assert m.a * m.d - m.b * m.c == pytest.approx(1.0, rel=1e-12)
    with pytest.raises(ValueError):
        Mobius(1.0, 0.0, 0.0, -1.0)


def test_mobius_identity_and_inverse():
    w = 0.4 + 1.7j
    for m in _random_mobius_list(5, 30, reversing=True):
        assert m.compose(m.inverse()).apply_halfplane(w) == pytest.approx(w, rel=1e-9)
        assert m.inverse().apply_halfplane(m.apply_halfplane(w)) == pytest.approx(
            w, rel=1e-9)
    assert Mobius.identity().apply_halfplane(w) == w


def test_mobius_compose_is_action_composition():
    w = -1.2 + 0.6j
    ms = _random_mobius_list(7, 12, reversing=True)
    for m, n in zip(ms[::2], ms[1::2]):
        assert m.compose(n).apply_halfplane(w) == pytest.approx(
            m.apply_halfplane(n.apply_halfplane(w)), rel=1e-9)
        z = 0.3 - 0.5j
        assert m.compose(n).apply_disk(z) == pytest.approx(
            m.apply_disk(n.apply_disk(z)), rel=1e-9, abs=1e-12)


def test_mobius_preserves_distance():
    rng = stats.rng_stream(11, 0)
    for m in _random_mobius_list(11, 20, reversing=True):
        w1 = rng.normal() + 1j * rng.uniform(0.2, 3.0)
        w2 = rng.normal() + 1j * rng.uniform(0.2, 3.0)
        assert dist_halfplane(m.apply_halfplane(w1), m.apply_halfplane(w2)) \
            == pytest.approx(dist_halfplane(w1, w2), rel=1e-9)
        z1 = rng.uniform(0, 0.9) * np.exp(1j * rng.uniform(-np.pi, np.pi))
        z2 = rng.uniform(0, 0.9) * np.exp(1j * rng.uniform(-np.pi, np.pi))
        assert dist_disk(m.apply_disk(z1), m.apply_disk(z2)) \
            == pytest.approx(dist_disk(z1, z2), rel=1e-9)


def test_boundary_derivative_kernel_identity():
    # K(g z, g theta) |g'(theta)| = K(z, theta)
    rng = stats.rng_stream(13, 0)
    for m in _random_mobius_list(13, 20, reversing=True):
        z = rng.uniform(0, 0.9) * np.exp(1j * rng.uniform(-np.pi, np.pi))
        theta = rng.uniform(-np.pi, np.pi)
        lhs = kernel_disk(m.apply_disk(z), m.boundary_disk(theta)) \
            * m.boundary_deriv_disk(theta)
        assert lhs == pytest.approx(kernel_disk(z, theta), rel=1e-9)


def test_boundary_disk_matches_interior_limit():
    m = _random_mobius_list(19, 1)[0]
    theta = 0.83
    inner = m.apply_disk(0.999999 * np.exp(1j * theta))
    assert math.atan2(inner.imag, inner.real) == pytest.approx(
        m.boundary_disk(theta), abs=1e-4)


def test_mobius_to_special_points():
    w = -2.0 + 0.7j
    assert mobius_to_i(w).apply_halfplane(w) == pytest.approx(1j, rel=1e-12)
    z = 0.3 - 0.4j
    assert abs(mobius_to_origin_disk(z).apply_disk(z)) < 1e-9


def test_random_mobius_reproducible():
    a = random_mobius(stats.rng_stream(23, 0))
    b = random_mobius(stats.rng_stream(23, 0))
    assert a == b
