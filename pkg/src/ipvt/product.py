"""The product of two hyperbolic planes with the L1 metric.

Contains the product metric, the volume of metric balls, a Poisson sampler
for the volume measure restricted to a ball, and the full isometry group
(pairs of single-factor isometries, optionally composed with the factor
swap).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .hyperbolic import (DISK, HALFPLANE, Mobius, check_point, dist_h2,
                         mobius_to_i, mobius_to_origin_disk)


@dataclass(frozen=True)
class ProductPoint:
    """A point of the product space; both factors must use the same model."""

    first: complex
    second: complex
    model: str = DISK

    def __post_init__(self):
        object.__setattr__(self, "first", check_point(self.first, self.model))
        object.__setattr__(self, "second", check_point(self.second, self.model))


def origin(model: str = DISK) -> ProductPoint:
    if model == DISK:
        return ProductPoint(0.0, 0.0, DISK)
    return ProductPoint(1j, 1j, HALFPLANE)


def dist_l1(x: ProductPoint, y: ProductPoint) -> float:
    """Sum of the factor hyperbolic distances."""
    if x.model != y.model:
        raise ValueError("dist_l1: points use different models")
    return (dist_h2(x.first, y.first, x.model)
            + dist_h2(x.second, y.second, x.model))


# ---------------------------------------------------------------------------
# ball volume

def circumference(rho):
    """Volume (length) of the hyperbolic circle of radius rho: 2 pi sinh(rho)."""
    return 2.0 * np.pi * np.sinh(rho)


def ball_volume(r):
    """Volume of the L1 metric ball of radius r: 2 pi^2 (r cosh r - sinh r)."""
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise ValueError("ball_volume: negative radius")
    out = 2.0 * np.pi**2 * (r * np.cosh(r) - np.sinh(r))
    if out.ndim == 0:
        return float(out)
    return out


def ball_volume_quadrature(r: float) -> float:
    """Independent evaluation of the ball volume as the radial convolution
    of the two factor circumferences."""
    if r < 0:
        raise ValueError("negative radius")
    val, _ = integrate.quad(lambda rho: circumference(rho) * circumference(r - rho),
                            0.0, r, limit=200)
    return val


def ball_volume_inverse(v, r_hint: float = 50.0):
    """Inverse of ball_volume by bracketed bisection (vectorized).

    ball_volume is strictly increasing, with no elementary inverse.
    """
    v = np.asarray(v, dtype=float)
    hi = np.full_like(v, 1.0)
    while np.any(ball_volume(hi) < v):
        hi = np.where(ball_volume(hi) < v, hi * 2.0, hi)
        if np.any(hi > 1e6):
            raise ValueError("ball_volume_inverse: radius out of range")
    lo = np.zeros_like(v)
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        below = ball_volume(mid) < v
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    out = 0.5 * (lo + hi)
    if out.ndim == 0:
        return float(out)
    return out


# ---------------------------------------------------------------------------
# Poisson sampling of the volume measure in a ball

def sample_radial_distances(lam: float, r_max: float, rng: np.random.Generator,
                            size: int | None = None) -> np.ndarray:
    """Sorted L1 distances to the origin of a PPP of intensity lam * Vol
    restricted to the ball of radius r_max.

    If size is given, that many i.i.d. radial distances are drawn instead of
    a Poisson-distributed number (used by the delay experiments, which pool
    replicas).
    """
    if lam <= 0 or r_max <= 0:
        raise ValueError("lam and r_max must be positive")
    total = ball_volume(r_max)
    n = int(rng.poisson(lam * total)) if size is None else int(size)
    u = rng.uniform(0.0, total, size=n)
    r = ball_volume_inverse(u)
    r.sort()
    return r


def sample_factor_split(r: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Given total radii r, draw the first-factor radius rho with density
    proportional to sinh(rho) sinh(r - rho) on [0, r].

    Rejection from the uniform envelope scaled by sinh^2(r/2) (the maximum
    of the target over the interval).
    """
    r = np.asarray(r, dtype=float)
    rho = np.empty_like(r)
    todo = np.arange(r.size)
    env = np.sinh(r / 2.0) ** 2
    while todo.size:
        cand = rng.uniform(0.0, r[todo])
        acc = rng.uniform(0.0, env[todo]) <= np.sinh(cand) * np.sinh(r[todo] - cand)
        rho[todo[acc]] = cand[acc]
        todo = todo[~acc]
    return rho


def sample_ppp_ball_arrays(lam: float, r_max: float, rng: np.random.Generator):
    """Vectorized PPP sample in the ball: returns (r, rho1, rho2, ang1, ang2)
    sorted by increasing r, where rho_j are the factor radii and ang_j the
    factor directions."""
    r = sample_radial_distances(lam, r_max, rng)
    rho1 = sample_factor_split(r, rng)
    rho2 = r - rho1
    ang1 = rng.uniform(-np.pi, np.pi, size=r.size)
    ang2 = rng.uniform(-np.pi, np.pi, size=r.size)
    return r, rho1, rho2, ang1, ang2


def _disk_point(rho, ang):
    return np.tanh(rho / 2.0) * np.exp(1j * ang)


def sample_ppp_ball(lam: float, r_max: float, rng: np.random.Generator) -> list[ProductPoint]:
    """PPP of intensity lam * Vol in the L1 ball of radius r_max around the
    origin of the disk-model product, sorted by increasing distance."""
    r, rho1, rho2, ang1, ang2 = sample_ppp_ball_arrays(lam, r_max, rng)
    z1 = _disk_point(rho1, ang1)
    z2 = _disk_point(rho2, ang2)
    return [ProductPoint(a, b, DISK) for a, b in zip(z1, z2)]


# ---------------------------------------------------------------------------
# isometries

@dataclass(frozen=True)
class ProductIsometry:
    """(z1, z2) -> (g1 z1, g2 z2), then an optional factor swap."""

    g1: Mobius
    g2: Mobius
    swap: bool = False

    @staticmethod
    def identity() -> "ProductIsometry":
        return ProductIsometry(Mobius.identity(), Mobius.identity(), False)

    def apply(self, x: ProductPoint) -> ProductPoint:
        a = self.g1.apply(x.first, x.model)
        b = self.g2.apply(x.second, x.model)
        if self.swap:
            a, b = b, a
        return ProductPoint(a, b, x.model)

    def compose(self, other: "ProductIsometry") -> "ProductIsometry":
        """self after other."""
        if other.swap:
            return ProductIsometry(self.g2.compose(other.g1),
                                   self.g1.compose(other.g2),
                                   not self.swap)
        return ProductIsometry(self.g1.compose(other.g1),
                               self.g2.compose(other.g2),
                               self.swap)

    def inverse(self) -> "ProductIsometry":
        if self.swap:
            return ProductIsometry(self.g2.inverse(), self.g1.inverse(), True)
        return ProductIsometry(self.g1.inverse(), self.g2.inverse(), False)


def isometry_apply(g: ProductIsometry, x: ProductPoint) -> ProductPoint:
    return g.apply(x)


def isometry_to_origin(x: ProductPoint) -> ProductIsometry:
    """A product isometry sending x to the origin of its model."""
    if x.model == DISK:
        return ProductIsometry(mobius_to_origin_disk(x.first),
                               mobius_to_origin_disk(x.second), False)
    return ProductIsometry(mobius_to_i(x.first), mobius_to_i(x.second), False)
