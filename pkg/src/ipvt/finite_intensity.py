"""Finite-intensity Poisson-Voronoi diagrams and the low-intensity limit.

Proto-delays recenter nucleus distances by log(1/lam) - log log(1/lam); as
the intensity vanishes they converge to a point process with intensity
pi^2 e^s ds.  The convergence is logarithmically slow, so the test report
carries both the limiting and the exact finite-intensity references.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import stats
from .product import (ProductPoint, ball_volume, dist_l1, origin,
                      sample_ppp_ball, sample_ppp_ball_arrays,
                      sample_radial_distances)


def delay_center(lam: float) -> float:
    """log(1/lam) - log log(1/lam); requires lam < 1/e."""
    if not 0 < lam < math.exp(-1.0):
        raise ValueError("delay recentering needs lam < 1/e")
    big_l = math.log(1.0 / lam)
    return big_l - math.log(big_l)


def delay_window_radius(lam: float, s_max: float, margin: float = 2.0) -> float:
    """Ball radius guaranteeing that every nucleus with delay <= s_max is
    generated without truncation bias."""
    return delay_center(lam) + s_max + margin


@dataclass
class NucleiSet:
    """A finite-intensity nucleus configuration, sorted by distance to the
    origin."""

    points: list[ProductPoint]
    lam: float
    r_max: float
    distances: np.ndarray = field(default=None)

    def __post_init__(self):
        o = origin(self.points[0].model) if self.points else origin()
        if self.distances is None:
            self.distances = np.array([dist_l1(p, o) for p in self.points])
        order = np.argsort(self.distances, kind="stable")
        self.points = [self.points[i] for i in order]
        self.distances = self.distances[order]

    @classmethod
    def sample(cls, lam: float, r_max: float, rng: np.random.Generator) -> "NucleiSet":
        return cls(sample_ppp_ball(lam, r_max, rng), lam, r_max)

    def __len__(self) -> int:
        return len(self.points)


def voronoi_assign(z: ProductPoint, nuclei: NucleiSet) -> int:
    """Index of the nearest nucleus in the L1 metric; ties go to the lowest
    index, deterministically."""
    if len(nuclei) == 0:
        raise ValueError("voronoi_assign: empty nuclei set")
    d = np.array([dist_l1(z, p) for p in nuclei.points])
    return int(np.argmin(d))


def delays(nuclei: NucleiSet) -> np.ndarray:
    """Proto-delays: sorted distances minus the recentering constant."""
    return nuclei.distances - delay_center(nuclei.lam)


def delay_intensity_limit(s):
    """Limiting delay intensity pi^2 e^s."""
    return np.pi**2 * np.exp(np.asarray(s, dtype=float))


def delay_count_mean_limit(a: float, b: float) -> float:
    """Integral of the limiting intensity over [a, b]."""
    return float(np.pi**2 * (math.exp(b) - math.exp(a)))


def delay_count_mean_exact(lam: float, a: float, b: float) -> float:
    """Exact finite-intensity mean count of delays in [a, b]."""
    c = delay_center(lam)
    return lam * (ball_volume(c + b) - ball_volume(max(c + a, 0.0)))


def first_delay_cdf_limit(s):
    """P(D1 <= s) in the limit: 1 - exp(-pi^2 e^s)."""
    return 1.0 - np.exp(-np.pi**2 * np.exp(np.asarray(s, dtype=float)))


def first_delay_cdf_exact(lam: float):
    """Exact finite-intensity first-delay CDF as a callable."""
    c = delay_center(lam)

    def cdf(s):
        r = np.maximum(c + np.asarray(s, dtype=float), 0.0)
        return 1.0 - np.exp(-lam * ball_volume(r))

    return cdf


@dataclass
class DelayReport:
    lam: float
    replicas: int
    bin_edges: np.ndarray
    observed_mean: np.ndarray
    expected_limit: np.ndarray
    expected_exact: np.ndarray
    z_limit: np.ndarray          # against the limiting intensity
    z_exact: np.ndarray          # against the exact finite-lam intensity
    ks_limit: float
    ks_limit_pvalue: float
    ks_exact: float
    ks_exact_pvalue: float
    seed: int

    def passed(self, z_bound: float = 3.0, bin_fraction: float = 0.95,
               ks_level: float = 0.01, reference: str = "limit") -> bool:
        z = self.z_limit if reference == "limit" else self.z_exact
        pv = self.ks_limit_pvalue if reference == "limit" else self.ks_exact_pvalue
        frac = float(np.mean(np.abs(z) <= z_bound))
        return frac >= bin_fraction and pv > ks_level


def delay_convergence_test(lam: float, replicas: int, bin_edges,
                           seed: int, s_margin: float = 2.0) -> DelayReport:
    """Sample the delay window exactly in `replicas` independent copies and
    compare binned counts and the first delay against the limiting law.

    Only radial distances are generated (delays are a function of distances
    alone), which keeps 1e4 replicas at lam = 1e-6 at desk scale.
    """
    if replicas < 100:
        raise ValueError("delay_convergence_test: need at least 100 replicas")
    bin_edges = np.asarray(bin_edges, dtype=float)
    s_max = float(bin_edges[-1])
    r_max = delay_window_radius(lam, s_max, s_margin)
    c = delay_center(lam)

    counts = np.zeros((replicas, bin_edges.size - 1))
    first = np.empty(replicas)
    for k in range(replicas):
        rng = stats.rng_stream(seed, k)
        d = sample_radial_distances(lam, r_max, rng) - c
        counts[k] = np.histogram(d, bins=bin_edges)[0]
        # replicas with an empty window get a first delay beyond the window;
        # censor at r_max (beyond every bin, harmless for KS in practice
        # because the void probability of the window is astronomically small)
        first[k] = d[0] if d.size else r_max

    observed = counts.mean(axis=0)
    exp_limit = np.array([delay_count_mean_limit(a, b)
                          for a, b in zip(bin_edges[:-1], bin_edges[1:])])
    exp_exact = np.array([delay_count_mean_exact(lam, a, b)
                          for a, b in zip(bin_edges[:-1], bin_edges[1:])])
    # Poisson counts: the replica-summed count has variance replicas * mean
    se = np.sqrt(exp_exact / replicas)
    z_limit = (observed - exp_limit) / np.where(se > 0, se, 1.0)
    z_exact = (observed - exp_exact) / np.where(se > 0, se, 1.0)

    first_sorted = np.sort(first)
    ks_l, p_l = stats.ks_statistic(first_sorted, first_delay_cdf_limit)
    ks_e, p_e = stats.ks_statistic(first_sorted, first_delay_cdf_exact(lam))
    return DelayReport(lam, replicas, bin_edges, observed, exp_limit, exp_exact,
                       z_limit, z_exact, ks_l, p_l, ks_e, p_e, seed)


@dataclass
class EscapeStat:
    angles1: np.ndarray
    angles2: np.ndarray
    imbalance: np.ndarray    # |rho1 - rho2| / (rho1 + rho2) per nucleus


def boundary_escape_stat(nuclei: NucleiSet, k: int) -> EscapeStat:
    """Factor directions and radial imbalance of the first k nuclei.

    As the intensity vanishes, the imbalance concentrates away from 1: both
    factors escape to their boundaries at comparable speed.
    """
    if not 0 < k <= len(nuclei):
        raise ValueError("boundary_escape_stat: k out of range")
    a1 = np.empty(k)
    a2 = np.empty(k)
    imb = np.empty(k)
    for i in range(k):
        p = nuclei.points[i]
        z1, z2 = p.first, p.second
        rho1 = 2.0 * math.atanh(abs(z1))
        rho2 = 2.0 * math.atanh(abs(z2))
        a1[i] = math.atan2(z1.imag, z1.real) if abs(z1) else 0.0
        a2[i] = math.atan2(z2.imag, z2.real) if abs(z2) else 0.0
        imb[i] = abs(rho1 - rho2) / (rho1 + rho2) if rho1 + rho2 else 0.0
    return EscapeStat(a1, a2, imb)


def escape_stat_fast(lam: float, r_max: float, replicas: int, seed: int):
    """First-nucleus escape statistics pooled over replicas, using the
    vectorized sampler (angles and radial split only)."""
    a1 = np.empty(replicas)
    a2 = np.empty(replicas)
    imb = np.empty(replicas)
    got = np.zeros(replicas, dtype=bool)
    for k in range(replicas):
        rng = stats.rng_stream(seed, k)
        r, rho1, rho2, ang1, ang2 = sample_ppp_ball_arrays(lam, r_max, rng)
        if r.size == 0:
            continue
        got[k] = True
        a1[k], a2[k] = ang1[0], ang2[0]
        imb[k] = abs(rho1[0] - rho2[0]) / r[0]
    return a1[got], a2[got], imb[got]
