"""The corona: boundary x boundary x positive radius.

The limiting point process lives here: two i.i.d. uniform boundary
directions and radii forming a unit-rate homogeneous PPP.  Separation to a
corona point is r divided by the product of the factor Poisson kernels;
smaller separation wins cell membership.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .hyperbolic import (DISK, HALFPLANE, kernel, kernel_disk,
                         kernel_disk_max, kernel_disk_radial, norm_angle)
from .product import ProductIsometry, ProductPoint

CSV_COLUMNS = ("theta", "phi", "r")


@dataclass(frozen=True)
class CoronaPoint:
    """One corona atom: two boundary data and a positive separation radius.

    In the disk model theta/phi are angles in [-pi, pi); in the half-plane
    model they are extended reals (math.inf allowed).
    """

    theta: float
    phi: float
    r: float
    model: str = DISK

    def __post_init__(self):
        if not self.r > 0:
            raise ValueError("corona radius must be positive")
        if self.model == DISK:
            object.__setattr__(self, "theta", float(norm_angle(self.theta)))
            object.__setattr__(self, "phi", float(norm_angle(self.phi)))


@dataclass
class CoronaSample:
    """A corona realization, exact below r_cutoff, stored as arrays sorted
    by strictly increasing radius."""

    theta: np.ndarray
    phi: np.ndarray
    r: np.ndarray
    r_cutoff: float
    model: str = DISK

    def __post_init__(self):
        order = np.argsort(self.r, kind="stable")
        self.theta = np.asarray(self.theta, dtype=float)[order]
        self.phi = np.asarray(self.phi, dtype=float)[order]
        self.r = np.asarray(self.r, dtype=float)[order]
        if np.any(self.r <= 0) or np.any(self.r > self.r_cutoff):
            raise ValueError("corona radii must lie in (0, r_cutoff]")
        if np.any(np.diff(self.r) == 0.0):
            raise ValueError("tied corona radii (probability-zero event); resample")

    def __len__(self) -> int:
        return self.r.size

    def point(self, i: int) -> CoronaPoint:
        return CoronaPoint(self.theta[i], self.phi[i], self.r[i], self.model)

    def points(self) -> list[CoronaPoint]:
        return [self.point(i) for i in range(len(self))]

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(CSV_COLUMNS)
            for t, p, r in zip(self.theta, self.phi, self.r):
                w.writerow([repr(float(t)), repr(float(p)), repr(float(r))])

    @classmethod
    def from_csv(cls, path, r_cutoff: float, model: str = DISK) -> "CoronaSample":
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        if rows[0] != list(CSV_COLUMNS):
            raise ValueError(f"bad corona CSV header: {rows[0]!r}")
        data = np.array([[float(v) for v in row] for row in rows[1:]], dtype=float)
        data = data.reshape(-1, 3)
        return cls(data[:, 0], data[:, 1], data[:, 2], r_cutoff, model)


def sample_corona(r_cutoff: float, rng: np.random.Generator,
                  model: str = DISK) -> CoronaSample:
    """Radii: unit-rate homogeneous PPP on [0, r_cutoff]; angles i.i.d.
    uniform, independent of the radii.  (Half-plane requests are sampled in
    the disk and stereographically projected.)"""
    if r_cutoff <= 0:
        raise ValueError("r_cutoff must be positive")
    while True:
        n = int(rng.poisson(r_cutoff))
        r = np.sort(rng.uniform(0.0, r_cutoff, size=n))
        if not np.any(np.diff(r) == 0.0):
            break
    theta = rng.uniform(-np.pi, np.pi, size=n)
    phi = rng.uniform(-np.pi, np.pi, size=n)
    if model == HALFPLANE:
        from .hyperbolic import ste
        theta = np.asarray(ste(theta))
        phi = np.asarray(ste(phi))
    return CoronaSample(theta, phi, r, r_cutoff, model)


# ---------------------------------------------------------------------------
# separation

def separation(z: ProductPoint, p: CoronaPoint) -> float:
    """sep(z, (theta, phi, r)) = r / (K(z1, theta) K(z2, phi))."""
    if z.model != p.model:
        raise ValueError("separation: mixed models")
    return p.r / (kernel(z.first, p.theta, z.model)
                  * kernel(z.second, p.phi, z.model))


def separations(z: ProductPoint, sample: CoronaSample) -> np.ndarray:
    """Vectorized separation from z to every atom of the sample."""
    if z.model != sample.model:
        raise ValueError("separations: mixed models")
    k1 = kernel(z.first, sample.theta, z.model)
    k2 = kernel(z.second, sample.phi, z.model)
    return sample.r / (k1 * k2)


def unseen_separation_bound(z: ProductPoint, r_cutoff: float) -> float:
    """Lower bound on the separation from z to any corona point with radius
    above r_cutoff: the per-factor kernel maximum is (1+|z|)/(1-|z|)."""
    if z.model == DISK:
        kmax1 = kernel_disk_max(z.first)
        kmax2 = kernel_disk_max(z.second)
    else:
        # K-hat(w, x) is maximized over x at the boundary point below w:
        # sup_x (1+x^2) Im w / |w-x|^2 = (1 + |w|) / ... use the disk bound
        # through the Cayley transform, which preserves separations.
        from .hyperbolic import cayley_inv
        kmax1 = kernel_disk_max(cayley_inv(z.first))
        kmax2 = kernel_disk_max(cayley_inv(z.second))
    return r_cutoff / (kmax1 * kmax2)


@dataclass(frozen=True)
class CellAssignment:
    index: int
    margin: float        # runner-up separation minus winning separation
    certified: bool      # no corona point beyond r_cutoff could win
    separation: float


def cell_assign(z: ProductPoint, sample: CoronaSample) -> CellAssignment:
    """Argmin of separation over the sample, with the truncation certificate.

    The assignment is certified only when the winning separation is below
    the separation any unseen atom (radius > r_cutoff) could achieve.
    """
    if len(sample) == 0:
        raise ValueError("cell_assign: empty corona sample")
    sep = separations(z, sample)
    i = int(np.argmin(sep))
    if sep.size > 1:
        margin = float(np.partition(sep, 1)[1] - sep[i])
    else:
        margin = math.inf
    certified = sep[i] < unseen_separation_bound(z, sample.r_cutoff)
    return CellAssignment(i, margin, bool(certified), float(sep[i]))


# ---------------------------------------------------------------------------
# isometry action on the corona

def corona_isometry_apply(g: ProductIsometry, p: CoronaPoint) -> CoronaPoint:
    """Push a corona point forward so that separation is equivariant:
    sep(g z, g p) = sep(z, p).

    Radii divide by the product of kernels at the preimages of the origin;
    the factor swap exchanges the two boundary coordinates and leaves the
    radius alone.
    """
    if p.model != DISK:
        raise ValueError("corona action is defined in the disk model")
    w1 = g.g1.inverse().apply_disk(0.0)
    w2 = g.g2.inverse().apply_disk(0.0)
    theta = g.g1.boundary_disk(p.theta)
    phi = g.g2.boundary_disk(p.phi)
    r = p.r / (kernel_disk(w1, p.theta) * kernel_disk(w2, p.phi))
    if g.swap:
        theta, phi = phi, theta
    return CoronaPoint(theta, phi, r, DISK)


def corona_isometry_apply_sample(g: ProductIsometry, sample: CoronaSample,
                                 r_cutoff: float) -> CoronaSample:
    """Vectorized pushforward of a whole sample, truncated at r_cutoff
    (atoms pushed beyond it are dropped; the input must have been sampled
    deep enough that no atom below r_cutoff is missing)."""
    if sample.model != DISK:
        raise ValueError("corona action is defined in the disk model")
    w1 = g.g1.inverse().apply_disk(0.0)
    w2 = g.g2.inverse().apply_disk(0.0)
    theta = g.g1.boundary_disk(sample.theta)
    phi = g.g2.boundary_disk(sample.phi)
    r = sample.r / (kernel_disk(w1, sample.theta) * kernel_disk(w2, sample.phi))
    if g.swap:
        theta, phi = phi, theta
    keep = r <= r_cutoff
    return CoronaSample(np.atleast_1d(theta)[keep], np.atleast_1d(phi)[keep],
                        r[keep], r_cutoff, DISK)


def pushforward_covers(g: ProductIsometry, r_cutoff: float) -> float:
    """Radius up to which the source corona must be sampled so that the
    g-pushforward is exact below r_cutoff."""
    w1 = g.g1.inverse().apply_disk(0.0)
    w2 = g.g2.inverse().apply_disk(0.0)
    return r_cutoff * kernel_disk_max(w1) * kernel_disk_max(w2)


# ---------------------------------------------------------------------------
# no-man's-land

def nml_predicate(z: ProductPoint, p: CoronaPoint, q: CoronaPoint,
                  tol: float = 1e-9) -> bool:
    """True when z is at (relatively) equal separation from p and q."""
    sp = separation(z, p)
    sq = separation(z, q)
    return abs(sp - sq) <= tol * max(sp, sq)


def nml_residual_inf_inf(z1, z2, theta: float, phi: float,
                         r1: float, r: float):
    """Closed-form membership residual, half-plane model, first point at
    (inf, inf): |z1-th|^2 |z2-ph|^2 - (r1/r)(1+th^2)(1+ph^2).  Zero exactly
    on the equal-separation surface (the factor Im z1 Im z2 cancels)."""
    lhs = np.abs(np.asarray(z1) - theta) ** 2 * np.abs(np.asarray(z2) - phi) ** 2
    return lhs - (r1 / r) * (1.0 + theta**2) * (1.0 + phi**2)


def nml_residual_inf_y(z1, z2, y: float, theta: float, phi: float,
                       r1: float, r: float):
    """Closed-form residual for the first point at (inf, y), cross-multiplied
    so the axis Re(z2) = y needs no division:
    |z1-th|^2 |z2-ph|^2 (1+y^2) - (r1/r)(1+th^2)(1+ph^2)|z2-y|^2."""
    lhs = (np.abs(np.asarray(z1) - theta) ** 2
           * np.abs(np.asarray(z2) - phi) ** 2 * (1.0 + y**2))
    rhs = ((r1 / r) * (1.0 + theta**2) * (1.0 + phi**2)
           * np.abs(np.asarray(z2) - y) ** 2)
    return lhs - rhs


def nml_surface_sample_inf_inf(theta: float, phi: float, r1: float, r: float,
                               n: int, rng: np.random.Generator):
    """Random points (z1, z2) exactly on the closed-form surface for the
    (inf, inf) configuration, for cross-checking against the kernel
    separations."""
    x1 = theta + rng.normal(0.0, 1.0, size=n)
    y1 = np.exp(rng.normal(0.0, 1.0, size=n))
    z1 = x1 + 1j * y1
    target = ((r1 / r) * (1.0 + theta**2) * (1.0 + phi**2)
              / np.abs(z1 - theta) ** 2)        # required |z2 - phi|^2
    s = rng.uniform(-0.9, 0.9, size=n)
    z2 = (phi + s * np.sqrt(target)) + 1j * np.sqrt(target * (1.0 - s**2))
    return z1, z2


def nml_surface_sample_inf_y(y: float, theta: float, phi: float,
                             r1: float, r: float, n: int,
                             rng: np.random.Generator):
    """Random points exactly on the closed-form surface for the (inf, y)
    configuration.  For fixed z1 the z2-locus |z2-phi|^2 = kappa |z2-y|^2
    is the Apollonius circle of center (phi - kappa y)/(1 - kappa) and
    radius sqrt(kappa)|phi - y|/|1 - kappa| (the degenerate kappa = 1
    vertical line is avoided by resampling z1)."""
    if abs(phi - y) < 1e-12:
        raise ValueError("degenerate configuration: phi coincides with y")
    const = (r1 / r) * (1.0 + theta**2) * (1.0 + phi**2) / (1.0 + y**2)
    z1 = np.empty(n, dtype=complex)
    z2 = np.empty(n, dtype=complex)
    filled = 0
    while filled < n:
        m = n - filled
        x1 = theta + rng.normal(0.0, 1.0, size=m)
        y1 = np.exp(rng.normal(0.0, 1.0, size=m))
        w1 = x1 + 1j * y1
        kappa = const / np.abs(w1 - theta) ** 2
        ok = np.abs(kappa - 1.0) > 1e-6
        w1, kappa = w1[ok], kappa[ok]
        center = (phi - kappa * y) / (1.0 - kappa)
        radius = np.sqrt(kappa) * abs(phi - y) / np.abs(1.0 - kappa)
        u = rng.uniform(0.05 * np.pi, 0.95 * np.pi, size=w1.size)
        w2 = center + radius * np.exp(1j * u)
        z1[filled:filled + w1.size] = w1
        z2[filled:filled + w1.size] = w2
        filled += w1.size
    return z1, z2


@dataclass(frozen=True)
class NmlWitness:
    t: float
    z: ProductPoint
    residual: float      # |sep_p - sep_q| / max at the refined point


def _sep_diff_patch(p: CoronaPoint, q: CoronaPoint, t: float, u1, u2):
    """sep(z,p) - sep(z,q) at z = (tanh((t+u1)/2), tanh((t+u2)/2)) on the
    real diagonal, evaluated through the boundary gaps for stability."""
    e1 = 2.0 / (np.exp(t + np.asarray(u1)) + 1.0)   # 1 - tanh((t+u1)/2)
    e2 = 2.0 / (np.exp(t + np.asarray(u2)) + 1.0)
    sp = p.r / (kernel_disk_radial(e1, p.theta) * kernel_disk_radial(e2, p.phi))
    sq = q.r / (kernel_disk_radial(e1, q.theta) * kernel_disk_radial(e2, q.phi))
    return sp - sq


def nml_unbounded_probe(p: CoronaPoint, q: CoronaPoint, t_max: float,
                        grid: int = 33, patch_halfwidth: float = 8.0,
                        t_step: float = 1.0, refine: int = 60) -> list[NmlWitness]:
    """Search, for each t on a grid up to t_max, a bounded patch around the
    travelling point (tanh(t/2), tanh(t/2)) for a sign change of
    sep(., p) - sep(., q); bisect to refine any witness found.

    The patch varies the two factor radial coordinates along the rays to the
    boundary point (1, 1); its L1 diameter is 4 * patch_halfwidth, uniformly
    in t.  Absence of a witness at some t is a reported outcome, not an
    error.
    """
    if (p.theta, p.phi, p.r) == (q.theta, q.phi, q.r):
        raise ValueError("nml_unbounded_probe: identical corona points")
    witnesses = []
    us = np.linspace(-patch_halfwidth, patch_halfwidth, grid)
    u1g, u2g = np.meshgrid(us, us, indexing="ij")
    ts = np.arange(t_step, t_max + 1e-9, t_step)
    for t in ts:
        h = _sep_diff_patch(p, q, float(t), u1g, u2g)
        sgn = np.sign(h)
        flip_x = np.nonzero(sgn[:-1, :] * sgn[1:, :] < 0)
        flip_y = np.nonzero(sgn[:, :-1] * sgn[:, 1:] < 0)
        seg = None
        if flip_x[0].size:
            i, j = flip_x[0][0], flip_x[1][0]
            seg = ((us[i], us[j]), (us[i + 1], us[j]))
        elif flip_y[0].size:
            i, j = flip_y[0][0], flip_y[1][0]
            seg = ((us[i], us[j]), (us[i], us[j + 1]))
        if seg is None:
            continue
        (a1, a2), (b1, b2) = seg
        ha = float(_sep_diff_patch(p, q, float(t), a1, a2))
        for _ in range(refine):
            m1, m2 = 0.5 * (a1 + b1), 0.5 * (a2 + b2)
            hm = float(_sep_diff_patch(p, q, float(t), m1, m2))
            if (hm < 0) == (ha < 0):
                a1, a2, ha = m1, m2, hm
            else:
                b1, b2 = m1, m2
        u1, u2 = 0.5 * (a1 + b1), 0.5 * (a2 + b2)
        z = ProductPoint(math.tanh((t + u1) / 2.0), math.tanh((t + u2) / 2.0), DISK)
        sp = p.r / (kernel_disk_radial(2.0 / (math.exp(t + u1) + 1.0), p.theta)
                    * kernel_disk_radial(2.0 / (math.exp(t + u2) + 1.0), p.phi))
        sq = q.r / (kernel_disk_radial(2.0 / (math.exp(t + u1) + 1.0), q.theta)
                    * kernel_disk_radial(2.0 / (math.exp(t + u2) + 1.0), q.phi))
        witnesses.append(NmlWitness(float(t), z, abs(sp - sq) / max(sp, sq)))
    return witnesses
