"""The planar trace of the tessellation: hyperbolic crosses, deposition,
coverage and the mushroom region.

On the boundary plane of the half-plane product (both imaginary parts sent
to zero) the competitors of the corona point at (inf, inf) cut out
"hyperbolic crosses" (x-a)^2 (y-b)^2 <= c (1+a^2)(1+b^2).  Their centers are
Cauchy-distributed, the level c decays with the radius gap, and the union
of the crosses (or of their inscribed disks) covers the plane.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import stats
from .hyperbolic import ste


@dataclass(frozen=True)
class HyperbolicCross:
    """The region (x-a)^2 (y-b)^2 <= c (1+a^2)(1+b^2); contains the full
    horizontal and vertical lines through (a, b)."""

    a: float
    b: float
    c: float

    def __post_init__(self):
        if not self.c > 0:
            raise ValueError("cross level c must be positive")

    @property
    def k(self) -> float:
        return self.c * (1.0 + self.a**2) * (1.0 + self.b**2)

    def contains(self, x, y):
        out = (np.asarray(x) - self.a) ** 2 * (np.asarray(y) - self.b) ** 2 <= self.k
        if np.ndim(out) == 0:
            return bool(out)
        return out


def inscribed_disk(hc: HyperbolicCross) -> tuple[tuple[float, float], float]:
    """Largest disk inside the cross: center (a, b), radius sqrt(2) k^{1/4}."""
    return (hc.a, hc.b), math.sqrt(2.0) * hc.k ** 0.25


# ---------------------------------------------------------------------------
# deposition model

@dataclass(frozen=True)
class DepositionEvent:
    x: float
    y: float
    t: float

    def __post_init__(self):
        if not self.t > 0:
            raise ValueError("deposition time must be positive")


def sample_deposition(n_events: int, rng: np.random.Generator,
                      via: str = "direct"):
    """Events of the cross deposition model as arrays (x, y, t).

    x, y are i.i.d. standard Cauchy and t runs through the arrivals of a
    unit-rate PPP.  via="corona" generates the same law by sampling corona
    directions and stereographically projecting them (the two paths agree in
    law and are cross-checked in the tests).
    """
    if n_events < 1:
        raise ValueError("need at least one event")
    t = np.cumsum(rng.exponential(1.0, size=n_events))
    if via == "direct":
        x = rng.standard_cauchy(n_events)
        y = rng.standard_cauchy(n_events)
    elif via == "corona":
        theta = rng.uniform(-np.pi, np.pi, size=n_events)
        phi = rng.uniform(-np.pi, np.pi, size=n_events)
        x = np.asarray(ste(theta))
        y = np.asarray(ste(phi))
    else:
        raise ValueError(f"unknown sampling path {via!r}")
    return x, y, t


# ---------------------------------------------------------------------------
# coverage

@dataclass
class CoverageResult:
    fractions: np.ndarray     # coverage fraction after each applied event
    covered: np.ndarray       # final n x n boolean mask
    events_used: int
    mode: str
    grid_l: float
    grid_n: int

    def events_to_fraction(self, target: float) -> int | None:
        idx = np.nonzero(self.fractions >= target)[0]
        return int(idx[0]) + 1 if idx.size else None


def grid_centers(L: float, n: int) -> np.ndarray:
    """Cell-center coordinates of the n x n grid on [-L, L]^2."""
    step = 2.0 * L / n
    return -L + step * (np.arange(n) + 0.5)


def coverage_run(r1: float, events, L: float = 10.0, n: int = 512,
                 mode: str = "crosses", stop_fraction: float | None = None) -> CoverageResult:
    """Deposit event i as the cross HC(x_i, y_i, r1/(r1+t_i)) (or its
    inscribed disk) and track the covered fraction of the grid.

    A cell counts as covered when its center is covered.  Coverage is
    monotone; only still-uncovered cells are tested against each new event.
    """
    if mode not in ("crosses", "inscribed_disks"):
        raise ValueError(f"unknown mode {mode!r}")
    if r1 <= 0:
        raise ValueError("r1 must be positive")
    x, y, t = (np.asarray(a, dtype=float) for a in events)
    if x.size == 0:
        raise ValueError("empty event list")
    cs = grid_centers(L, n)
    ux, uy = np.meshgrid(cs, cs, indexing="ij")
    ux, uy = ux.ravel(), uy.ravel()
    uidx = np.arange(n * n)
    covered = np.zeros(n * n, dtype=bool)
    total = n * n
    fractions = np.empty(x.size)
    used = x.size
    for i in range(x.size):
        k = (r1 / (r1 + t[i])) * (1.0 + x[i] ** 2) * (1.0 + y[i] ** 2)
        if mode == "crosses":
            hit = np.abs(ux - x[i]) * np.abs(uy - y[i]) <= math.sqrt(k)
        else:
            hit = (ux - x[i]) ** 2 + (uy - y[i]) ** 2 <= 2.0 * math.sqrt(k)
        if hit.any():
            covered[uidx[hit]] = True
            keep = ~hit
            ux, uy, uidx = ux[keep], uy[keep], uidx[keep]
        fractions[i] = 1.0 - uidx.size / total
        if stop_fraction is not None and fractions[i] >= stop_fraction:
            used = i + 1
            break
    return CoverageResult(fractions[:used], covered.reshape(n, n), used, mode, L, n)


# ---------------------------------------------------------------------------
# Poisson ball model change of variables

@dataclass
class BallModelReport:
    samples: int
    constraint_violations: int
    fitted_exponent: float
    exponent_stderr: float
    rho_window: tuple[float, float]
    n_fit: int

    @property
    def passed(self) -> bool:
        return self.constraint_violations == 0 and abs(self.fitted_exponent + 5.0) <= 0.2


def ball_radii_from_events(r1: float, x, y, t) -> np.ndarray:
    """rho = sqrt(2) (r1/(r1+t) (1+x^2)(1+y^2))^{1/4}."""
    return np.sqrt(2.0) * (r1 / (r1 + np.asarray(t))
                           * (1.0 + np.asarray(x) ** 2)
                           * (1.0 + np.asarray(y) ** 2)) ** 0.25


def ball_model_intensity_check(r1: float, samples: int, rng: np.random.Generator,
                               box: float = 1.0,
                               rho_window: tuple[float, float] = (0.15, 0.6),
                               bins: int = 8) -> BallModelReport:
    """Verify the change of variables to the Poisson random ball model.

    Checks that every radius satisfies rho <= sqrt(2) ((1+x^2)(1+y^2))^{1/4}
    (the t -> 0 boundary), then fits the conditional rho-profile, restricted
    to centers in a small box where the constraint is inactive, against the
    rho^{-5} power law on log-log axes.
    """
    if samples < 10**4:
        raise ValueError("ball_model_intensity_check: need at least 1e4 samples")
    x, y, t = sample_deposition(samples, rng)
    rho = ball_radii_from_events(r1, x, y, t)
    bound = np.sqrt(2.0) * ((1.0 + x**2) * (1.0 + y**2)) ** 0.25
    violations = int(np.sum(rho > bound))

    in_box = (np.abs(x) <= box) & (np.abs(y) <= box)
    lo, hi = rho_window
    sel = in_box & (rho >= lo) & (rho <= hi)
    edges = np.logspace(np.log10(lo), np.log10(hi), bins + 1)
    counts, _ = np.histogram(rho[sel], bins=edges)
    widths = np.diff(edges)
    centers = np.sqrt(edges[:-1] * edges[1:])
    ok = counts > 0
    logx = np.log(centers[ok])
    logy = np.log(counts[ok] / widths[ok])
    w = counts[ok].astype(float)          # Poisson: var(log count) ~ 1/count
    wsum = w.sum()
    xb = (w * logx).sum() / wsum
    yb = (w * logy).sum() / wsum
    sxx = (w * (logx - xb) ** 2).sum()
    slope = (w * (logx - xb) * (logy - yb)).sum() / sxx
    resid = logy - (yb + slope * (logx - xb))
    dof = max(ok.sum() - 2, 1)
    slope_se = math.sqrt((w * resid**2).sum() / dof / sxx)
    return BallModelReport(samples, violations, float(slope), float(slope_se),
                           rho_window, int(sel.sum()))


# ---------------------------------------------------------------------------
# mushroom region (first corona point sent to (inf, y))

@dataclass
class MushroomReport:
    mask: np.ndarray            # n x n boolean, [i, j] ~ (x1_i, x2_j)
    line_violations: int        # strict membership on the axis Re(z2)=y away from theta
    touch_within_cell: bool     # the boundary touch point sits within one cell of theta
    edge_hits: tuple[bool, bool, bool, bool]


def mushroom_membership(theta: float, phi: float, r: float, r1: float, y: float,
                        x1, x2, strict: bool = True):
    """Points of the boundary plane at smaller separation to (theta, phi, r)
    than to (inf, y, r1), via the cross-multiplied closed form (no division,
    so the axis Re(z2)=y is handled exactly)."""
    lhs = (np.asarray(x1) - theta) ** 2 * (np.asarray(x2) - phi) ** 2 * (1.0 + y**2)
    rhs = (r1 / r) * (1.0 + theta**2) * (1.0 + phi**2) * (np.asarray(x2) - y) ** 2
    return lhs < rhs if strict else lhs <= rhs


def mushroom_region(theta: float, phi: float, r: float, r1: float, y: float,
                    L: float = 10.0, n: int = 512) -> MushroomReport:
    """Grid mask of the mushroom region plus the axis-intersection scan."""
    if abs(phi - y) < 1e-9:
        raise ValueError("degenerate configuration: phi coincides with y")
    cs = grid_centers(L, n)
    m = mushroom_membership(theta, phi, r, r1, y, cs[:, None], cs[None, :])
    # exact scan of the line Re(z2) = y: strict membership can only fail;
    # the region touches the axis at the single point x1 = theta
    on_line = mushroom_membership(theta, phi, r, r1, y, cs, y, strict=True)
    cell = 2.0 * L / n
    away = np.abs(cs - theta) > cell
    violations = int(np.sum(on_line & away))
    touch = mushroom_membership(theta, phi, r, r1, y, theta, y, strict=False)
    edges = (bool(m[0].any()), bool(m[-1].any()),
             bool(m[:, 0].any()), bool(m[:, -1].any()))
    return MushroomReport(m, violations, bool(touch), edges)
