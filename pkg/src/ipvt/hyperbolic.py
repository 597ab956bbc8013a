"""Single-factor hyperbolic plane: two models, Mobius maps, Poisson kernels.

Points of the Poincare disk are complex numbers with |z| < 1, points of the
upper half-plane are complex numbers with Im(w) > 0.  Boundary points are
angles in [-pi, pi) for the disk and extended reals (float or math.inf) for
the half-plane.  Everything here is pure and numpy-broadcastable where it
matters for the samplers downstream.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

# Points closer to the ideal boundary than this are rejected: separations
# blow up there and the asymptotic machinery in `field` takes over instead.
BOUNDARY_GUARD = 1e-14

DISK = "disk"
HALFPLANE = "halfplane"


def norm_angle(theta):
    """Normalize an angle (scalar or array) to the representative in [-pi, pi)."""
    return np.mod(np.asarray(theta) + np.pi, 2.0 * np.pi) - np.pi


def circular_distance(a, b):
    """Geodesic distance on the circle between two angles."""
    d = np.abs(norm_angle(np.asarray(a) - np.asarray(b)))
    return d


def check_disk(z: complex) -> complex:
    z = complex(z)
    if abs(z) > 1.0 - BOUNDARY_GUARD:
        raise ValueError(f"point {z!r} is on or numerically too close to the unit circle")
    return z


def check_halfplane(w: complex) -> complex:
    w = complex(w)
    if w.imag < BOUNDARY_GUARD:
        raise ValueError(f"point {w!r} is not in the open upper half-plane")
    return w


def check_point(p: complex, model: str) -> complex:
    if model == DISK:
        return check_disk(p)
    if model == HALFPLANE:
        return check_halfplane(p)
    raise ValueError(f"unknown model {model!r}")


# ---------------------------------------------------------------------------
# distances

def dist_disk(z1: complex, z2: complex) -> float:
    """Hyperbolic distance between two interior points of the Poincare disk."""
    z1 = check_disk(z1)
    z2 = check_disk(z2)
    num = 2.0 * abs(z1 - z2) ** 2
    den = (1.0 - abs(z1) ** 2) * (1.0 - abs(z2) ** 2)
    return math.acosh(1.0 + num / den)


def dist_halfplane(w1: complex, w2: complex) -> float:
    """Hyperbolic distance between two points of the upper half-plane."""
    w1 = check_halfplane(w1)
    w2 = check_halfplane(w2)
    return math.acosh(1.0 + abs(w1 - w2) ** 2 / (2.0 * w1.imag * w2.imag))


def dist_h2(p: complex, q: complex, model: str) -> float:
    if model == DISK:
        return dist_disk(p, q)
    if model == HALFPLANE:
        return dist_halfplane(p, q)
    raise ValueError(f"unknown model {model!r}")


# ---------------------------------------------------------------------------
# Poisson kernels

def kernel_disk(z, theta):
    """Hyperbolic Poisson kernel (1 - |z|^2) / |z - e^{i theta}|^2.

    Broadcasts over numpy arrays in either argument.  The denominator is
    evaluated as (1-rho)^2 + 2 rho (1 - cos(tau-theta)), which is stable
    for points close to the boundary circle.
    """
    z = np.asarray(z, dtype=complex)
    rho = np.abs(z)
    if np.any(rho > 1.0 - BOUNDARY_GUARD):
        raise ValueError("kernel_disk: point on or outside the unit circle")
    tau = np.angle(z)
    dcos = 1.0 - np.cos(tau - np.asarray(theta))
    den = (1.0 - rho) ** 2 + 2.0 * rho * dcos
    out = (1.0 - rho) * (1.0 + rho) / den
    if out.ndim == 0:
        return float(out)
    return out


def kernel_disk_radial(eps, delta):
    """Kernel at the real point 1 - eps seen towards the angle delta.

    Equals kernel_disk((1-eps), delta) but takes the boundary gap eps
    directly, so callers that know eps exactly (travelling points) do not
    lose precision to the cancellation 1 - rho.
    """
    eps = np.asarray(eps, dtype=float)
    dcos = 1.0 - np.cos(delta)
    return eps * (2.0 - eps) / (eps**2 + 2.0 * (1.0 - eps) * dcos)


def kernel_disk_max(z) -> float:
    """max over boundary angles of kernel_disk(z, .) = (1+|z|)/(1-|z|)."""
    rho = np.abs(np.asarray(z, dtype=complex))
    return (1.0 + rho) / (1.0 - rho)


def kernel_halfplane(w, x):
    """Modified half-plane Poisson kernel.

    (1 + x^2) Im(w) / |w - x|^2 for finite boundary x, and Im(w) at x = inf;
    normalized so the kernel at w = i equals 1 for every boundary point.
    """
    w = np.asarray(w, dtype=complex)
    if np.any(w.imag < BOUNDARY_GUARD):
        raise ValueError("kernel_halfplane: point not in the open upper half-plane")
    x = np.asarray(x, dtype=float)
    finite = np.isfinite(x)
    big = finite & (np.abs(x) > 1.0)
    xf = np.where(finite & ~big, x, 0.0)
    # for |x| > 1 divide numerator and denominator by x^2 so that huge
    # boundary points (e.g. ste of a tiny angle) neither overflow nor
    # produce inf/inf
    xi = np.where(big, 1.0 / np.where(big, x, 1.0), 0.0)
    with np.errstate(invalid="ignore"):
        near = (1.0 + xf**2) * w.imag / np.abs(w - xf) ** 2
        far = (xi**2 + 1.0) * w.imag / ((w.real * xi - 1.0) ** 2
                                        + (w.imag * xi) ** 2)
    out = np.where(finite, np.where(big, far, near), w.imag)
    if out.ndim == 0:
        return float(out)
    return out


def kernel(z, b, model: str):
    """Model-dispatching Poisson kernel (boundary datum b is an angle or an
    extended real according to the model)."""
    if model == DISK:
        return kernel_disk(z, b)
    if model == HALFPLANE:
        return kernel_halfplane(z, b)
    raise ValueError(f"unknown model {model!r}")


# ---------------------------------------------------------------------------
# Cayley transform, fixed convention C(z) = i(1+z)/(1-z)

# C as a complex 2x2 matrix, and an (unnormalized) inverse.
_CAYLEY = np.array([[1j, 1j], [-1.0, 1.0]], dtype=complex)
_CAYLEY_INV = np.array([[1.0, -1j], [1.0, 1j]], dtype=complex)


def cayley(z: complex) -> complex:
    """Disk -> half-plane, C(z) = i(1+z)/(1-z).  C(0)=i, C(1)=inf, C(-1)=0."""
    z = complex(z)
    if z == 1.0:
        return complex(math.inf, 0.0)
    return 1j * (1.0 + z) / (1.0 - z)


def cayley_inv(w: complex) -> complex:
    """Half-plane -> disk, inverse of `cayley`: w -> (w-i)/(w+i)."""
    w = complex(w)
    if not (math.isfinite(w.real) and math.isfinite(w.imag)):
        return complex(1.0, 0.0)
    return (w - 1j) / (w + 1j)


def ste(theta):
    """Boundary trace of the Cayley transform: Ste(theta) = -cot(theta/2).

    Maps a uniform angle on [-pi, pi) to a standard Cauchy variable; the
    angle 0 goes to infinity.  Broadcasts over arrays (returns inf at 0).
    """
    theta = np.asarray(theta, dtype=float)
    with np.errstate(divide="ignore", over="ignore"):
        out = -1.0 / np.tan(theta / 2.0)
    out = np.where(theta == 0.0, np.inf, out)
    if out.ndim == 0:
        return float(out)
    return out


def ste_inv(x):
    """Inverse of `ste`: the angle in [-pi, pi) with -cot(theta/2) = x."""
    x = np.asarray(x, dtype=float)
    finite = np.isfinite(x)
    with np.errstate(divide="ignore"):
        out = np.where(finite, 2.0 * np.arctan2(-1.0, np.where(finite, x, 1.0)), 0.0)
    out = norm_angle(out)
    if out.ndim == 0:
        return float(out)
    return out


# ---------------------------------------------------------------------------
# Mobius isometries of one factor

def _mobius_apply_matrix(mat: np.ndarray, w: complex) -> complex:
    a, b = mat[0]
    c, d = mat[1]
    if not (math.isfinite(w.real) and math.isfinite(w.imag)):
        if c == 0:
            return complex(math.inf, 0.0)
        return complex(a / c)
    den = c * w + d
    if den == 0:
        return complex(math.inf, 0.0)
    return complex((a * w + b) / den)


@dataclass(frozen=True)
class Mobius:
    """A hyperbolic-plane isometry as a normalized real matrix.

    Orientation-preserving elements act on the half-plane as
    w -> (aw+b)/(cw+d) with ad-bc = 1; orientation-reversing ones apply the
    reflection w -> -conj(w) first.  The same element acts on the disk model
    through conjugation by the Cayley transform.
    """

    a: float
    b: float
    c: float
    d: float
    reversing: bool = False

    def __post_init__(self):
        det = self.a * self.d - self.b * self.c
        if det <= 0.0:
            raise ValueError("Mobius: matrix must have positive determinant "
                             "(use reversing=True for reflections)")
        s = 1.0 / math.sqrt(det)
        object.__setattr__(self, "a", self.a * s)
        object.__setattr__(self, "b", self.b * s)
        object.__setattr__(self, "c", self.c * s)
        object.__setattr__(self, "d", self.d * s)

    # -- group structure ----------------------------------------------------

    @staticmethod
    def identity() -> "Mobius":
        return Mobius(1.0, 0.0, 0.0, 1.0)

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=float)

    def _star(self) -> np.ndarray:
        # conjugation of the matrix by the reflection w -> -conj(w)
        return np.array([[self.a, -self.b], [-self.c, self.d]], dtype=float)

    def compose(self, other: "Mobius") -> "Mobius":
        """self after other (group multiplication self * other)."""
        m = self.matrix @ (other._star() if self.reversing else other.matrix)
        return Mobius(m[0, 0], m[0, 1], m[1, 0], m[1, 1],
                      reversing=self.reversing != other.reversing)

    def inverse(self) -> "Mobius":
        inv = np.array([[self.d, -self.b], [-self.c, self.a]], dtype=float)
        if self.reversing:
            inv = np.array([[inv[0, 0], -inv[0, 1]], [-inv[1, 0], inv[1, 1]]])
        return Mobius(inv[0, 0], inv[0, 1], inv[1, 0], inv[1, 1],
                      reversing=self.reversing)

    # -- half-plane action --------------------------------------------------

    def apply_halfplane(self, w: complex) -> complex:
        w = complex(w)
        if self.reversing:
            w = -w.conjugate()
        return _mobius_apply_matrix(self.matrix.astype(complex), w)

    def boundary_halfplane(self, x: float) -> float:
        """Action on the extended real boundary line."""
        if self.reversing:
            x = -x
        out = _mobius_apply_matrix(self.matrix.astype(complex), complex(x, 0.0))
        if not math.isfinite(out.real):
            return math.inf
        return out.real

    # -- disk action (via Cayley conjugation) -------------------------------

    def _disk_matrix(self) -> np.ndarray:
        return _CAYLEY_INV @ self.matrix.astype(complex) @ _CAYLEY

    def apply_disk(self, z: complex) -> complex:
        z = complex(z)
        if self.reversing:
            z = z.conjugate()
        out = _mobius_apply_matrix(self._disk_matrix(), z)
        # the image is an exact disk point; clamp the last-ulp overshoot
        if abs(out) >= 1.0:
            out = out / abs(out) * (1.0 - 1e-15)
        return out

    def boundary_disk(self, theta):
        """Action on boundary angles of the disk (broadcasts over arrays)."""
        theta = np.asarray(theta, dtype=float)
        if self.reversing:
            theta = -theta
        m = self._disk_matrix()
        zb = np.exp(1j * theta)
        img = (m[0, 0] * zb + m[0, 1]) / (m[1, 0] * zb + m[1, 1])
        out = norm_angle(np.angle(img))
        if out.ndim == 0:
            return float(out)
        return out

    def boundary_deriv_disk(self, theta):
        """Conformal boundary derivative |phi'(e^{i theta})| of the disk action.

        Satisfies K(phi(z), phi(theta)) |phi'(theta)| = K(z, theta).
        """
        theta = np.asarray(theta, dtype=float)
        if self.reversing:
            theta = -theta
        m = self._disk_matrix()
        det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
        zb = np.exp(1j * theta)
        out = np.abs(det) / np.abs(m[1, 0] * zb + m[1, 1]) ** 2
        if out.ndim == 0:
            return float(out)
        return out

    def apply(self, p: complex, model: str) -> complex:
        if model == DISK:
            return self.apply_disk(p)
        if model == HALFPLANE:
            return self.apply_halfplane(p)
        raise ValueError(f"unknown model {model!r}")


def mobius_to_i(w: complex) -> Mobius:
    """The upper-triangular element sending the half-plane point w to i."""
    w = check_halfplane(w)
    y = w.imag
    s = math.sqrt(y)
    return Mobius(1.0 / s, -w.real / s, 0.0, s)


def mobius_to_origin_disk(z: complex) -> Mobius:
    """An element whose disk action sends z to 0."""
    return mobius_to_i(cayley(check_disk(z)))


def random_mobius(rng: np.random.Generator, scale: float = 1.0,
                  allow_reversing: bool = False) -> Mobius:
    """A random isometry: K A K Iwasawa-style product of a rotation-like
    element, a diagonal boost and a translation, with magnitudes ~ scale."""
    ang = rng.uniform(-np.pi, np.pi)
    k = Mobius(math.cos(ang / 2), math.sin(ang / 2),
               -math.sin(ang / 2), math.cos(ang / 2))
    t = math.exp(rng.normal(0.0, scale))
    a = Mobius(t, 0.0, 0.0, 1.0 / t)
    n = Mobius(1.0, rng.normal(0.0, scale), 0.0, 1.0)
    m = n.compose(a).compose(k)
    if allow_reversing and rng.random() < 0.5:
        m = m.compose(Mobius(1.0, 0.0, 0.0, 1.0, reversing=True))
    return m
