"""Complex-analytic numerical kernel.

Path integration along piecewise-smooth contours, Taylor/Laurent
coefficient extraction by Cauchy integrals, central finite differences,
dense complex solves and certified polynomial roots.  Everything here is
pure and deterministic; all tolerances are arguments with conservative
defaults.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.special import roots_legendre

__all__ = [
    "NumericsError",
    "QuadratureError",
    "SingularSystemError",
    "MultipleRootError",
    "Segment",
    "line",
    "arc",
    "Path",
    "circle",
    "Jet",
    "integrate_path",
    "cauchy_coefficients",
    "central_diff",
    "solve_dense",
    "poly_roots",
]

PATH_TOL = 1e-12
COEFF_TOL = 1e-11
_MAX_DEPTH = 30


class NumericsError(Exception):
    pass


class QuadratureError(NumericsError):
    """Adaptive refinement hit the depth limit before reaching tolerance."""

    def __init__(self, message, worst_segment=None, error=None):
        super().__init__(message)
        self.worst_segment = worst_segment
        self.error = error


class SingularSystemError(NumericsError):
    pass


class MultipleRootError(NumericsError):
    pass


# ----------------------------------------------------------------------
# paths
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class Segment:
    """Smooth map [0,1] -> C with derivative; line segments and arcs."""

    kind: str            # "line" | "arc"
    a: complex = 0j      # line: start.  arc: center
    b: complex = 0j      # line: end
    radius: float = 0.0  # arc only
    t0: float = 0.0      # arc: start angle
    t1: float = 0.0      # arc: end angle

    def point(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind == "line":
            return self.a + (self.b - self.a) * t
        ang = self.t0 + (self.t1 - self.t0) * t
        return self.a + self.radius * np.exp(1j * ang)

    def deriv(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind == "line":
            return np.broadcast_to(self.b - self.a, t.shape).copy() if t.shape else self.b - self.a
        ang = self.t0 + (self.t1 - self.t0) * t
        return self.radius * 1j * (self.t1 - self.t0) * np.exp(1j * ang)

    @property
    def start(self):
        return complex(self.point(0.0))

    @property
    def end(self):
        return complex(self.point(1.0))


def line(a, b) -> Segment:
    return Segment("line", a=complex(a), b=complex(b))


def arc(center, radius, t0, t1) -> Segment:
    return Segment("arc", a=complex(center), radius=float(radius), t0=float(t0), t1=float(t1))


@dataclass(frozen=True)
class Path:
    """Contour made of consecutive segments; endpoints must coincide."""

    segments: tuple
    closed: bool = False

    def __post_init__(self):
        segs = tuple(self.segments)
        object.__setattr__(self, "segments", segs)
        if not segs:
            raise ValueError("empty path")
        for s, snext in zip(segs, segs[1:]):
            if abs(s.end - snext.start) > 1e-12 * max(1.0, abs(s.end)):
                raise ValueError("consecutive segment endpoints do not coincide")
        if self.closed:
            if abs(segs[-1].end - segs[0].start) > 1e-12 * max(1.0, abs(segs[-1].end)):
                raise ValueError("closed path must return to its start point")

    @property
    def start(self):
        return self.segments[0].start

    @property
    def end(self):
        return self.segments[-1].end

    def sample(self, per_segment=64):
        """Polyline of points along the path (includes both endpoints)."""
        pts = []
        for k, seg in enumerate(self.segments):
            t = np.linspace(0.0, 1.0, per_segment + 1)
            p = seg.point(t)
            pts.append(p if k == 0 else p[1:])
        return np.concatenate(pts)


def circle(center, radius) -> Path:
    return Path((arc(center, radius, 0.0, 2.0 * np.pi),), closed=True)


# ----------------------------------------------------------------------
# quadrature
# ----------------------------------------------------------------------

_GAUSS_CACHE = {}


def _gauss(n):
    if n not in _GAUSS_CACHE:
        x, w = roots_legendre(n)
        # map [-1,1] -> [0,1]
        _GAUSS_CACHE[n] = (0.5 * (x + 1.0), 0.5 * w)
    return _GAUSS_CACHE[n]


def _gauss_eval(f, seg, u0, u1, n):
    x, w = _gauss(n)
    t = u0 + (u1 - u0) * x
    vals = np.asarray([f(complex(p)) for p in seg.point(t)], dtype=complex)
    return (u1 - u0) * np.sum(w * vals * seg.deriv(t))


def _adaptive(f, seg, u0, u1, tol, depth):
    coarse = _gauss_eval(f, seg, u0, u1, 12)
    fine = _gauss_eval(f, seg, u0, u1, 24)
    err = abs(fine - coarse)
    if err <= tol or (u1 - u0) < 1e-14:
        return fine, err
    if depth >= _MAX_DEPTH:
        raise QuadratureError(
            "quadrature did not converge (depth limit %d)" % _MAX_DEPTH,
            worst_segment=(seg, u0, u1),
            error=err,
        )
    um = 0.5 * (u0 + u1)
    v1, e1 = _adaptive(f, seg, u0, um, 0.5 * tol, depth + 1)
    v2, e2 = _adaptive(f, seg, um, u1, 0.5 * tol, depth + 1)
    return v1 + v2, e1 + e2


def integrate_path(f: Callable[[complex], complex], path: Path, tol: float = PATH_TOL):
    """Integrate f along path.  Returns (value, error_estimate).

    Gauss rule with doubled-order comparison, bisecting segments until the
    local error estimate is below the (per-segment split of the) tolerance.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    total = 0j
    est = 0.0
    per = tol / max(1, len(path.segments))
    for seg in path.segments:
        v, e = _adaptive(f, seg, 0.0, 1.0, per, 0)
        total += v
        est += e
    return total, est


# ----------------------------------------------------------------------
# Cauchy coefficient extraction
# ----------------------------------------------------------------------

@dataclass
class Jet:
    """Expansion coefficients around a center.

    ``coefficients[k]`` is the coefficient of (z-center)**k for k=0..n.
    When extracted with ``principal=True``, ``residue`` holds the
    (z-center)**-1 coefficient.
    """

    center: complex
    coefficients: np.ndarray
    radius: float
    residue: complex | None = None

    def __post_init__(self):
        self.coefficients = np.asarray(self.coefficients, dtype=complex)

    def __call__(self, z):
        dz = np.asarray(z, dtype=complex) - self.center
        out = np.zeros_like(dz)
        for c in self.coefficients[::-1]:
            out = out * dz + c
        if self.residue is not None:
            out = out + self.residue / dz
        return out


def cauchy_coefficients(f, center, radius, max_order, tol=COEFF_TOL,
                        principal=False, max_nodes=4096):
    """Taylor (optionally with residue) coefficients of f at center.

    Trapezoid rule on the circle |z-center| = radius, doubling the node
    count until two successive answers agree to tol.  Spectrally accurate
    for f analytic in a neighborhood of the circle.
    """
    if radius <= 0:
        raise ValueError("radius must be positive")
    lo = -1 if principal else 0
    n = 32
    while n <= max(32, 2 * (max_order + 2)):
        n *= 2
    prev = None
    while True:
        theta = 2.0 * np.pi * np.arange(n) / n
        z = center + radius * np.exp(1j * theta)
        vals = np.asarray([f(complex(zz)) for zz in z], dtype=complex)
        if not np.all(np.isfinite(vals)):
            raise NumericsError("non-finite samples on extraction circle "
                                "(radius touches a singularity?)")
        # c_k = (1/N) sum_j f(z_j) r^-k e^{-ik theta_j}
        fft = np.fft.fft(vals) / n
        ks = np.arange(lo, max_order + 1)
        coeffs = np.array([fft[k % n] * radius ** (-k) for k in ks])
        if prev is not None:
            scale = 1.0 + np.max(np.abs(coeffs))
            if np.max(np.abs(coeffs - prev)) <= tol * scale:
                break
        prev = coeffs
        n *= 2
        if n > max_nodes:
            raise NumericsError("cauchy_coefficients did not stabilize "
                                "(aliasing from a nearby singularity?)")
    if principal:
        return Jet(center=complex(center), coefficients=coeffs[1:],
                   radius=float(radius), residue=complex(coeffs[0]))
    return Jet(center=complex(center), coefficients=coeffs, radius=float(radius))


# ----------------------------------------------------------------------
# finite differences
# ----------------------------------------------------------------------

def central_diff(samples, h, order=1):
    """Second-order central differences on a uniform grid.

    1-D input: returns interior first (order=1) or second (order=2)
    derivatives.  2-D input: returns dict with keys 'dx','dy','dxx','dyy',
    'dxy' defined on the interior; axis 0 is x, axis 1 is y.
    """
    a = np.asarray(samples)
    if h <= 0:
        raise ValueError("h must be positive")
    if a.ndim == 1:
        if a.shape[0] < 3:
            raise NumericsError("grid too small for a 3-point stencil")
        if order == 1:
            return (a[2:] - a[:-2]) / (2 * h)
        if order == 2:
            return (a[2:] - 2 * a[1:-1] + a[:-2]) / h**2
        raise ValueError("order must be 1 or 2")
    if a.ndim == 2:
        if a.shape[0] < 3 or a.shape[1] < 3:
            raise NumericsError("grid too small for a 3-point stencil")
        core = a[1:-1, 1:-1]
        return {
            "dx": (a[2:, 1:-1] - a[:-2, 1:-1]) / (2 * h),
            "dy": (a[1:-1, 2:] - a[1:-1, :-2]) / (2 * h),
            "dxx": (a[2:, 1:-1] - 2 * core + a[:-2, 1:-1]) / h**2,
            "dyy": (a[1:-1, 2:] - 2 * core + a[1:-1, :-2]) / h**2,
            "dxy": (a[2:, 2:] - a[2:, :-2] - a[:-2, 2:] + a[:-2, :-2]) / (4 * h**2),
        }
    raise ValueError("samples must be 1-D or 2-D")


# ----------------------------------------------------------------------
# linear algebra and roots
# ----------------------------------------------------------------------

def solve_dense(A, b, cond_threshold=1e13):
    """Solve Ax=b (complex, partial pivoting) with a conditioning guard."""
    A = np.asarray(A, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("A must be square")
    cond = np.linalg.cond(A)
    if not np.isfinite(cond) or cond > cond_threshold:
        raise SingularSystemError(f"system is numerically singular (cond ~ {cond:.2e})")
    x = np.linalg.solve(A, b)
    resid = np.linalg.norm(A @ x - b)
    if resid > 1e-10 * max(1.0, np.linalg.norm(b)):
        raise SingularSystemError(f"solve residual too large ({resid:.2e})")
    return x


def poly_roots(coeffs, tol=1e-10, cluster_radius=1e-8):
    """Roots of a polynomial (highest degree first), Newton-polished.

    Rejects polynomials with (numerically) multiple roots.  A double root
    computed in floating point splits by O(sqrt(eps)), so the detector
    uses max(cluster_radius, 32*sqrt(eps)) relative to the root scale;
    clusters tighter than cluster_radius are always flagged.
    """
    c = np.asarray(coeffs, dtype=complex)
    c = np.trim_zeros(c, "f")
    if c.size == 0:
        raise ValueError("zero polynomial")
    if c.size == 1:
        return np.array([], dtype=complex)
    roots = np.roots(c)
    dc = np.polyder(c)
    for _ in range(3):  # Newton polish
        p = np.polyval(c, roots)
        dp = np.polyval(dc, roots)
        ok = np.abs(dp) > 1e-300
        roots[ok] = roots[ok] - p[ok] / dp[ok]
    scale = np.max(np.abs(c))
    resid = np.max(np.abs(np.polyval(c, roots)))
    size = max(1.0, np.max(np.abs(roots)))
    if resid > tol * scale * size ** (c.size - 1):
        raise NumericsError(f"root residual too large ({resid:.2e})")
    if roots.size > 1:
        d = np.abs(roots[:, None] - roots[None, :]) + np.eye(roots.size) * 1e30
        detect = max(cluster_radius, 32.0 * np.sqrt(np.finfo(float).eps))
        if np.min(d) < detect * size:
            raise MultipleRootError("polynomial has (numerically) multiple roots")
    order = np.lexsort((roots.imag, roots.real))
    return roots[order]
