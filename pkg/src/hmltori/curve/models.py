"""Spectral-curve models: genus 0, hyperelliptic, and two-sheet covers.

Three computational backends share one informal interface:

* ``RationalSurface``   -- CP^1 with affine coordinate zeta (genus 0).
* ``HyperellipticSurface`` -- s^2 = N(u), deg N = 2g+2, simple roots.
* ``FiberedSurface``    -- y^2 = P(x) together with z^2 = Bn(x)/Bd(x);
  a four-sheeted cover of the x-line carrying a two-level sheet record.

Points are immutable ``Pt`` values.  Sheets are tracked by analytic
continuation with step halving; local charts provide analytic
parametrizations around regular points, ramification points and points
at infinity, used for expansions, residues and pole bookkeeping.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..numerics import MultipleRootError, NumericsError, poly_roots

__all__ = [
    "CurveError",
    "SheetTrackingError",
    "Pt",
    "SpecialPoint",
    "RationalSurface",
    "HyperellipticSurface",
    "FiberedSurface",
    "branch_points",
]


class CurveError(Exception):
    pass


class SheetTrackingError(CurveError):
    pass


@dataclass(frozen=True)
class Pt:
    """Point of a surface: base coordinate plus sheet values.

    ``x`` is None at infinity, where ``inf`` carries the branch tag.
    For two-sheeted models ``y`` is the sheet value (s); ``z`` is used
    only by four-sheeted covers.
    """

    x: complex | None
    y: complex | None = None
    z: complex | None = None
    inf: tuple = ()

    @property
    def at_infinity(self):
        return self.x is None

    def close_to(self, other, tol=1e-9):
        if self.at_infinity or other.at_infinity:
            return self.inf == other.inf and self.at_infinity == other.at_infinity
        def eq(a, b):
            if a is None and b is None:
                return True
            if a is None or b is None:
                return False
            return abs(a - b) <= tol * (1.0 + abs(a) + abs(b))
        return eq(self.x, other.x) and eq(self.y, other.y) and eq(self.z, other.z)


@dataclass(frozen=True)
class SpecialPoint:
    """Base-plane point where sheets may change."""

    x: complex
    flip_y: bool
    flip_z: bool


def branch_points(model):
    """Sorted branch points of a two-sheeted model (by real, then imag)."""
    return model.branch_points()


def _choose_root(sq, ref):
    r = np.sqrt(sq)
    return r if abs(r - ref) <= abs(-r - ref) else -r


# ----------------------------------------------------------------------
# chart samples
# ----------------------------------------------------------------------

@dataclass
class ChartSamples:
    t: np.ndarray
    x: np.ndarray
    y: np.ndarray
    z: np.ndarray | None
    dxdt: np.ndarray


class Chart:
    """Analytic local parametrization t -> surface point around a center.

    ``samples(ts)`` maps an array of parameter values (walked in order,
    continuation chooses sheets) to coordinates and dx/dt.
    """

    def __init__(self, surface, center, radius, kind, data):
        self.surface = surface
        self.center = center
        self.radius = radius          # safe upper bound on |t|
        self.kind = kind
        self.data = data

    def samples(self, ts):
        return self.surface._chart_samples(self, np.asarray(ts, dtype=complex))

    def circle(self, radius, n):
        if radius > self.radius:
            raise CurveError("extraction circle exceeds chart radius")
        ts = radius * np.exp(2j * np.pi * np.arange(n) / n)
        return self.samples(ts)

    def point_at(self, t):
        s = self.samples(np.array([t], dtype=complex))
        z = None if s.z is None else complex(s.z[0])
        return Pt(complex(s.x[0]), complex(s.y[0]), z)


# ----------------------------------------------------------------------
# genus zero
# ----------------------------------------------------------------------

class RationalSurface:
    """CP^1 with affine coordinate zeta; genus 0, no sheet structure."""

    genus = 0
    nsheets = 1

    def special_points(self):
        return []

    def point(self, zeta):
        return Pt(complex(zeta))

    def infinity(self):
        return Pt(None, inf=("inf",))

    def involution(self, kind, pt):
        if pt.at_infinity:
            return pt
        ζ = pt.x
        if kind == "sigma":
            return Pt(-ζ)
        if kind == "mu":
            return Pt(np.conj(ζ))
        if kind == "tau":
            return Pt(-np.conj(ζ))
        raise ValueError(f"unknown involution {kind!r}")

    def chart(self, pt, radius=None):
        if pt.at_infinity:
            return Chart(self, pt, radius or 0.5, "inf", {})
        return Chart(self, pt, radius or 0.5, "regular", {})

    def _chart_samples(self, chart, ts):
        if chart.kind == "inf":
            x = 1.0 / ts
            dxdt = -1.0 / ts**2
        else:
            x = chart.center.x + ts
            dxdt = np.ones_like(ts)
        return ChartSamples(ts, x, np.zeros_like(ts), None, dxdt)


# ----------------------------------------------------------------------
# hyperelliptic: s^2 = N(u)
# ----------------------------------------------------------------------

class HyperellipticSurface:
    """s^2 = N(u) with real coefficients, even degree, simple roots."""

    nsheets = 2

    def __init__(self, N_coeffs):
        c = np.asarray(N_coeffs, dtype=complex)
        c = np.trim_zeros(c, "f")
        if c.size < 3 or (c.size - 1) % 2 != 0:
            raise CurveError("degree of N must be even and >= 2")
        if np.max(np.abs(c.imag)) > 1e-12 * np.max(np.abs(c)):
            raise CurveError("N must have real coefficients")
        self.N = c.real.astype(float)
        self.deg = c.size - 1
        self.genus = (self.deg - 2) // 2
        try:
            self._roots = poly_roots(self.N)
        except MultipleRootError:
            raise CurveError("N has multiple roots: curve is singular") from None
        self._dN = np.polyder(self.N)
        self.lead = self.N[0]

    # -- basic geometry -------------------------------------------------
    def branch_points(self):
        return np.array(self._roots)

    def special_points(self):
        return [SpecialPoint(complex(r), True, False) for r in self._roots]

    def Nval(self, u):
        return np.polyval(self.N, u)

    def point(self, u, s):
        u = complex(u)
        s = complex(s)
        if abs(s * s - self.Nval(u)) > 1e-8 * (1.0 + abs(s) ** 2):
            raise CurveError("point does not satisfy s^2 = N(u)")
        return Pt(u, s)

    def lift(self, u, s_ref):
        """Exact point over u with sheet nearest the reference value."""
        return Pt(complex(u), complex(_choose_root(self.Nval(complex(u)), s_ref)))

    def infinity(self, eps):
        """Point over u = inf with s * u^-(g+1) -> eps * sqrt(lead)."""
        if eps not in (+1, -1):
            raise ValueError("eps must be +-1")
        return Pt(None, inf=("inf", eps))

    def both_lifts(self, u):
        s = np.sqrt(self.Nval(complex(u)))
        return [Pt(complex(u), s), Pt(complex(u), -s)]

    # -- involutions -----------------------------------------------------
    def involution(self, kind, pt):
        neg_ok = bool(np.all(np.abs(self.N[1::2]) < 1e-12 * max(np.abs(self.N))))
        if pt.at_infinity:
            eps = pt.inf[1]
            if kind == "hyperelliptic":
                return self.infinity(-eps)
            if kind == "mu":
                return pt
            if kind in ("sigma", "tau"):
                if not neg_ok:
                    raise CurveError("u -> -u is not a symmetry of this curve")
                return pt  # even power of u preserves the branch
            raise ValueError(f"unknown involution {kind!r}")
        u, s = pt.x, pt.y
        if kind == "hyperelliptic":
            return Pt(u, -s)
        if kind == "mu":
            return Pt(np.conj(u), np.conj(s))
        if kind == "sigma":
            if not neg_ok:
                raise CurveError("u -> -u is not a symmetry of this curve")
            return Pt(-u, s)
        if kind == "tau":
            if not neg_ok:
                raise CurveError("u -> -u is not a symmetry of this curve")
            return Pt(-np.conj(u), np.conj(s))
        raise ValueError(f"unknown involution {kind!r}")

    # -- continuation -----------------------------------------------------
    def start_values(self, pt):
        return (pt.y, None)

    def values_along(self, xs, start_vals):
        """Continue s along the base polyline xs; returns (s_array, None)."""
        y = complex(start_vals[0])
        out = np.empty(len(xs), dtype=complex)
        out[0] = y
        for i in range(1, len(xs)):
            y = self._step(xs[i - 1], xs[i], y, depth=0)
            out[i] = y
        return out, None

    def _step(self, x0, x1, y0, depth):
        if depth > 40:
            raise SheetTrackingError("sheet tracking failed (too close to a branch point?)")
        dy = np.polyval(self._dN, x0) / (2.0 * y0) * (x1 - x0)
        pred = y0 + dy
        root = np.sqrt(np.polyval(self.N, x1))
        cand = root if abs(root - pred) <= abs(root + pred) else -root
        other = -cand
        if abs(cand - pred) > 0.25 * abs(cand - other) or abs(cand) < 1e-13:
            xm = 0.5 * (x0 + x1)
            ym = self._step(x0, xm, y0, depth + 1)
            return self._step(xm, x1, ym, depth + 1)
        return cand

    # -- charts ------------------------------------------------------------
    def chart(self, pt, radius=None):
        if pt.at_infinity:
            umax = 1.0 + np.max(np.abs(self._roots))
            return Chart(self, pt, radius or 0.5 / umax, "inf", {"eps": pt.inf[1]})
        d = np.abs(self._roots - pt.x)
        if np.min(d) < 1e-9 * (1.0 + abs(pt.x)):
            # ramification point: local parameter t = s
            k = int(np.argmin(d))
            r0 = self._roots[k]
            others = np.delete(self._roots, k)
            gap = np.min(np.abs(others - r0)) if others.size else 1.0
            dn = np.polyval(self._dN, r0)
            tmax = 0.5 * np.sqrt(0.5 * gap * abs(dn))
            return Chart(self, pt, radius or tmax, "branch", {"root": r0})
        gap = np.min(d)
        return Chart(self, pt, radius or 0.45 * gap, "regular", {})

    def _chart_samples(self, chart, ts):
        if chart.kind == "regular":
            x = chart.center.x + ts
            dxdt = np.ones_like(ts)
            y = self._walk(x, chart.center.y, chart.center.x)
            return ChartSamples(ts, x, y, None, dxdt)
        if chart.kind == "branch":
            r0 = chart.data["root"]
            x = np.empty_like(ts)
            dn0 = np.polyval(self._dN, r0)
            for i, t in enumerate(ts):
                x[i] = self._solve_base(self.N, r0 + t * t / dn0, t * t)
            dxdt = 2.0 * ts / np.polyval(self._dN, x)
            return ChartSamples(ts, x, ts.copy(), None, dxdt)
        if chart.kind == "inf":
            eps = chart.data["eps"]
            x = 1.0 / ts
            dxdt = -1.0 / ts**2
            gp1 = self.genus + 1
            # s = eps * sqrt(N(1/t)) with the branch continuous in t and
            # s * t^(g+1) -> eps*sqrt(lead) as t -> 0 along the positive axis
            y = np.empty_like(ts)
            for i, t in enumerate(ts):
                val = np.polyval(self.N, 1.0 / t)
                target = eps * np.sqrt(self.lead + 0j) / t**gp1
                y[i] = _choose_root(val, target)
            return ChartSamples(ts, x, y, None, dxdt)
        raise CurveError(f"unknown chart kind {chart.kind}")

    def _walk(self, xs, y0, x0):
        y = complex(y0)
        prev = complex(x0)
        out = np.empty(len(xs), dtype=complex)
        for i, x in enumerate(xs):
            y = self._step(prev, x, y, 0)
            out[i] = y
            prev = x
        return out

    @staticmethod
    def _solve_base(N, x_guess, target):
        """Newton-solve N(x) = target starting near x_guess."""
        dN = np.polyder(N)
        x = complex(x_guess)
        for _ in range(60):
            fx = np.polyval(N, x) - target
            dfx = np.polyval(dN, x)
            step = fx / dfx
            x = x - step
            if abs(step) < 1e-14 * (1.0 + abs(x)):
                return x
        if abs(np.polyval(N, x) - target) < 1e-10 * (1.0 + abs(target)):
            return x
        raise CurveError("chart base solve did not converge")


# ----------------------------------------------------------------------
# fibered cover: y^2 = P(x), z^2 = Bn(x)/Bd(x)
# ----------------------------------------------------------------------

class FiberedSurface:
    """Four-sheeted cover of the x-line with a two-level sheet record.

    The sheet function z satisfies z^2 = Bn(x)/Bd(x) with Bn, Bd monic
    real polynomials having simple roots; roots of odd total order flip z.
    """

    nsheets = 4

    def __init__(self, P_coeffs, Bn_coeffs, Bd_coeffs):
        self.P = np.asarray(P_coeffs, dtype=float)
        self.Bn = np.asarray(Bn_coeffs, dtype=float)
        self.Bd = np.asarray(Bd_coeffs, dtype=float)
        if (self.P.size - 1) % 2 != 0:
            raise CurveError("deg P must be even")
        self.g0 = (self.P.size - 3) // 2
        self.y_roots = poly_roots(self.P)
        self.zn_roots = poly_roots(self.Bn)
        self.zd_roots = poly_roots(self.Bd)
        if self.Bn.size != self.Bd.size:
            raise CurveError("z^2 must tend to a finite nonzero limit at infinity")
        self._dP = np.polyder(self.P)
        # genus by Riemann-Hurwitz: double cover of the base hyperelliptic
        # curve branched at the odd-order points of Bn/Bd lying off y=0
        nflip = 0
        for r in np.concatenate([self.zn_roots, self.zd_roots]):
            if np.min(np.abs(self.y_roots - r)) > 1e-9:
                nflip += 2  # two base points over x=r
        self.genus = 2 * self.g0 - 1 + nflip // 2

    # -- helpers ----------------------------------------------------------
    def Pval(self, x):
        return np.polyval(self.P, x)

    def Rval(self, x):
        return np.polyval(self.Bn, x) / np.polyval(self.Bd, x)

    def special_points(self):
        pts = {}
        for r in self.y_roots:
            pts[complex(r)] = [True, False]
        for r in np.concatenate([self.zn_roots, self.zd_roots]):
            key = None
            for k in pts:
                if abs(k - r) < 1e-9:
                    key = k
            if key is None:
                pts[complex(r)] = [False, True]
            else:
                pts[key][1] = True
        out = [SpecialPoint(x, fy, fz) for x, (fy, fz) in pts.items()]
        out.sort(key=lambda s: (s.x.real, s.x.imag))
        return out

    def point(self, x, y, z):
        x, y, z = complex(x), complex(y), complex(z)
        if abs(y * y - self.Pval(x)) > 1e-8 * (1 + abs(y) ** 2):
            raise CurveError("y^2 = P(x) violated")
        if abs(z * z - self.Rval(x)) > 1e-8 * (1 + abs(z) ** 2):
            raise CurveError("z^2 = Bn/Bd violated")
        return Pt(x, y, z)

    def lift(self, x, y_ref, z_ref):
        x = complex(x)
        return Pt(x, complex(_choose_root(self.Pval(x), y_ref)),
                  complex(_choose_root(self.Rval(x), z_ref)))

    def all_lifts(self, x):
        x = complex(x)
        ry = np.sqrt(self.Pval(x))
        rz = np.sqrt(self.Rval(x))
        return [Pt(x, sy * ry, sz * rz) for sy in (1, -1) for sz in (1, -1)]

    def infinity(self, eps_y, eps_z):
        return Pt(None, inf=("inf", eps_y, eps_z))

    def pole_point(self, alpha, w_target):
        """Point over a y-root where z blows up, labelled by lim y*z.

        ``alpha`` must be a common root of P and Bd; ``w_target`` selects
        the branch by the limit value of y*z there.
        """
        alpha = complex(alpha)
        m = self._yz_limit_sq(alpha)
        w = np.sqrt(m)
        if abs(w - w_target) > abs(-w - w_target):
            w = -w
        return Pt(alpha, 0j, None, inf=("zpole", alpha, complex(w)))

    def _yz_limit_sq(self, alpha):
        # (yz)^2 = P * Bn / Bd -> at x=alpha (simple root of P and Bd):
        # P/Bd -> P'(alpha)/Bd'(alpha)
        dP = np.polyval(self._dP, alpha)
        dBd = np.polyval(np.polyder(self.Bd), alpha)
        return np.polyval(self.Bn, alpha) * dP / dBd

    # -- involutions --------------------------------------------------------
    def involution(self, kind, pt):
        if pt.inf and pt.inf[0] == "zpole":
            _, alpha, w = pt.inf
            if kind == "sigma":        # (x,y,z) -> (x,y,-z)
                return Pt(pt.x, 0j, None, inf=("zpole", alpha, -w))
            if kind == "mu":           # conjugation
                return Pt(np.conj(pt.x), 0j, None, inf=("zpole", np.conj(alpha), np.conj(w)))
            if kind == "tau":          # sigma * mu
                return Pt(np.conj(pt.x), 0j, None, inf=("zpole", np.conj(alpha), -np.conj(w)))
            if kind == "J":            # (x,y,z) -> (x,-y,z)
                return Pt(pt.x, 0j, None, inf=("zpole", alpha, -w))
            if kind == "Jsigma":       # (x,y,z) -> (x,-y,-z)
                return pt
            if kind == "Jmu":
                return Pt(np.conj(pt.x), 0j, None, inf=("zpole", np.conj(alpha), -np.conj(w)))
            raise ValueError(f"unknown involution {kind!r}")
        if pt.at_infinity:
            _, ey, ez = pt.inf
            table = {"sigma": (ey, -ez), "mu": (ey, ez), "tau": (ey, -ez),
                     "J": (-ey, ez), "Jsigma": (-ey, -ez), "Jmu": (-ey, ez)}
            if kind not in table:
                raise ValueError(f"unknown involution {kind!r}")
            return self.infinity(*table[kind])
        x, y, z = pt.x, pt.y, pt.z
        if kind == "sigma":
            return Pt(x, y, -z)
        if kind == "mu":
            return Pt(np.conj(x), np.conj(y), np.conj(z))
        if kind == "tau":
            return Pt(np.conj(x), np.conj(y), -np.conj(z))
        if kind == "J":
            return Pt(x, -y, z)
        if kind == "Jsigma":
            return Pt(x, -y, -z)
        if kind == "Jmu":
            return Pt(np.conj(x), -np.conj(y), np.conj(z))
        raise ValueError(f"unknown involution {kind!r}")

    # -- continuation ---------------------------------------------------------
    def start_values(self, pt):
        return (pt.y, pt.z)

    def values_along(self, xs, start_vals):
        y = complex(start_vals[0])
        z = complex(start_vals[1])
        ys = np.empty(len(xs), dtype=complex)
        zs = np.empty(len(xs), dtype=complex)
        ys[0], zs[0] = y, z
        for i in range(1, len(xs)):
            y, z = self._step(xs[i - 1], xs[i], y, z, 0)
            ys[i], zs[i] = y, z
        return ys, zs

    def _step(self, x0, x1, y0, z0, depth):
        if depth > 40:
            raise SheetTrackingError("sheet tracking failed")
        ypred = y0 + np.polyval(self._dP, x0) / (2 * y0) * (x1 - x0)
        ry = np.sqrt(self.Pval(x1))
        ycand = ry if abs(ry - ypred) <= abs(ry + ypred) else -ry
        R0, R1 = self.Rval(x0), self.Rval(x1)
        # predict z through the square-root branch of the ratio closest to 1
        ratio = np.sqrt(R1 / R0)
        zpred = z0 * (ratio if abs(ratio - 1) <= abs(ratio + 1) else -ratio)
        rz = np.sqrt(R1)
        zcand = rz if abs(rz - zpred) <= abs(rz + zpred) else -rz
        ok_y = abs(ycand - ypred) <= 0.25 * abs(2 * ycand) and abs(ycand) > 1e-13
        ok_z = abs(zcand - zpred) <= 0.25 * abs(2 * zcand) and abs(zcand) > 1e-13
        if not (ok_y and ok_z):
            xm = 0.5 * (x0 + x1)
            ym, zm = self._step(x0, xm, y0, z0, depth + 1)
            return self._step(xm, x1, ym, zm, depth + 1)
        return ycand, zcand

    # -- charts -------------------------------------------------------------
    def _gap(self, x0):
        sp = [s.x for s in self.special_points() if abs(s.x - x0) > 1e-9]
        return min(abs(np.array(sp) - x0)) if sp else 1.0

    def chart(self, pt, radius=None):
        if pt.inf and pt.inf[0] == "zpole":
            _, alpha, w = pt.inf
            gap = self._gap(alpha)
            dp = np.polyval(self._dP, alpha)
            tmax = 0.4 * np.sqrt(0.5 * gap * abs(dp))
            return Chart(self, pt, radius or tmax, "zpole", {"alpha": alpha, "w": w})
        if pt.at_infinity:
            rmax = 1.0 + max(abs(s.x) for s in self.special_points())
            return Chart(self, pt, radius or 0.4 / rmax, "inf",
                         {"ey": pt.inf[1], "ez": pt.inf[2]})
        d = [abs(pt.x - s.x) for s in self.special_points()]
        k = int(np.argmin(d))
        sp = self.special_points()[k]
        if d[k] < 1e-9 * (1 + abs(pt.x)):
            gap = self._gap(sp.x)
            if sp.flip_y and not sp.flip_z:
                dp = np.polyval(self._dP, sp.x)
                tmax = 0.4 * np.sqrt(0.5 * gap * abs(dp))
                return Chart(self, pt, radius or tmax, "ybranch",
                             {"root": sp.x, "zref": pt.z})
            if sp.flip_z and not sp.flip_y:
                # t = z; x solves Bn/Bd = t^2
                dR = self._dRval(sp.x)
                tmax = 0.4 * np.sqrt(0.5 * gap * abs(dR))
                return Chart(self, pt, radius or tmax, "zbranch",
                             {"root": sp.x, "yref": pt.y})
            raise CurveError("no finite chart at a y+z flip point; use pole_point")
        gap = min(d)
        return Chart(self, pt, radius or 0.4 * gap, "regular", {})

    def _dRval(self, x):
        n, d = np.polyval(self.Bn, x), np.polyval(self.Bd, x)
        dn, dd = np.polyval(np.polyder(self.Bn), x), np.polyval(np.polyder(self.Bd), x)
        return (dn * d - n * dd) / d**2

    def _chart_samples(self, chart, ts):
        if chart.kind == "regular":
            x = chart.center.x + ts
            y, z = self._walk(x, chart.center.y, chart.center.z, chart.center.x)
            return ChartSamples(ts, x, y, z, np.ones_like(ts))
        if chart.kind == "ybranch":
            r0 = chart.data["root"]
            dp0 = np.polyval(self._dP, r0)
            x = np.array([HyperellipticSurface._solve_base(self.P, r0 + t * t / dp0, t * t)
                          for t in ts])
            dxdt = 2.0 * ts / np.polyval(self._dP, x)
            zref = chart.data["zref"]
            z = np.array([_choose_root(self.Rval(xx), zref) for xx in x])
            return ChartSamples(ts, x, ts.copy(), z, dxdt)
        if chart.kind == "zbranch":
            r0 = chart.data["root"]
            x = np.empty_like(ts)
            for i, t in enumerate(ts):
                x[i] = self._solve_R(r0, t * t)
            dxdt = 2.0 * ts / np.array([self._dRval(xx) for xx in x])
            yref = chart.data["yref"]
            y = np.array([_choose_root(self.Pval(xx), yref) for xx in x])
            return ChartSamples(ts, x, y, ts.copy(), dxdt)
        if chart.kind == "zpole":
            alpha, w = chart.data["alpha"], chart.data["w"]
            dp0 = np.polyval(self._dP, alpha)
            x = np.array([HyperellipticSurface._solve_base(self.P, alpha + t * t / dp0, t * t)
                          for t in ts])
            dxdt = 2.0 * ts / np.polyval(self._dP, x)
            y = ts.copy()
            z = np.empty_like(ts)
            for i, t in enumerate(ts):
                z[i] = _choose_root(self.Rval(x[i]), w / t)
            return ChartSamples(ts, x, y, z, dxdt)
        if chart.kind == "inf":
            ey, ez = chart.data["ey"], chart.data["ez"]
            x = 1.0 / ts
            dxdt = -1.0 / ts**2
            gp1 = self.g0 + 1
            plead = self.P[0]
            y = np.empty_like(ts)
            z = np.empty_like(ts)
            for i, t in enumerate(ts):
                y[i] = _choose_root(self.Pval(1.0 / t), ey * np.sqrt(plead + 0j) / t**gp1)
                z[i] = _choose_root(self.Rval(1.0 / t), ez * 1.0)
            return ChartSamples(ts, x, y, z, dxdt)
        raise CurveError(f"unknown chart kind {chart.kind}")

    def _walk(self, xs, y0, z0, x0):
        y, z = complex(y0), complex(z0)
        prev = complex(x0)
        ys = np.empty(len(xs), dtype=complex)
        zs = np.empty(len(xs), dtype=complex)
        for i, x in enumerate(xs):
            y, z = self._step(prev, x, y, z, 0)
            ys[i], zs[i] = y, z
            prev = x
        return ys, zs

    def _solve_R(self, x_guess_root, target):
        # solve Bn(x)/Bd(x) = target near a simple root of Bn
        x = complex(x_guess_root) + target / self._dRval(complex(x_guess_root))
        for _ in range(60):
            f = self.Rval(x) - target
            df = self._dRval(x)
            step = f / df
            x = x - step
            if abs(step) < 1e-14 * (1 + abs(x)):
                return x
        raise CurveError("z-branch chart solve did not converge")
