"""Meromorphic differentials as finite combinations of explicit terms.

A Differential is sum_i c_i * x^k_i * y^py_i * z^pz_i / prod(x-r)^m * dx
over the base coordinate of its surface.  Local behaviour at any point
is measured numerically through the surface charts (Cauchy extraction in
the local parameter), which powers residues, expansion coefficients,
divisor certification and a generic linear solver for differentials with
prescribed local data.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..numerics import NumericsError
from .models import CurveError, FiberedSurface, HyperellipticSurface, RationalSurface

__all__ = [
    "Term",
    "Differential",
    "chart_coefficients",
    "expansion_at",
    "residue_at",
    "order_at",
    "holomorphic_candidates",
    "LocalCondition",
    "solve_differential",
    "form_with_divisor",
]


@dataclass(frozen=True)
class Term:
    coeff: complex = 1.0 + 0j
    kx: int = 0
    py: int = 0          # power of the first sheet value
    pz: int = 0          # power of the second sheet value (covers only)
    denom: tuple = ()    # ((root, mult), ...)

    def density(self, x, y, z=None):
        v = self.coeff * np.asarray(x, dtype=complex) ** self.kx
        if self.py:
            v = v * np.asarray(y, dtype=complex) ** self.py
        if self.pz:
            if z is None:
                raise CurveError("term uses z on a surface without z")
            v = v * np.asarray(z, dtype=complex) ** self.pz
        for root, mult in self.denom:
            v = v / (np.asarray(x, dtype=complex) - root) ** mult
        return v

    def scaled(self, c):
        return Term(self.coeff * c, self.kx, self.py, self.pz, self.denom)


@dataclass
class Differential:
    """omega = (sum of terms)(x, y, z) dx on a fixed surface."""

    surface: object
    terms: list

    def density(self, x, y, z=None):
        tot = None
        for t in self.terms:
            v = t.density(x, y, z)
            tot = v if tot is None else tot + v
        return tot if tot is not None else np.zeros_like(np.asarray(x, dtype=complex))

    def on_samples(self, samples):
        """Pullback density in the chart parameter: F(x,y,z) * dx/dt."""
        return self.density(samples.x, samples.y, samples.z) * samples.dxdt

    def scaled(self, c):
        return Differential(self.surface, [t.scaled(c) for t in self.terms])

    def __add__(self, other):
        return Differential(self.surface, list(self.terms) + list(other.terms))


# ----------------------------------------------------------------------
# local analysis through charts
# ----------------------------------------------------------------------

def chart_coefficients(diff, chart, lo, hi, radius_frac=0.5, n=None):
    """Coefficients of the pullback of ``diff`` in the chart parameter.

    Returns array c[lo..hi] with pullback = sum c_k t^k dt, computed by
    FFT on a circle of radius radius_frac * chart.radius.  The node count
    doubles until two extractions agree.
    """
    r = radius_frac * chart.radius
    n0 = n or 64
    prev = None
    while n0 <= 4096:
        s = chart.circle(r, n0)
        vals = diff.on_samples(s)
        if not np.all(np.isfinite(vals)):
            raise NumericsError("non-finite samples in chart extraction")
        fft = np.fft.fft(vals) / n0
        ks = np.arange(lo, hi + 1)
        coeffs = np.array([fft[k % n0] * r ** (-float(k)) for k in ks])
        if prev is not None and np.max(np.abs(coeffs - prev)) <= 1e-10 * (1 + np.max(np.abs(coeffs))):
            return coeffs
        prev = coeffs
        n0 *= 2
    return prev


def expansion_at(diff, pt, orders=(0, 3), chart=None):
    chart = chart or diff.surface.chart(pt)
    return chart_coefficients(diff, chart, orders[0], orders[1])


def residue_at(diff, pt, chart=None):
    """Residue of ``diff`` at pt via the local parameter there."""
    chart = chart or diff.surface.chart(pt)
    return complex(chart_coefficients(diff, chart, -1, -1)[0])


def order_at(diff, pt, search=(-4, 4), chart=None, scale=None):
    """Leading order of the pullback at pt (np.inf if it vanishes)."""
    chart = chart or diff.surface.chart(pt)
    c = chart_coefficients(diff, chart, search[0], search[1])
    mag = np.abs(c)
    ref = scale if scale is not None else max(np.max(mag), 1e-300)
    for k, m in zip(range(search[0], search[1] + 1), mag):
        if m > 1e-8 * ref:
            return k
    return np.inf


# ----------------------------------------------------------------------
# holomorphic candidates per surface type
# ----------------------------------------------------------------------

def holomorphic_candidates(surface):
    if isinstance(surface, HyperellipticSurface):
        return [Differential(surface, [Term(kx=k, py=-1)]) for k in range(surface.genus)]
    if isinstance(surface, FiberedSurface):
        g0 = surface.g0
        out = [Differential(surface, [Term(kx=k, py=-1)]) for k in range(g0)]
        out += [Differential(surface, [Term(kx=k, py=-1, pz=-1)]) for k in range(g0)]
        # the remaining sheet-odd forms: dx / (z * Bd(x))
        bd = tuple((complex(r), 1) for r in surface.zd_roots)
        out += [Differential(surface, [Term(pz=-1, denom=bd)])]
        if len(out) != surface.genus:
            raise CurveError("holomorphic candidate count does not match genus")
        return out
    raise CurveError("no holomorphic differentials for this surface type")


# ----------------------------------------------------------------------
# constrained solves
# ----------------------------------------------------------------------

@dataclass
class LocalCondition:
    """Rows pinning chart coefficients: coeff[k] = target.get(k, 0).

    Orders in [lo, hi] not listed in ``target`` are constrained to zero.
    """

    chart: object
    lo: int
    hi: int
    target: dict


def solve_differential(surface, basis, conditions, extra_rows=(), extra_rhs=(),
                       nullspace=False, rcond=1e-9):
    """Solve for a combination of basis differentials matching local data.

    ``extra_rows``/``extra_rhs`` append dense linear constraints (e.g.
    cycle periods).  With nullspace=True returns a list of kernel
    differentials instead (right singular vectors of small singular
    value).
    """
    cols = len(basis)
    rows = []
    rhs = []
    for cond in conditions:
        coeffs = [chart_coefficients(b, cond.chart, cond.lo, cond.hi) for b in basis]
        block = np.stack(coeffs, axis=1)  # (orders, basis)
        for idx, k in enumerate(range(cond.lo, cond.hi + 1)):
            rows.append(block[idx])
            rhs.append(cond.target.get(k, 0.0))
    for r, v in zip(extra_rows, extra_rhs):
        rows.append(np.asarray(r, dtype=complex))
        rhs.append(v)
    A = np.array(rows, dtype=complex)
    b = np.array(rhs, dtype=complex)
    scale = np.max(np.abs(A), axis=1, keepdims=True)
    scale[scale == 0] = 1.0
    A_s = A / scale
    b_s = b / scale[:, 0]
    if nullspace:
        _, sv, Vh = np.linalg.svd(A_s)
        null = []
        for i in range(cols):
            s = sv[i] if i < len(sv) else 0.0
            if s <= rcond * (sv[0] if len(sv) else 1.0):
                vec = Vh[i].conj()
                null.append(_combine(surface, basis, vec))
        return null
    x, *_ = np.linalg.lstsq(A_s, b_s, rcond=None)
    resid = np.linalg.norm(A_s @ x - b_s)
    if resid > 1e-8 * (1.0 + np.linalg.norm(b_s)):
        return None
    return _combine(surface, basis, x)


def _combine(surface, basis, x):
    terms = []
    for c, b in zip(x, basis):
        if abs(c) > 1e-14:
            terms.extend(t.scaled(c) for t in b.terms)
    return Differential(surface, terms)


# ----------------------------------------------------------------------
# forms with prescribed divisors
# ----------------------------------------------------------------------

def _rational_form_basis(surface, poles):
    """Genus 0: rational differentials with poles bounded by the divisor."""
    basis = [Differential(surface, [Term()])]
    maxdeg = sum(m for _, m in poles)
    for k in range(1, max(0, maxdeg - 3)):
        basis.append(Differential(surface, [Term(kx=k)]))
    for pt, mult in poles:
        for m in range(1, mult + 1):
            basis.append(Differential(surface, [Term(denom=((complex(pt.x), m),))]))
    return basis


def form_with_divisor(surface, zeros, poles, tol=1e-9):
    """Meromorphic differential with prescribed zeros and pole bounds.

    ``zeros``: list of (point, multiplicity) where the form must vanish
    to at least that order.  ``poles``: list of (point, multiplicity)
    bounding the polar part.  Returns a certified Differential (scaled so
    its largest coefficient is 1) or None when no such form exists.
    """
    if isinstance(surface, RationalSurface):
        basis = _rational_form_basis(surface, poles)
    else:
        basis = _cover_form_basis(surface, poles)
    conditions = []
    polepts = {id(p): (p, m) for p, m in poles}
    for pt, mult in zeros:
        ch = surface.chart(pt)
        conditions.append(LocalCondition(ch, 0, mult - 1, {}))
    for pt, mult in poles:
        ch = surface.chart(pt)
        # forbid pole orders worse than prescribed
        conditions.append(LocalCondition(ch, -mult - 2, -mult - 1, {}))
    sols = solve_differential(surface, basis, conditions, nullspace=True)
    for cand in sols:
        cand = _normalize(cand)
        if _certify_divisor(cand, zeros, poles, tol):
            return cand
    return None


def _normalize(diff):
    big = max(abs(t.coeff) for t in diff.terms) if diff.terms else 1.0
    return diff.scaled(1.0 / big)


def _certify_divisor(diff, zeros, poles, tol):
    try:
        for pt, mult in zeros:
            ch = diff.surface.chart(pt)
            c = chart_coefficients(diff, ch, -2, mult)
            scale = max(np.max(np.abs(c)), 1e-30)
            if np.max(np.abs(c[: 2 + mult])) > tol * scale:
                return False
        for pt, mult in poles:
            ch = diff.surface.chart(pt)
            c = chart_coefficients(diff, ch, -mult - 2, 0)
            scale = max(np.max(np.abs(c)), 1e-30)
            if np.max(np.abs(c[:2])) > tol * scale:
                return False
    except (NumericsError, CurveError):
        return False
    return True


def _cover_form_basis(surface, poles):
    """Spanning family with poles bounded by the prescribed divisor.

    Terms x^k * {1, y^-1, z^-1, (yz)^-1, z, y^-1 z} / prod(x - r)^m with
    the x-denominator collecting the base projections of the poles, then
    filtered by a numeric order check at every relevant point so that
    only admissible terms enter the linear solve.
    """
    if isinstance(surface, HyperellipticSurface):
        sheet_powers = [(0, 0), (-1, 0)]
    else:
        sheet_powers = [(0, 0), (-1, 0), (0, -1), (-1, -1), (0, 1), (-1, 1)]
    dens = {}
    for pt, mult in poles:
        if pt.at_infinity:
            continue
        base = complex(pt.x)
        key = min(dens, key=lambda r: abs(r - base)) if dens else None
        if key is not None and abs(key - base) < 1e-9:
            dens[key] = max(dens[key], mult)
        else:
            dens[base] = mult
    denom = tuple(sorted(dens.items(), key=lambda kv: (kv[0].real, kv[0].imag)))
    g = surface.genus
    kmax = 2 * g + sum(m for _, m in denom) + 2
    basis = []
    for py, pz in sheet_powers:
        if pz != 0 and surface.nsheets == 2:
            continue
        for k in range(kmax + 1):
            basis.append(Differential(surface, [Term(kx=k, py=py, pz=pz, denom=denom)]))
            basis.append(Differential(surface, [Term(kx=k, py=py, pz=pz)]))
    # numeric admissibility filter: no poles outside the allowed set
    allowed = _allowed_orders(surface, poles)
    keep = []
    for b in basis:
        ok = True
        for ch, mmax in allowed:
            try:
                o = order_at(b, ch.center, search=(-6, 1), chart=ch)
            except (NumericsError, CurveError):
                ok = False
                break
            if o < -mmax:
                ok = False
                break
        if ok:
            keep.append(b)
    # de-duplicate identical combinations cheaply by structure
    seen = set()
    out = []
    for b in keep:
        t = b.terms[0]
        key = (t.kx, t.py, t.pz, t.denom)
        if key not in seen:
            seen.add(key)
            out.append(b)
    return out


def _allowed_orders(surface, poles):
    """Charts at every point where spurious poles could appear."""
    out = []
    pole_map = []
    for pt, mult in poles:
        pole_map.append((pt, mult))
    def max_at(pt):
        for q, m in pole_map:
            if q.close_to(pt, 1e-8):
                return m
        return 0
    if isinstance(surface, HyperellipticSurface):
        for eps in (+1, -1):
            p = surface.infinity(eps)
            out.append((surface.chart(p), max_at(p)))
        for r in surface.branch_points():
            p = surface.lift(r, np.sqrt(surface.Nval(complex(r)) + 0j) + 0j)
            p = surface.both_lifts(r)[0]
            out.append((surface.chart(p), max_at(p)))
    else:
        for ey in (+1, -1):
            for ez in (+1, -1):
                p = surface.infinity(ey, ez)
                out.append((surface.chart(p), max_at(p)))
        for sp in surface.special_points():
            if sp.flip_y and sp.flip_z:
                m = np.sqrt(surface._yz_limit_sq(sp.x))
                for w in (m, -m):
                    p = surface.pole_point(sp.x, w)
                    out.append((surface.chart(p), max_at(p)))
            elif sp.flip_y:
                zref = np.sqrt(surface.Rval(complex(sp.x)))
                for zs in (zref, -zref):
                    pp = _branch_pt(surface, sp.x, zs)
                    out.append((surface.chart(pp), max_at(pp)))
            else:
                yref = np.sqrt(surface.Pval(complex(sp.x)))
                for ys in (yref, -yref):
                    pp = _zbranch_pt(surface, sp.x, ys)
                    out.append((surface.chart(pp), max_at(pp)))
    # base projections of finite poles also need a cap on the other sheets
    for pt, mult in poles:
        if pt.at_infinity or pt.inf:
            continue
        for other in _fiber_mates(surface, pt):
            out.append((surface.chart(other), max_at(other)))
    return out


def _branch_pt(surface, x0, z):
    from .models import Pt
    return Pt(complex(x0), 0j, complex(z))


def _zbranch_pt(surface, x0, y):
    from .models import Pt
    return Pt(complex(x0), complex(y), 0j)


def _fiber_mates(surface, pt):
    if isinstance(surface, HyperellipticSurface):
        return [q for q in surface.both_lifts(pt.x) if not q.close_to(pt, 1e-8)]
    return [q for q in surface.all_lifts(pt.x) if not q.close_to(pt, 1e-8)]
