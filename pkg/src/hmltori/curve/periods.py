"""Periods, Abel map and second-kind differentials.

Quadrature along lifted contours evaluates vector integrands (all
differentials at once) with Gauss rules whose sheet choice is referenced
to a dense node skeleton carried by every lifted path or loop.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..numerics import Segment, arc, line
from ..theta import RiemannMatrix, theta
from .differentials import (Differential, LocalCondition, Term,
                            chart_coefficients, holomorphic_candidates,
                            solve_differential)
from .homology import Cycle, Loop, homology_basis, _sample_segments, _NODES_PER_SEG
from .models import CurveError, Pt

__all__ = ["PeriodData", "period_matrix", "abel_map", "second_kind", "PathError"]


class PathError(CurveError):
    pass


# ----------------------------------------------------------------------
# vector quadrature along lifted contours
# ----------------------------------------------------------------------

def _invert_segment(seg: Segment, x):
    if seg.kind == "line":
        d = seg.b - seg.a
        return ((x - seg.a) / d).real
    span = seg.t1 - seg.t0
    ang = np.angle((x - seg.a) / np.exp(1j * seg.t0))  # in (-pi, pi]
    t = ang / span
    # choose the representative inside [0, 1]
    period = 2 * np.pi / abs(span)
    while t < -1e-9:
        t += period
    while t > 1.0 + 1e-9:
        t -= period
    return float(np.clip(t, 0.0, 1.0))


def _lifted_integrand(surface, seg, nodes_block, ys_block, zs_block, diffs):
    """Integrand f(x) -> vector of densities * dx, sheet from skeleton."""
    nseg = len(nodes_block) - 1

    def f(x):
        t = _invert_segment(seg, x)
        i = int(np.clip(round(t * nseg), 0, nseg))
        yref = ys_block[i]
        ry = np.sqrt(surface.Pval(x)) if hasattr(surface, "Pval") else np.sqrt(surface.Nval(x))
        y = ry if abs(ry - yref) <= abs(ry + yref) else -ry
        z = None
        if zs_block is not None:
            rz = np.sqrt(surface.Rval(x))
            zref = zs_block[i]
            z = rz if abs(rz - zref) <= abs(rz + zref) else -rz
        return np.array([d.density(x, y, z) for d in diffs])

    return f


def _gauss_vec(f, seg, u0, u1, n, cache={}):
    from scipy.special import roots_legendre
    if n not in cache:
        xg, wg = roots_legendre(n)
        cache[n] = (0.5 * (xg + 1.0), 0.5 * wg)
    xs, ws = cache[n]
    ts = u0 + (u1 - u0) * xs
    pts = seg.point(ts)
    der = seg.deriv(ts)
    acc = None
    for p, d, w in zip(pts, der, ws):
        v = f(complex(p)) * d * w
        acc = v if acc is None else acc + v
    return (u1 - u0) * acc


def _adaptive_vec(f, seg, u0, u1, tol, depth=0):
    c = _gauss_vec(f, seg, u0, u1, 12)
    fine = _gauss_vec(f, seg, u0, u1, 24)
    err = np.max(np.abs(fine - c))
    if err <= tol or depth >= 24:
        return fine
    um = 0.5 * (u0 + u1)
    return (_adaptive_vec(f, seg, u0, um, 0.5 * tol, depth + 1)
            + _adaptive_vec(f, seg, um, u1, 0.5 * tol, depth + 1))


def integrate_on_loop(loop: Loop, diffs, tol=1e-11):
    """Vector of loop integrals of the given differentials."""
    total = np.zeros(len(diffs), dtype=complex)
    per = tol / max(1, len(loop.segments))
    N = _NODES_PER_SEG
    for k, seg in enumerate(loop.segments):
        block = slice(k * N, (k + 1) * N + 1)
        f = _lifted_integrand(loop.surface, seg, loop.nodes[block],
                              loop.ys[block], None if loop.zs is None else loop.zs[block],
                              diffs)
        total += _adaptive_vec(f, seg, 0.0, 1.0, per)
    return total


def integrate_on_cycle(cycle: Cycle, diffs, tol=1e-11, cache=None):
    total = np.zeros(len(diffs), dtype=complex)
    for coeff, loop in cycle:
        if cache is not None and id(loop) in cache:
            v = cache[id(loop)]
        else:
            v = integrate_on_loop(loop, diffs, tol)
            if cache is not None:
                cache[id(loop)] = v
        total += coeff * v
    return total


# ----------------------------------------------------------------------
# routed, sheet-tracked open paths
# ----------------------------------------------------------------------

@dataclass
class LiftedPath:
    surface: object
    segments: list
    nodes: np.ndarray
    ys: np.ndarray
    zs: np.ndarray | None

    @property
    def end_values(self):
        z = None if self.zs is None else self.zs[-1]
        return self.ys[-1], z


def _route(x0, x1, obstacles, clearance, depth=0):
    seg = line(x0, x1)
    d = x1 - x0
    L = abs(d)
    if L < 1e-13:
        return []
    e = d / L
    worst = None
    for o in obstacles:
        if min(abs(o - x0), abs(o - x1)) < 1.4 * clearance:
            continue  # endpoint-adjacent: approach is deliberate
        w = (o - x0) / e
        t = np.clip(w.real, 0.0, L)
        foot = x0 + t * e
        dist = abs(o - foot)
        if dist < clearance and (worst is None or dist < worst[0]):
            worst = (dist, o, foot)
    if worst is None or depth > 12:
        return [seg]
    _, o, foot = worst
    n = foot - o
    n = n / abs(n) if abs(n) > 1e-12 else 1j * e
    mid = o + n * 2.2 * clearance
    return (_route(x0, mid, obstacles, clearance, depth + 1)
            + _route(mid, x1, obstacles, clearance, depth + 1))


def _lasso(x_from, target, obstacles, clearance):
    """Out to a circle around ``target``, once around, and back."""
    others = [o for o in obstacles if abs(o - target) > 1e-9]
    r = clearance
    approach = target + r
    out = _route(x_from, approach, others, clearance)
    a0 = 0.0
    loop = [arc(target, r, a0, a0 + 2 * np.pi)]
    back = [Segment("line", a=s.b, b=s.a) if s.kind == "line" else arc(s.a, s.radius, s.t1, s.t0)
            for s in reversed(out)]
    return out + loop + back


def _continue_segments(surface, segments, start_vals):
    nodes = _sample_segments(segments)
    ys, zs = surface.values_along(nodes, start_vals)
    return nodes, ys, zs


def lifted_path(surface, start_pt: Pt, end_pt: Pt, clearance=None):
    """Path on the surface from start to end (both finite, off-special)."""
    sp = [s.x for s in surface.special_points()]
    if clearance is None:
        gaps = [abs(a - b) for i, a in enumerate(sp) for b in sp[i + 1:]]
        clearance = 0.3 * min(gaps) if gaps else 0.5
    segs = _route(start_pt.x, end_pt.x, sp, clearance)
    if not segs:
        segs = [line(start_pt.x, start_pt.x + 1e-12)]  # degenerate same-point path
    start_vals = surface.start_values(start_pt)
    nodes, ys, zs = _continue_segments(surface, segs, start_vals)
    need_y = abs(ys[-1] - end_pt.y) > 1e-6 * (1 + abs(end_pt.y))
    need_z = False
    if zs is not None and end_pt.z is not None:
        need_z = abs(zs[-1] - end_pt.z) > 1e-6 * (1 + abs(end_pt.z))
    if need_y or need_z:
        segs = segs + _repair(surface, end_pt.x, need_y, need_z, sp, clearance)
        nodes, ys, zs = _continue_segments(surface, segs, start_vals)
        if abs(ys[-1] - end_pt.y) > 1e-6 * (1 + abs(end_pt.y)):
            raise PathError("could not land on the requested y sheet")
        if zs is not None and end_pt.z is not None and \
                abs(zs[-1] - end_pt.z) > 1e-6 * (1 + abs(end_pt.z)):
            raise PathError("could not land on the requested z sheet")
    return LiftedPath(surface, segs, nodes, ys, zs)


def _repair(surface, x_here, need_y, need_z, obstacles, clearance):
    """Lassos flipping exactly the requested sheet combination."""
    specials = surface.special_points()

    def find(fy, fz):
        for s in specials:
            if s.flip_y == fy and s.flip_z == fz:
                return s.x
        return None

    y_only, z_only, both = find(True, False), find(False, True), find(True, True)
    plan = []  # special points to lasso, flips compose
    if need_y and need_z:
        plan = [both] if both is not None else [y_only, z_only]
    elif need_y:
        plan = [y_only] if y_only is not None else [both, z_only]
    elif need_z:
        plan = [z_only] if z_only is not None else [both, y_only]
    if any(t is None for t in plan):
        raise PathError("no special points available to fix the sheet")
    segs = []
    for t in plan:
        segs += _lasso(x_here, t, obstacles, clearance)
    return segs


def integrate_on_path(path: LiftedPath, diffs, tol=1e-11):
    total = np.zeros(len(diffs), dtype=complex)
    per = tol / max(1, len(path.segments))
    N = _NODES_PER_SEG
    for k, seg in enumerate(path.segments):
        block = slice(k * N, (k + 1) * N + 1)
        f = _lifted_integrand(path.surface, seg, path.nodes[block],
                              path.ys[block], None if path.zs is None else path.zs[block],
                              diffs)
        total += _adaptive_vec(f, seg, 0.0, 1.0, per)
    return total


# ----------------------------------------------------------------------
# period data
# ----------------------------------------------------------------------

@dataclass
class PeriodData:
    surface: object
    basepoint: Pt
    a_cycles: list
    b_cycles: list
    raw_basis: list            # holomorphic candidates
    norm: np.ndarray           # normalized basis = raw @ norm (columns)
    B: RiemannMatrix
    bvecU: np.ndarray | None = None
    bvecV: np.ndarray | None = None
    checks: dict = field(default_factory=dict)
    _loop_cache: dict = field(default_factory=dict)

    @property
    def g(self):
        return self.B.g

    def normalized_basis(self):
        out = []
        for j in range(self.norm.shape[1]):
            terms = []
            for k, c in enumerate(self.norm[:, j]):
                if abs(c) > 1e-16:
                    terms.extend(t.scaled(c) for t in self.raw_basis[k].terms)
            out.append(Differential(self.surface, terms))
        return out


def period_matrix(surface, basepoint=None, tol=1e-11) -> PeriodData:
    """Normalized period matrix from a combinatorially verified basis."""
    a_cycles, b_cycles, _loops = homology_basis(surface)
    g = surface.genus
    raw = holomorphic_candidates(surface)
    cache = {}
    A = np.zeros((g, g), dtype=complex)
    C = np.zeros((g, g), dtype=complex)
    for i in range(g):
        A[i] = integrate_on_cycle(a_cycles[i], raw, tol, cache)
        C[i] = integrate_on_cycle(b_cycles[i], raw, tol, cache)
    # columns j of `norm` give the normalized basis: int_{a_i} w_j = delta_ij
    condA = np.linalg.cond(A)
    if not np.isfinite(condA) or condA > 1e10:
        raise CurveError("a-period matrix is singular: bad homology basis")
    norm = np.linalg.solve(A, np.eye(g))
    B = C @ norm
    sym = float(np.max(np.abs(B - B.T))) if g else 0.0
    B = 0.5 * (B + B.T)
    Bmat = RiemannMatrix(B)  # validates symmetry (pre-averaged) and Im > 0
    checks = {"symmetry": sym, "im_posdef": True, "a_cond": float(condA)}
    if basepoint is None:
        basepoint = _default_basepoint(surface)
    return PeriodData(surface, basepoint, a_cycles, b_cycles, raw, norm, Bmat,
                      checks=checks, _loop_cache=cache)


def _default_basepoint(surface):
    sp = [s.x for s in surface.special_points()]
    hi = max((abs(x) for x in sp), default=1.0)
    x0 = hi * 1.7 + 0.9
    if hasattr(surface, "Nval"):
        return surface.lift(x0, np.sqrt(surface.Nval(x0 + 0j)))
    return surface.lift(x0, np.sqrt(surface.Pval(x0 + 0j)), np.sqrt(surface.Rval(x0 + 0j)))


# ----------------------------------------------------------------------
# Abel map
# ----------------------------------------------------------------------

def _chart_tail(surface, diffs, chart, t_from, tol=1e-11):
    """Integral along the chart ray from parameter t_from to 0."""
    n = 24
    prev = None
    while n <= 3072:
        # Gauss-Legendre on [0,1] mapped to the ray, walked outward-in
        from scipy.special import roots_legendre
        xg, wg = roots_legendre(n)
        ts = t_from * 0.5 * (xg + 1.0)
        s = chart.samples(np.asarray(ts, dtype=complex))
        vals = np.stack([d.on_samples(s) for d in diffs])
        tot = (vals * wg).sum(axis=1) * 0.5 * t_from
        if prev is not None and np.max(np.abs(tot - prev)) < tol * (1 + np.max(np.abs(tot))):
            return -tot  # from t_from down to 0
        prev = tot
        n *= 2
    return -prev


def abel_map(periods: PeriodData, target: Pt, extra_cycle=None, tol=1e-11,
             diffs=None, return_path=False):
    """Integrals of the normalized basis (or given diffs) from q0 to target.

    ``extra_cycle`` appends a homology cycle to the path (for checking
    lattice shifts).  Non-regular targets (infinity, ramification, sheet
    poles) are reached through their chart: path to an anchor on the
    chart circle plus a tail integral in the local parameter.
    """
    surface = periods.surface
    diffs = diffs if diffs is not None else periods.normalized_basis()
    q0 = periods.basepoint
    anchor = target
    tail = None
    if target.at_infinity or target.inf or _is_ramified(surface, target):
        chart = surface.chart(target)
        t0 = 0.45 * chart.radius
        anchor = chart.point_at(t0)
        tail = _chart_tail(surface, diffs, chart, t0, tol)
    path = lifted_path(surface, q0, anchor)
    vec = integrate_on_path(path, diffs, tol)
    if tail is not None:
        vec = vec + tail
    if extra_cycle is not None:
        vec = vec + integrate_on_cycle(extra_cycle, diffs, tol, periods._loop_cache)
    if return_path:
        return vec, path
    return vec


def _is_ramified(surface, pt):
    if pt.at_infinity or pt.inf:
        return False
    for s in surface.special_points():
        if abs(s.x - pt.x) < 1e-9 * (1 + abs(pt.x)):
            return True
    return False


# ----------------------------------------------------------------------
# second-kind differentials
# ----------------------------------------------------------------------

def _pole_candidates(surface, marked: Pt):
    """Terms able to carry a double pole at the marked point."""
    if hasattr(surface, "Nval"):  # hyperelliptic: marked at infinity
        if not marked.at_infinity:
            c = complex(marked.x)
            den = ((c, 1),)
            den2 = ((c, 2),)
            return [Differential(surface, [Term(py=-1, denom=den)]),
                    Differential(surface, [Term(py=-1, denom=den2)]),
                    Differential(surface, [Term(denom=den)]),
                    Differential(surface, [Term(denom=den2)])]
        g = surface.genus
        return ([Differential(surface, [Term()])]
                + [Differential(surface, [Term(kx=k, py=-1)]) for k in range(g, g + 2)])
    # fibered cover: marked is a sheet pole point over alpha
    alpha = marked.inf[1]
    den1 = ((complex(alpha), 1),)
    den2 = ((complex(alpha), 2),)
    cands = [
        Differential(surface, [Term(py=1, pz=0, denom=den2)]),       # y/(x-a)^2
        Differential(surface, [Term(py=0, pz=-1, denom=den2)]),      # 1/((x-a)^2 z)
        Differential(surface, [Term(py=1, pz=0, denom=den1)]),
        Differential(surface, [Term(py=0, pz=-1, denom=den1)]),
        Differential(surface, [Term(py=1, pz=-1, denom=den1, kx=0)]),
        Differential(surface, [Term(py=-1, pz=-1, denom=den1, kx=0)]),
    ]
    return cands


def second_kind(periods: PeriodData, marked: Pt, principal_scale: complex,
                tol=1e-9):
    """Differential with principal part ``principal_scale * d(1/t)`` at
    ``marked`` (t the chart parameter), zero residue, holomorphic
    elsewhere, and vanishing a-periods.  Returns (differential, b_vector).
    """
    surface = periods.surface
    holo = periods.normalized_basis()
    cands = _pole_candidates(surface, marked)
    basis = holo + cands
    chart = surface.chart(marked)
    # d(1/t) = -dt/t^2
    conditions = [LocalCondition(chart, -2, -1,
                                 {-2: -principal_scale, -1: 0.0})]
    # forbid poles at the partner points sharing the base location
    for other in _partner_points(surface, marked):
        conditions.append(LocalCondition(surface.chart(other), -2, -1, {}))
    rows = []
    rhs = []
    cache = {}
    for cyc in periods.a_cycles:
        row = integrate_on_cycle(cyc, basis, 1e-11, cache)
        rows.append(row)
        rhs.append(0.0)
    sol = solve_differential(surface, basis, conditions, rows, rhs)
    if sol is None:
        raise CurveError("no second-kind differential found")
    # certify the local data
    got = chart_coefficients(sol, chart, -2, -1)
    scale = max(1.0, abs(principal_scale))
    if abs(got[0] + principal_scale) > tol * scale or abs(got[1]) > tol * scale:
        raise CurveError("second-kind principal part failed certification")
    bvec = np.array([integrate_on_cycle(c, [sol], 1e-11)[0] for c in periods.b_cycles])
    return sol, bvec


def _partner_points(surface, marked):
    if hasattr(surface, "Nval"):
        if marked.at_infinity:
            return [surface.infinity(-marked.inf[1])]
        return [q for q in surface.both_lifts(marked.x) if not q.close_to(marked)]
    if marked.inf and marked.inf[0] == "zpole":
        _, alpha, w = marked.inf
        out = [surface.pole_point(alpha, -w)]
        return out
    if marked.at_infinity:
        _, ey, ez = marked.inf
        return [surface.infinity(a, b) for a in (1, -1) for b in (1, -1)
                if (a, b) != (ey, ez)]
    return [q for q in surface.all_lifts(marked.x) if not q.close_to(marked)]


# ----------------------------------------------------------------------
# materialized cycles and the Riemann constant
# ----------------------------------------------------------------------

def materialize_cycle(periods: PeriodData, cycle: Cycle) -> LiftedPath:
    """Closed lifted path through the basepoint representing the cycle.

    Each loop contributes connector + |coeff| traversals + reversed
    connector; connectors cancel in homology, so the class is exact.
    """
    surface = periods.surface
    hub = periods.basepoint
    segs = []
    nodes = [np.array([hub.x])]
    ys = [np.array([hub.y])]
    zs = [np.array([hub.z])] if surface.nsheets == 4 else None
    for coeff, loop in cycle:
        start_pt = Pt(loop.nodes[0], loop.ys[0],
                      None if loop.zs is None else loop.zs[0])
        conn = lifted_path(surface, hub, start_pt)
        run = loop if coeff > 0 else loop.reversed_values()
        for piece in [conn] + [run] * abs(coeff):
            segs += list(piece.segments)
            nodes.append(piece.nodes[1:])
            ys.append(piece.ys[1:])
            if zs is not None:
                zs.append(piece.zs[1:])
        back_segs = [Segment("line", a=s.b, b=s.a) if s.kind == "line"
                     else arc(s.a, s.radius, s.t1, s.t0)
                     for s in reversed(conn.segments)]
        segs += back_segs
        nodes.append(conn.nodes[::-1][1:])
        ys.append(conn.ys[::-1][1:])
        if zs is not None:
            zs.append(conn.zs[::-1][1:])
    return LiftedPath(surface, segs,
                      np.concatenate(nodes), np.concatenate(ys),
                      None if zs is None else np.concatenate(zs))


def _running_prefix(path: LiftedPath, diffs, inner_n=12):
    """Cumulative integrals of ``diffs`` at every skeleton node."""
    from scipy.special import roots_legendre
    xg, wg = roots_legendre(inner_n)
    xg = 0.5 * (xg + 1.0)
    wg = 0.5 * wg
    N = _NODES_PER_SEG
    nn = len(path.nodes)
    prefix = np.zeros((nn, len(diffs)), dtype=complex)
    acc = np.zeros(len(diffs), dtype=complex)
    for k, seg in enumerate(path.segments):
        block = slice(k * N, (k + 1) * N + 1)
        f = _lifted_integrand(path.surface, seg, path.nodes[block],
                              path.ys[block],
                              None if path.zs is None else path.zs[block], diffs)
        tgrid = np.linspace(0.0, 1.0, N + 1)
        for i in range(N):
            t0, t1 = tgrid[i], tgrid[i + 1]
            ts = t0 + (t1 - t0) * xg
            inc = None
            for t, w in zip(ts, wg):
                x = complex(seg.point(t))
                v = f(x) * complex(seg.deriv(t)) * w
                inc = v if inc is None else inc + v
            acc = acc + (t1 - t0) * inc
            prefix[k * N + i + 1] = acc
    return prefix


def riemann_constant(periods: PeriodData, tol=1e-10):
    """Vector of Riemann constants for the basepoint of ``periods``.

    K_j = (1 + B_jj)/2 - sum_{l != j} int_{a_l} w_l(P) A_j(P); defined
    modulo the period lattice (the representative depends on the chosen
    connectors).
    """
    g = periods.g
    basis = periods.normalized_basis()
    B = periods.B.entries
    K = np.array([(1.0 + B[j, j]) / 2.0 for j in range(g)], dtype=complex)
    from scipy.special import roots_legendre
    xg, wg = roots_legendre(16)
    xg = 0.5 * (xg + 1.0)
    wg = 0.5 * wg
    N = _NODES_PER_SEG
    for l in range(g):
        path = materialize_cycle(periods, periods.a_cycles[l])
        prefix = _running_prefix(path, basis)
        contrib = np.zeros(g, dtype=complex)
        for k, seg in enumerate(path.segments):
            block = slice(k * N, (k + 1) * N + 1)
            f = _lifted_integrand(path.surface, seg, path.nodes[block],
                                  path.ys[block],
                                  None if path.zs is None else path.zs[block],
                                  basis)
            tgrid = np.linspace(0.0, 1.0, N + 1)
            for i in range(N):
                t0, t1 = tgrid[i], tgrid[i + 1]
                base_abel = prefix[k * N + i]
                ts = t0 + (t1 - t0) * xg
                inner_acc = np.zeros(g, dtype=complex)
                prev_t = t0
                for t, w in zip(ts, wg):
                    inner_acc = inner_acc + _gauss_vec(f, seg, prev_t, t, 8)
                    prev_t = t
                    vals = f(complex(seg.point(t))) * complex(seg.deriv(t))
                    contrib += (t1 - t0) * w * vals[l] * (base_abel + inner_acc)
        mask = np.array([0.0 if j == l else 1.0 for j in range(g)])
        K -= mask * contrib
    return K
