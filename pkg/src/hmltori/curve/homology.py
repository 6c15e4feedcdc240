"""Homology of sheeted covers of the x-line.

Candidate cycles are stadium-shaped loops around pairs of nearby
special points, lifted to the surface at every admissible starting sheet
(loops whose monodromy is nontrivial are traversed twice at two slightly
different widths so they close).  Intersection numbers are read off
combinatorially from transversal crossings of the base polylines,
comparing sheet records at each crossing.  An integer congruence
transformation then produces a standard symplectic basis; the pairing is
verified to be exactly the standard one.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..numerics import Segment, arc, line
from .models import CurveError, SheetTrackingError

__all__ = ["Loop", "Cycle", "HomologyError", "homology_basis", "intersection_matrix"]

_NODES_PER_SEG = 48


class HomologyError(CurveError):
    pass


@dataclass
class Loop:
    """Closed lifted contour: analytic segments + sheet values on nodes."""

    surface: object
    segments: list            # Segment objects, traversed in order
    nodes: np.ndarray         # base points, nodes[0] == nodes[-1]
    ys: np.ndarray            # sheet values along nodes
    zs: np.ndarray | None
    label: str = ""

    def node_count(self):
        return len(self.nodes)

    def reversed_values(self):
        zs = None if self.zs is None else self.zs[::-1]
        return Loop(self.surface, [ _reverse_segment(s) for s in reversed(self.segments)],
                    self.nodes[::-1], self.ys[::-1], zs, self.label + "~")


def _reverse_segment(seg: Segment) -> Segment:
    if seg.kind == "line":
        return line(seg.b, seg.a)
    return arc(seg.a, seg.radius, seg.t1, seg.t0)


def _capsule_segments(p, q, width):
    """Stadium contour around the segment [p, q], counterclockwise."""
    d = q - p
    L = abs(d)
    if L < 1e-12:
        return [arc(p, width, t, t + np.pi / 2) for t in
                (-np.pi / 2, 0.0, np.pi / 2, np.pi)]
    e = d / L
    n = 1j * e  # left normal
    a0 = np.angle(-n)
    return [
        line(p - n * width, q - n * width),
        arc(q, width, a0, a0 + np.pi),
        line(q + n * width, p + n * width),
        arc(p, width, a0 + np.pi, a0 + 2 * np.pi),
    ]


def _sample_segments(segments, per_seg=_NODES_PER_SEG):
    pts = []
    for k, seg in enumerate(segments):
        t = np.linspace(0.0, 1.0, per_seg + 1)
        p = seg.point(t)
        pts.append(p if k == 0 else p[1:])
    return np.concatenate(pts)


def lift_loop(surface, segments, start_y, start_z, label="", second_pass=None):
    """Continue sheets around the contour; traverse twice if not closed.

    ``second_pass`` supplies a slightly widened copy of the contour used
    for the second traversal so the two passes stay transversal to other
    loops without overlapping each other.
    """
    nodes = _sample_segments(segments)
    ys, zs = surface.values_along(nodes, (start_y, start_z))
    def closed(ys, zs):
        oky = abs(ys[-1] - ys[0]) < 1e-6 * (1 + abs(ys[0]))
        okz = zs is None or abs(zs[-1] - zs[0]) < 1e-6 * (1 + abs(zs[0]))
        return oky and okz
    if closed(ys, zs):
        segs = list(segments)
    else:
        if second_pass is None:
            raise HomologyError("loop is open and no second pass was supplied")
        start1 = segments[0].start
        start2 = second_pass[0].start
        bridge_in = [line(start1, start2)]
        bridge_out = [line(start2, start1)]
        segs = list(segments) + bridge_in + list(second_pass) + bridge_out
        nodes = _sample_segments(segs)
        ys, zs = surface.values_along(nodes, (start_y, start_z))
        if not closed(ys, zs):
            raise HomologyError("loop does not close after two traversals")
    nodes[-1] = nodes[0]
    ys[-1] = ys[0]
    if zs is not None:
        zs[-1] = zs[0]
    return Loop(surface, segs, nodes, ys, zs, label)


# ----------------------------------------------------------------------
# candidate generation
# ----------------------------------------------------------------------

def _rectangle(x_lo, x_hi, y_lo, y_hi):
    c = [x_lo + 1j * y_lo, x_hi + 1j * y_lo, x_hi + 1j * y_hi, x_lo + 1j * y_hi]
    return [line(c[0], c[1]), line(c[1], c[2]), line(c[2], c[3]), line(c[3], c[0])]


def _range_rectangles(xs, axis, margin_scale):
    """Rectangles enclosing contiguous sorted ranges along one axis.

    Returns list of (segments, enclosed-index-set).  Range boundaries
    fall only between strictly separated coordinate groups.
    """
    n = len(xs)
    coords = [x.real if axis == 0 else x.imag for x in xs]
    other = [x.imag if axis == 0 else x.real for x in xs]
    order = sorted(range(n), key=lambda i: coords[i])
    cuts = [k for k in range(n - 1)
            if coords[order[k + 1]] - coords[order[k]] > 1e-9]
    out = []
    count = 0
    for ci in range(len(cuts) + 1):
        for cj in range(ci, len(cuts)):
            i0 = 0 if ci == 0 else cuts[ci - 1] + 1
            j0 = cuts[cj]
            members = order[i0: j0 + 1]
            if len(members) == n:
                continue
            count += 1
            lo_edge = (min(coords) - (0.45 + 0.11 * count) * margin_scale
                       if i0 == 0 else
                       0.5 * (coords[order[i0 - 1]] + coords[order[i0]]))
            hi_edge = 0.5 * (coords[order[j0]] + coords[order[j0 + 1]])
            h = (0.5 + 0.17 * count) * margin_scale
            lo = min(other) - h
            hi = max(other) + h
            if axis == 0:
                segs = _rectangle(lo_edge, hi_edge, lo, hi)
            else:
                segs = _rectangle(lo, hi, lo_edge, hi_edge)
            out.append((segs, set(members)))
    return out


def candidate_loops(surface):
    """Candidate cycles: capsules around consecutive special-point pairs
    (alternating widths) plus prefix rectangles in both orientations, all
    lifted at every sheet.  The mixed geometry guarantees transversal
    crossings so the intersection pairing has full rank.
    """
    sp = surface.special_points()
    xs = [s.x for s in sp]
    if len(xs) < 2:
        return []
    order = sorted(range(len(xs)), key=lambda i: (xs[i].real, xs[i].imag))
    pairs = [(order[i], order[i + 1]) for i in range(len(order) - 1)]
    scale = max(1e-3, max(abs(a - b) for a in xs for b in xs) / max(1, len(xs) - 1))

    contours = []  # (segs, segs2-or-None, label)
    for k, (i, j) in enumerate(pairs):
        p, q = xs[i], xs[j]
        others = np.array([x for m, x in enumerate(xs) if m not in (i, j)])
        width = _safe_width(p, q, others)
        if width is None:
            continue
        width *= 0.34 if k % 2 == 0 else 0.62
        segs = _capsule_segments(p, q, width)
        segs2 = _capsule_segments(p, q, width * 1.27)
        if not _encloses_exactly(segs, [p, q], others):
            continue
        if not _encloses_exactly(segs2, [p, q], others):
            segs2 = None
        contours.append((segs, segs2, f"C{i}-{j}"))
    for axis in (0, 1):
        for segs, inside_idx in _range_rectangles(xs, axis, scale):
            inside = [xs[i] for i in inside_idx]
            outside = [xs[i] for i in range(len(xs)) if i not in inside_idx]
            if not _encloses_exactly(segs, inside, outside):
                continue
            nodes = _sample_segments(segs, 8)
            grow = [_grow_rectangle(segs, 0.08 * scale)]
            segs2 = grow[0] if _encloses_exactly(grow[0], inside, outside) else None
            contours.append((segs, segs2, f"R{axis}.{len(inside_idx)}"))

    loops = []
    for segs, segs2, lab in contours:
        anchor = complex(_sample_segments(segs, 8)[0])
        for sy, sz in _sheet_starts(surface, anchor):
            try:
                loops.append(lift_loop(surface, segs, sy, sz,
                                       label=f"{lab}#{len(loops)}",
                                       second_pass=segs2))
            except (HomologyError, SheetTrackingError):
                continue
    return loops


def _grow_rectangle(segs, pad):
    pts = [s.a for s in segs]
    xs = [p.real for p in pts]
    ys = [p.imag for p in pts]
    return _rectangle(min(xs) - pad, max(xs) + pad, min(ys) - pad, max(ys) + pad)


def _sheet_starts(surface, x):
    if surface.nsheets == 2:
        s = np.sqrt(surface.Nval(complex(x)))
        return [(s, None), (-s, None)]
    ry = np.sqrt(surface.Pval(complex(x)))
    rz = np.sqrt(surface.Rval(complex(x)))
    return [(sy * ry, sz * rz) for sy in (1, -1) for sz in (1, -1)]


def _safe_width(p, q, others):
    if len(others) == 0:
        return abs(q - p) * 0.5 + 0.5
    d = q - p
    L = abs(d)
    if L < 1e-9:
        return None
    e = d / L
    # distance from each other point to the segment [p, q]
    best = np.inf
    for o in others:
        w = (o - p) / e
        t = np.clip(w.real, 0.0, L)
        dist = abs(o - (p + t * e))
        best = min(best, dist)
    if best < 1e-6:
        return None
    return best


def _winding(nodes, point):
    v = nodes - point
    dang = np.angle(v[1:] / v[:-1])
    return int(round(np.sum(dang) / (2 * np.pi)))


def _encloses_exactly(segments, inside, outside):
    nodes = _sample_segments(segments, 24)
    try:
        for p in inside:
            if _winding(nodes, p) != 1:
                return False
        for p in outside:
            if _winding(nodes, p) != 0:
                return False
    except (ZeroDivisionError, FloatingPointError):
        return False
    return True


# ----------------------------------------------------------------------
# intersections
# ----------------------------------------------------------------------

def _same_sheet(loopA, iA, tA, loopB, iB, tB):
    yA = loopA.ys[iA] * (1 - tA) + loopA.ys[iA + 1] * tA
    yB = loopB.ys[iB] * (1 - tB) + loopB.ys[iB + 1] * tB
    if abs(yA - yB) > 0.5 * max(abs(yA + yB), 1e-12):
        return False
    if abs(yA - yB) > 0.15 * max(abs(yA + yB), 1e-12):
        raise HomologyError("ambiguous sheet comparison at a crossing")
    if loopA.zs is not None:
        zA = loopA.zs[iA] * (1 - tA) + loopA.zs[iA + 1] * tA
        zB = loopB.zs[iB] * (1 - tB) + loopB.zs[iB + 1] * tB
        if abs(zA - zB) > 0.5 * max(abs(zA + zB), 1e-12):
            return False
        if abs(zA - zB) > 0.15 * max(abs(zA + zB), 1e-12):
            raise HomologyError("ambiguous sheet comparison at a crossing")
    return True


def loop_intersection(loopA, loopB):
    """Signed count of surface crossings from the base crossing records."""
    a = loopA.nodes
    b = loopB.nodes
    total = 0
    # bounding-box prefilter per segment
    ax, ay = a.real, a.imag
    bx, by = b.real, b.imag
    for i in range(len(a) - 1):
        p1, p2 = a[i], a[i + 1]
        lox, hix = min(p1.real, p2.real), max(p1.real, p2.real)
        loy, hiy = min(p1.imag, p2.imag), max(p1.imag, p2.imag)
        mask = ~((np.maximum(bx[:-1], bx[1:]) < lox) | (np.minimum(bx[:-1], bx[1:]) > hix)
                 | (np.maximum(by[:-1], by[1:]) < loy) | (np.minimum(by[:-1], by[1:]) > hiy))
        for j in np.nonzero(mask)[0]:
            q1, q2 = b[j], b[j + 1]
            d1, d2 = p2 - p1, q2 - q1
            den = (d1 * np.conj(d2)).imag
            if abs(den) < 1e-14 * abs(d1) * abs(d2):
                continue
            w = q1 - p1
            tA = (w * np.conj(d2)).imag / den
            tB = (w * np.conj(d1)).imag / den
            if not (0.0 <= tA < 1.0 and 0.0 <= tB < 1.0):
                continue
            if _same_sheet(loopA, i, tA, loopB, j, tB):
                total += 1 if den < 0 else -1
    return total


def intersection_matrix(loops):
    n = len(loops)
    M = np.zeros((n, n), dtype=int)
    for i in range(n):
        for j in range(i + 1, n):
            v = loop_intersection(loops[i], loops[j])
            M[i, j] = v
            M[j, i] = -v
    return M


# ----------------------------------------------------------------------
# integer symplectic reduction
# ----------------------------------------------------------------------

def symplectic_reduce(M):
    """U with U M U^T = J + 0, J the standard symplectic blocks.

    Raises if the lattice spanned is not unimodular for the pairing
    (block divisors != 1), which signals missing generators.
    """
    M = np.array(M, dtype=object)
    n = M.shape[0]
    U = np.eye(n, dtype=object)
    done = 0
    while True:
        nz = [(abs(M[i, j]), i, j)
              for i in range(done, n) for j in range(done, n) if M[i, j] != 0]
        if not nz:
            break
        _, pi, pj = min(nz)
        _swap(M, U, pi, done)
        if pj == done:
            pj = pi  # the swap moved the pivot's partner
        _swap(M, U, pj, done + 1)
        # Euclidean clearing of the pivot row/column pair
        for _ in range(10_000):
            piv = M[done, done + 1]
            if piv < 0:
                _negate(M, U, done)
                continue
            for k in range(done + 2, n):
                if M[done, k] != 0:
                    _addrow(M, U, k, done + 1, M[done, k] // piv)
                if M[done + 1, k] != 0:
                    _addrow(M, U, k, done, -(M[done + 1, k] // piv))
            rem = [(abs(M[done, k]), done + 1, k) for k in range(done + 2, n) if M[done, k] != 0]
            rem += [(abs(M[done + 1, k]), done, k) for k in range(done + 2, n) if M[done + 1, k] != 0]
            if not rem:
                break
            # all remainders are < piv: bring the smallest in as new pivot
            _, slot, k = min(rem)
            _swap(M, U, k, slot)
        else:
            raise HomologyError("symplectic reduction did not terminate")
        if M[done, done + 1] != 1:
            raise HomologyError(
                f"candidate loops span an index-{int(M[done, done + 1])} sublattice; "
                "more generators are needed")
        done += 2
    g = done // 2
    return np.array(U[:done, :].tolist(), dtype=int), g


def _swap(M, U, i, j):
    if i == j:
        return
    M[[i, j], :] = M[[j, i], :]
    M[:, [i, j]] = M[:, [j, i]]
    U[[i, j], :] = U[[j, i], :]


def _negate(M, U, i):
    M[i, :] = -M[i, :]
    M[:, i] = -M[:, i]
    U[i, :] = -U[i, :]


def _addrow(M, U, k, src, q):
    """row_k -= q*row_src (and symmetric column op)."""
    if q == 0:
        return
    M[k, :] = M[k, :] - q * M[src, :]
    M[:, k] = M[:, k] - q * M[:, src]
    U[k, :] = U[k, :] - q * U[src, :]


@dataclass
class Cycle:
    """Integer combination of lifted loops (a homology class with
    chosen representatives)."""

    combo: list  # list of (int coeff, Loop)

    def __iter__(self):
        return iter(self.combo)


def homology_basis(surface):
    """Standard symplectic basis (a_1..a_g, b_1..b_g) as Cycle combos."""
    loops = candidate_loops(surface)
    if not loops:
        if surface.genus == 0:
            return [], [], loops
        raise HomologyError("no candidate loops found")
    M = intersection_matrix(loops)
    U, g = symplectic_reduce(M)
    if g != surface.genus:
        raise HomologyError(
            f"symplectic rank {g} does not match genus {surface.genus}")
    a_cycles, b_cycles = [], []
    for k in range(g):
        arow = U[2 * k]
        brow = U[2 * k + 1]
        a_cycles.append(Cycle([(int(c), loops[i]) for i, c in enumerate(arow) if c != 0]))
        b_cycles.append(Cycle([(int(c), loops[i]) for i, c in enumerate(brow) if c != 0]))
    # verify the combinatorial pairing is exactly symplectic
    J = U @ M @ U.T
    want = np.zeros_like(J)
    for k in range(g):
        want[2 * k, 2 * k + 1] = 1
        want[2 * k + 1, 2 * k] = -1
    if not np.array_equal(J, want):
        raise HomologyError("reduced intersection pairing is not standard")
    return a_cycles, b_cycles, loops
