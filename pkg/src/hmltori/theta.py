"""Riemann theta function with certified lattice truncation (small genus).

theta(z | B) = sum over m in Z^g of exp(pi i <Bm,m> + 2 pi i <m,z>)

B must be symmetric with positive definite imaginary part.  Truncation
follows the Gaussian tail bound: lattice points are kept while the
quadratic form pi <Im B (m+c), (m+c)> stays below ln(1/tol) plus a safety
margin, where c recenters the sum for the imaginary part of z.  The
enumeration is symmetric in m -> -m so evenness holds bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["InvalidRiemannMatrixError", "RiemannMatrix", "theta", "theta_quasi_factor", "theta_many"]

_SAFETY = 5.0


class InvalidRiemannMatrixError(ValueError):
    pass


@dataclass(frozen=True)
class RiemannMatrix:
    """Validated period matrix: symmetric, Im part positive definite."""

    entries: np.ndarray

    def __post_init__(self):
        B = np.atleast_2d(np.asarray(self.entries, dtype=complex))
        if B.shape[0] != B.shape[1]:
            raise InvalidRiemannMatrixError("period matrix must be square")
        asym = np.max(np.abs(B - B.T))
        if asym > 1e-10 * (1.0 + np.max(np.abs(B))):
            raise InvalidRiemannMatrixError(f"period matrix not symmetric (defect {asym:.2e})")
        try:
            np.linalg.cholesky(B.imag)
        except np.linalg.LinAlgError:
            raise InvalidRiemannMatrixError("imaginary part is not positive definite") from None
        object.__setattr__(self, "entries", B)

    @property
    def g(self):
        return self.entries.shape[0]

    def __eq__(self, other):
        return isinstance(other, RiemannMatrix) and np.array_equal(self.entries, other.entries)

    def __hash__(self):
        return hash(self.entries.tobytes())


def _as_matrix(B) -> RiemannMatrix:
    return B if isinstance(B, RiemannMatrix) else RiemannMatrix(B)


def _lattice(B: RiemannMatrix, bound: float, center: np.ndarray):
    """Symmetric set of integer points with pi*q(m +- center) <= bound."""
    Y = B.entries.imag
    g = B.g
    evals, evecs = np.linalg.eigh(Y)
    rad = np.sqrt(bound / (np.pi * evals[0]))
    box = int(np.floor(rad + np.max(np.abs(center)))) + 1
    ranges = [np.arange(-box, box + 1)] * g
    grid = np.stack(np.meshgrid(*ranges, indexing="ij"), axis=-1).reshape(-1, g)
    qp = np.einsum("ij,jk,ik->i", grid + center, Y, grid + center)
    qm = np.einsum("ij,jk,ik->i", grid - center, Y, grid - center)
    keep = (np.pi * np.minimum(qp, qm)) <= bound
    pts = grid[keep]
    # deterministic order, pairing m with -m adjacently: sort by (|m|^2, lex)
    norms = np.sum(pts * pts, axis=1)
    order = np.lexsort(tuple(pts[:, k] for k in range(g - 1, -1, -1)) + (norms,))
    return pts[order]


def _points_for(B: RiemannMatrix, z_im_scale: np.ndarray, tol: float):
    Y = B.entries.imag
    center = np.linalg.solve(Y, z_im_scale)
    bound = np.log(1.0 / tol) + _SAFETY + np.pi * float(center @ Y @ center)
    return _lattice(B, bound, center)


def theta(z, B, tol: float = 1e-10):
    """Value of the Riemann theta function at z in C^g.

    The omitted tail is bounded by ~tol relative to the Gaussian envelope.
    Deterministic for fixed inputs.
    """
    B = _as_matrix(B)
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    if z.shape != (B.g,):
        raise ValueError(f"z must have length {B.g}")
    if not (0 < tol <= 1e-4):
        raise ValueError("tol must lie in (0, 1e-4]")
    pts = _points_for(B, -z.imag, tol)
    return _theta_sum(z, B, pts)


def _theta_sum(z, B, pts):
    expo = (1j * np.pi * np.einsum("ij,jk,ik->i", pts, B.entries, pts)
            + 2j * np.pi * pts @ z)
    terms = np.exp(expo)
    # pair m and -m before accumulating: exact evenness under z -> -z
    key = {tuple(p): i for i, p in enumerate(pts)}
    seen = np.zeros(len(pts), dtype=bool)
    total = 0j
    for i, p in enumerate(pts):
        if seen[i]:
            continue
        j = key.get(tuple(-p))
        if j is None or j == i:
            total += terms[i]
            seen[i] = True
        else:
            total += terms[i] + terms[j]
            seen[i] = True
            seen[j] = True
    return complex(total)


def theta_many(zs, B, tol: float = 1e-10):
    """Theta at many points with one shared (larger) truncation set."""
    B = _as_matrix(B)
    zs = np.asarray(zs, dtype=complex)
    if zs.ndim == 1:
        zs = zs[None, :]
    worst = zs.imag[np.argmax(np.linalg.norm(zs.imag, axis=1))]
    pts = _points_for(B, -worst, tol)
    # include truncation sets of every point: union via per-point centers
    Y = B.entries.imag
    bound = np.log(1.0 / tol) + _SAFETY
    allpts = {tuple(p) for p in pts}
    for z in zs:
        c = np.linalg.solve(Y, -z.imag)
        b = bound + np.pi * float(c @ Y @ c)
        for p in _lattice(B, b, c):
            allpts.add(tuple(p))
    pts = np.array(sorted(allpts), dtype=float)
    quad = 1j * np.pi * np.einsum("ij,jk,ik->i", pts, B.entries, pts)
    out = np.exp(quad[None, :] + 2j * np.pi * (zs @ pts.T))
    return out.sum(axis=1)


def theta_quasi_factor(z, m, B):
    """exp(-pi i <Bm,m> - 2 pi i <m,z>): theta(z + Bm) = factor * theta(z)."""
    B = _as_matrix(B)
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    m = np.atleast_1d(np.asarray(m))
    if not np.allclose(m, np.round(m.real)):
        raise ValueError("m must be an integer vector")
    m = np.round(m.real).astype(float)
    return complex(np.exp(-1j * np.pi * (m @ B.entries @ m) - 2j * np.pi * (m @ z)))
