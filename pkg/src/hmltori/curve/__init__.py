"""Spectral curves: models, homology, periods, Abel maps, differentials."""

from .differentials import (Differential, Term, expansion_at, form_with_divisor,
                            holomorphic_candidates, order_at, residue_at)
from .homology import Cycle, HomologyError, homology_basis, intersection_matrix
from .models import (CurveError, FiberedSurface, HyperellipticSurface, Pt,
                     RationalSurface, branch_points)
from .periods import (PeriodData, abel_map, materialize_cycle, period_matrix,
                      riemann_constant, second_kind)

__all__ = [
    "CurveError", "Pt", "RationalSurface", "HyperellipticSurface", "FiberedSurface",
    "branch_points", "homology_basis", "intersection_matrix", "Cycle", "HomologyError",
    "Differential", "Term", "expansion_at", "residue_at", "order_at",
    "holomorphic_candidates", "form_with_divisor",
    "PeriodData", "period_matrix", "abel_map", "second_kind",
    "riemann_constant", "materialize_cycle",
]
