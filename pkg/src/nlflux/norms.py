"""Weighted mixed-exponent norms, block shrinkage, and ball projections.

All quantities are quadrature-consistent: with cell measure ``hn``,
the inner norm of the row at outer cell i is
``r_i = (hn * sum_j q(i,j)^2)^(1/2)``, the (1,2)-norm is
``hn * sum_i r_i`` and the (inf,2)-norm is ``max_i r_i``, so computed
values approximate their continuum counterparts directly.
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .fields import Symmetry, TwoPointField

__all__ = [
    "RowNormProfile", "row_norm_profile", "row_norms_raw",
    "norm_12", "norm_inf2", "norm_2",
    "prox_norm12", "project_ball_12", "project_ball_inf2",
]


@dataclass(frozen=True)
class RowNormProfile:
    """Per-outer-cell inner norms plus the outer cell measure."""

    values: np.ndarray
    cell_measure: float

    def norm_12(self):
        return self.cell_measure * float(self.values.sum())

    def norm_inf2(self):
        return float(self.values.max()) if self.values.size else 0.0


def row_norms_raw(grid, q_values):
    sq = _kernels.row_sqsums(q_values, grid.pair_i, grid.n_delta)
    return np.sqrt(grid.cell_measure * sq)


def row_norm_profile(q):
    return RowNormProfile(row_norms_raw(q.grid, q.values), q.grid.cell_measure)


def norm_12(q):
    """Outer weighted-l1 of inner weighted-l2 row norms."""
    return row_norm_profile(q).norm_12()


def norm_inf2(q):
    """Largest inner weighted-l2 row norm."""
    return row_norm_profile(q).norm_inf2()


def norm_2(q):
    """Plain weighted l2 norm over ordered pairs."""
    return q.grid.cell_measure * float(np.linalg.norm(q.values))


# ---------------------------------------------------------------------------
# raw-array cores


def _safe(r):
    # rows with r == 0 carry only zero values; any finite factor works there
    return np.where(r > 0.0, r, 1.0)


def prox_norm12_raw(grid, q_values, step):
    r = row_norms_raw(grid, q_values)
    factors = np.maximum(1.0 - step / _safe(r), 0.0)
    return _kernels.scale_by_row(q_values, grid.pair_i, factors)


def _simplex_threshold(r, budget):
    """Threshold t with sum(max(r - t, 0)) == budget (r >= 0, budget > 0)."""
    s = np.sort(r)[::-1]
    csum = np.cumsum(s)
    k = np.arange(1, s.size + 1)
    t_cand = (csum - budget) / k
    idx = np.nonzero(t_cand < s)[0][-1]
    return max(t_cand[idx], 0.0)


def project_ball_12_raw(grid, q_values, radius):
    r = row_norms_raw(grid, q_values)
    hn = grid.cell_measure
    if hn * r.sum() <= radius:
        return q_values.copy()
    t = np.maximum(r - _simplex_threshold(r, radius / hn), 0.0)
    factors = t / _safe(r)
    return _kernels.scale_by_row(q_values, grid.pair_i, factors)


def project_ball_inf2_raw(grid, q_values, radius):
    r = row_norms_raw(grid, q_values)
    factors = np.minimum(radius / _safe(r), 1.0)
    return _kernels.scale_by_row(q_values, grid.pair_i, factors)


# ---------------------------------------------------------------------------
# field-level wrappers


def prox_norm12(q, step):
    """Block soft thresholding: row i scaled by max(1 - step/r_i, 0).

    Minimizes ``step * ||.||_{1,2} + 0.5 ||. - q||_2^2`` in the weighted
    norms; rows with r_i <= step collapse to zero.
    """
    if step <= 0.0:
        raise ValueError(f"step must be positive, got {step}")
    values = prox_norm12_raw(q.grid, q.values, step)
    return TwoPointField(q.grid, values, Symmetry.GENERAL)


def project_ball_12(q, radius):
    """Weighted-l2 projection onto {||.||_{1,2} <= radius}.

    Row norms are projected onto the weighted l1 ball by exact
    sort-and-threshold, then each row is rescaled radially.
    """
    if radius <= 0.0:
        raise ValueError(f"radius must be positive, got {radius}")
    values = project_ball_12_raw(q.grid, q.values, radius)
    return TwoPointField(q.grid, values, Symmetry.GENERAL)


def project_ball_inf2(p, radius):
    """Row-clip projection onto {||.||_{inf,2} <= radius}."""
    if radius <= 0.0:
        raise ValueError(f"radius must be positive, got {radius}")
    values = project_ball_inf2_raw(p.grid, p.values, radius)
    return TwoPointField(p.grid, values, Symmetry.GENERAL)
