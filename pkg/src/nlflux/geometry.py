"""Uniform cell decompositions of the unit domain and its interaction collar.

The domain is always the unit interval or unit square, split into ``N``
cells per side with midpoint collocation.  Cells whose centers lie
within distance ``delta`` of the domain form the enlarged index set on
which two-point quantities live.  The interaction kernel is a constant
profile on the ball of radius ``delta``, with its amplitude rescaled so
the discrete second-moment normalization holds exactly on the offset
stencil.
"""

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "ConfigurationError",
    "Grid",
    "Kernel",
    "build_grid",
    "build_kernel",
    "build_full_interaction_grid",
]


class ConfigurationError(ValueError):
    """Invalid grid or kernel configuration."""


# 1 / K_{2,n}: inverse average of |s.e|^2 over the unit sphere S^{n-1}.
_K2_INV = {1: 1.0, 2: 2.0}


@dataclass(frozen=True)
class Grid:
    """Midpoint-collocated cells of the domain and its collar.

    Cells are ordered lexicographically by center coordinates; the first
    ``n_delta`` indices enumerate the enlarged region, and ``omega_idx``
    selects the cells of the domain proper in the same order.  The
    ordered-pair table lists both orientations of every interacting pair
    (centers closer than ``delta``, or all distinct cells in
    full-interaction mode); ``mirror`` maps each pair to its reversed
    orientation.
    """

    dimension: int
    cells_per_side: int
    spacing: float
    delta: float
    full_interaction: bool
    centers: np.ndarray            # (n_delta, dimension)
    omega_idx: np.ndarray          # (n_omega,) indices into the delta cells
    in_omega: np.ndarray           # (n_delta,) bool
    pair_i: np.ndarray             # (n_pairs,) outer cell of each ordered pair
    pair_j: np.ndarray             # (n_pairs,)
    mirror: np.ndarray             # (n_pairs,) index of the reversed pair
    _omega_pos: np.ndarray = field(repr=False, default=None)

    @property
    def n_omega(self):
        return self.omega_idx.shape[0]

    @property
    def n_delta(self):
        return self.centers.shape[0]

    @property
    def n_pairs(self):
        return self.pair_i.shape[0]

    @property
    def cell_measure(self):
        """Measure h^n of one cell."""
        return self.spacing ** self.dimension

    @property
    def omega_delta_measure(self):
        """Discrete measure of the enlarged region."""
        return self.cell_measure * self.n_delta

    def extend_by_zero(self, values_on_omega):
        """Zero-extend a vector of domain cell values to all cells."""
        ext = np.zeros(self.n_delta)
        ext[self.omega_idx] = values_on_omega
        return ext

    def restrict_to_omega(self, values_on_delta):
        return values_on_delta[self.omega_idx]


def _lattice(dimension, cells_per_side, delta, full_interaction):
    h = 1.0 / cells_per_side
    if full_interaction:
        reach = 0
    else:
        reach = int(np.ceil(delta / h)) + 1
    axis = np.arange(-reach, cells_per_side + reach)
    if dimension == 1:
        coords = axis[:, None]
    else:
        gx, gy = np.meshgrid(axis, axis, indexing="ij")
        coords = np.column_stack([gx.ravel(), gy.ravel()])
    centers = (coords + 0.5) * h
    # distance from a center to the closed unit box
    gap = np.maximum(np.maximum(-centers, centers - 1.0), 0.0)
    dist = np.sqrt((gap * gap).sum(axis=1))
    if full_interaction:
        keep = dist <= 0.0
    else:
        keep = dist < delta
    coords = coords[keep]
    centers = centers[keep]
    order = np.lexsort(tuple(coords[:, d] for d in range(dimension - 1, -1, -1)))
    return coords[order], centers[order], dist[keep][order]


def _pair_table(coords, centers, h, delta, full_interaction):
    n = coords.shape[0]
    dim = coords.shape[1]
    if full_interaction:
        ii, jj = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
        mask = ii < jj
        pi = ii[mask].astype(np.int64)
        pj = jj[mask].astype(np.int64)
    else:
        # integer offsets with 0 < |z| < delta
        reach = int(np.ceil(delta / h))
        off_axis = np.arange(-reach, reach + 1)
        if dim == 1:
            offs = off_axis[:, None]
        else:
            ox, oy = np.meshgrid(off_axis, off_axis, indexing="ij")
            offs = np.column_stack([ox.ravel(), oy.ravel()])
        norms = np.sqrt(((offs * h) ** 2).sum(axis=1))
        offs = offs[(norms > 0.0) & (norms < delta)]
        # keep one representative per +/- offset pair; mirrors appended below
        offs = offs[[tuple(o) > tuple(-o) for o in offs]]

        lo = coords.min(axis=0)
        shape = coords.max(axis=0) - lo + 1
        lookup = -np.ones(shape, dtype=np.int64)
        lookup[tuple((coords - lo).T)] = np.arange(n)

        pi_parts, pj_parts = [], []
        for off in offs:
            shifted = coords + off
            inside = np.all((shifted >= lo) & (shifted < lo + shape), axis=1)
            partner = -np.ones(n, dtype=np.int64)
            partner[inside] = lookup[tuple((shifted[inside] - lo).T)]
            src = np.flatnonzero(partner >= 0)
            pi_parts.append(src.astype(np.int64))
            pj_parts.append(partner[src])
        if pi_parts:
            pi = np.concatenate(pi_parts)
            pj = np.concatenate(pj_parts)
        else:
            pi = np.empty(0, dtype=np.int64)
            pj = np.empty(0, dtype=np.int64)
        order = np.lexsort((pj, pi))
        pi, pj = pi[order], pj[order]

    half = pi.shape[0]
    pair_i = np.concatenate([pi, pj])
    pair_j = np.concatenate([pj, pi])
    mirror = np.concatenate([np.arange(half, 2 * half), np.arange(half)])
    return pair_i, pair_j, mirror


def build_grid(dimension, cells_per_side, delta, full_interaction=False):
    """Build the cell decomposition for a horizon ``delta``.

    Raises :class:`ConfigurationError` for an unsupported dimension, a
    side count below 2, or a horizon outside (0, 1).
    """
    if dimension not in (1, 2):
        raise ConfigurationError(f"dimension must be 1 or 2, got {dimension}")
    if not isinstance(cells_per_side, (int, np.integer)) or cells_per_side < 2:
        raise ConfigurationError(
            f"cells_per_side must be an integer >= 2, got {cells_per_side}")
    if not (0.0 < delta < 1.0):
        raise ConfigurationError(f"delta must lie in (0, 1), got {delta}")

    h = 1.0 / cells_per_side
    coords, centers, _ = _lattice(dimension, cells_per_side, delta,
                                  full_interaction)
    in_omega = np.all((centers > 0.0) & (centers < 1.0), axis=1)
    omega_idx = np.flatnonzero(in_omega).astype(np.int64)
    pair_i, pair_j, mirror = _pair_table(coords, centers, h, delta,
                                         full_interaction)
    omega_pos = -np.ones(centers.shape[0], dtype=np.int64)
    omega_pos[omega_idx] = np.arange(omega_idx.shape[0])
    return Grid(dimension=dimension, cells_per_side=int(cells_per_side),
                spacing=h, delta=float(delta),
                full_interaction=bool(full_interaction),
                centers=centers, omega_idx=omega_idx, in_omega=in_omega,
                pair_i=pair_i, pair_j=pair_j, mirror=mirror,
                _omega_pos=omega_pos)


def build_full_interaction_grid(dimension, cells_per_side):
    """Grid without a collar where every distinct cell pair interacts.

    Used for the kernel-free dual-norm computations on the plain domain;
    the stored ``delta`` is only nominal.
    """
    return build_grid(dimension, cells_per_side, delta=0.5,
                      full_interaction=True)


@dataclass(frozen=True)
class Kernel:
    """Constant radial interaction weight on the ball of radius ``delta``.

    ``amplitude`` is fixed by the discrete normalization
    ``sum_z h^n |z|^2 amplitude^2 = 1 / K_{2,n}`` over the offset stencil
    ``{z = h k : 0 < |z| < delta}``, so adjointness and recovery bounds
    that rely on the second moment are exact at any resolution.
    """

    grid: Grid
    delta: float
    profile: str
    amplitude: float
    dimension: int
    second_moment_constant: float

    def stencil_second_moment(self):
        """Discrete quadrature sum_z h^n |z|^2 w(z)^2 over the stencil."""
        return _stencil_sqmoment(self.grid) * self.amplitude ** 2


def _stencil_sqmoment(grid):
    h = grid.spacing
    reach = int(np.ceil(grid.delta / h))
    off_axis = np.arange(-reach, reach + 1)
    if grid.dimension == 1:
        offs = off_axis[:, None]
    else:
        ox, oy = np.meshgrid(off_axis, off_axis, indexing="ij")
        offs = np.column_stack([ox.ravel(), oy.ravel()])
    sq = ((offs * h) ** 2).sum(axis=1)
    norms = np.sqrt(sq)
    sq = sq[(norms > 0.0) & (norms < grid.delta)]
    return grid.cell_measure * sq.sum()


def build_kernel(grid, delta=None):
    """Normalized constant kernel for ``grid``.

    Raises :class:`ConfigurationError` when the offset stencil is empty
    (horizon not larger than the spacing) or when ``delta`` disagrees
    with the horizon the grid was built for.
    """
    if delta is None:
        delta = grid.delta
    if grid.full_interaction:
        raise ConfigurationError(
            "full-interaction grids are kernel-free; build a horizon grid")
    if not np.isclose(delta, grid.delta):
        raise ConfigurationError(
            f"kernel delta {delta} does not match grid delta {grid.delta}")
    if delta <= 0.0:
        raise ConfigurationError(f"delta must be positive, got {delta}")
    moment = _stencil_sqmoment(grid)
    if moment <= 0.0:
        raise ConfigurationError(
            f"no offsets with 0 < |z| < {delta} at spacing {grid.spacing}")
    k2_inv = _K2_INV[grid.dimension]
    amplitude = np.sqrt(k2_inv / moment)
    return Kernel(grid=grid, delta=float(delta), profile="constant",
                  amplitude=float(amplitude), dimension=grid.dimension,
                  second_moment_constant=1.0 / k2_inv)
