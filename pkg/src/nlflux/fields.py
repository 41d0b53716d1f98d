"""Field containers: cell values, two-point pair values, recovered vectors.

Two-point fields keep one value per ordered pair of the grid's pair
table.  The symmetry class is a declared property: constructors that
promise ANTISYMMETRIC or SYMMETRIC verify (or produce) exact mirror
consistency, and the algebra in :mod:`nlflux.operators` preserves it
bit for bit.
"""

import enum
from dataclasses import dataclass, replace

import numpy as np

__all__ = ["Support", "Symmetry", "ScalarField", "TwoPointField",
           "VectorField", "FieldError"]


class FieldError(ValueError):
    """Field/grid mismatch or malformed field data."""


class Support(enum.Enum):
    OMEGA = "omega"
    OMEGA_DELTA = "omega_delta"


class Symmetry(enum.Enum):
    GENERAL = "general"
    ANTISYMMETRIC = "antisymmetric"
    SYMMETRIC = "symmetric"


@dataclass(frozen=True)
class ScalarField:
    """Cell values on the domain or on the enlarged region."""

    grid: "object"
    support: Support
    values: np.ndarray

    def __post_init__(self):
        expected = (self.grid.n_omega if self.support is Support.OMEGA
                    else self.grid.n_delta)
        if self.values.shape != (expected,):
            raise FieldError(
                f"expected {expected} values for {self.support}, "
                f"got shape {self.values.shape}")

    @classmethod
    def on_omega(cls, grid, values):
        values = np.asarray(values, dtype=float)
        if values.ndim == 0:
            values = np.full(grid.n_omega, float(values))
        return cls(grid, Support.OMEGA, values)

    @classmethod
    def on_omega_delta(cls, grid, values):
        values = np.asarray(values, dtype=float)
        if values.ndim == 0:
            values = np.full(grid.n_delta, float(values))
        return cls(grid, Support.OMEGA_DELTA, values)

    def extended(self):
        """Values on all cells, zero outside the domain if needed."""
        if self.support is Support.OMEGA_DELTA:
            return self.values
        return self.grid.extend_by_zero(self.values)


@dataclass(frozen=True)
class TwoPointField:
    """One value per ordered interacting pair, with a symmetry class."""

    grid: "object"
    values: np.ndarray
    symmetry: Symmetry = Symmetry.GENERAL

    def __post_init__(self):
        if self.values.shape != (self.grid.n_pairs,):
            raise FieldError(
                f"expected {self.grid.n_pairs} pair values, "
                f"got shape {self.values.shape}")

    @classmethod
    def zeros(cls, grid, symmetry=Symmetry.GENERAL):
        return cls(grid, np.zeros(grid.n_pairs), symmetry)

    @classmethod
    def from_values(cls, grid, values, symmetry=Symmetry.GENERAL):
        """Wrap raw pair values, checking a declared symmetry class."""
        values = np.asarray(values, dtype=float)
        f = cls(grid, values, symmetry)
        if symmetry is Symmetry.ANTISYMMETRIC:
            if np.any(values + values[grid.mirror] != 0.0):
                raise FieldError("values are not exactly antisymmetric")
        elif symmetry is Symmetry.SYMMETRIC:
            if np.any(values - values[grid.mirror] != 0.0):
                raise FieldError("values are not exactly symmetric")
        return f

    @classmethod
    def from_function(cls, grid, fn, symmetry=Symmetry.GENERAL):
        """Sample ``fn(x, x')`` at pair center coordinates.

        1D functions receive scalars; 2D functions receive coordinate
        pairs (arrays of shape (n, 2)).
        """
        xi = grid.centers[grid.pair_i]
        xj = grid.centers[grid.pair_j]
        if grid.dimension == 1:
            values = fn(xi[:, 0], xj[:, 0])
        else:
            values = fn(xi, xj)
        return cls.from_values(grid, np.asarray(values, dtype=float), symmetry)

    def with_values(self, values, symmetry=None):
        return replace(self, values=values,
                       symmetry=self.symmetry if symmetry is None else symmetry)

    def mirrored(self):
        """Values of the reversed orientation, q(x', x)."""
        return self.values[self.grid.mirror]


@dataclass(frozen=True)
class VectorField:
    """One n-vector per cell of the enlarged region (recovered fluxes)."""

    grid: "object"
    values: np.ndarray

    def __post_init__(self):
        if self.values.shape != (self.grid.n_delta, self.grid.dimension):
            raise FieldError(
                f"expected shape {(self.grid.n_delta, self.grid.dimension)}, "
                f"got {self.values.shape}")
        if not np.all(np.isfinite(self.values)):
            raise FieldError("vector field has non-finite entries")
