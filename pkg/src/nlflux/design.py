"""Vanishing-material design machinery built on top of the flux solvers.

Closed-form optimal conductivities for a given flux, the capped
water-filling allocation, the alternating scheme for the positive-volume
design problem with its sandwich certificates, the one-dimensional local
reference value, and the horizon sweep.
"""

from dataclasses import dataclass

import numpy as np

from .fields import ScalarField, Support, Symmetry, TwoPointField
from .norms import row_norms_raw
from .operators import NumericalError, antisym_raw
from .solvers import (SolveReport, SolverConfig, _feasibility_correct,
                      _norm12_raw, _solve_compliance_flux, solve_basis_pursuit,
                      solve_dual_temperature, solve_tikhonov)

__all__ = [
    "DesignBudget", "DegenerateInputError",
    "optimal_conductivity_unbounded", "water_filling_conductivity",
    "compliance_value", "solve_design_gamma",
    "local_reference_1d", "delta_sweep", "DeltaSweepResult",
]


class DegenerateInputError(ValueError):
    """The flux is identically zero, so the normalization is undefined."""


@dataclass(frozen=True)
class DesignBudget:
    """Material budget: cap scale and the vanishing-material parameter.

    ``gamma = 0`` selects the uncapped limit; for positive ``gamma`` the
    scaled conductivity is bounded by ``kappa_bar / gamma``.  The volume
    bound always equals the discrete measure of the enlarged region of
    the grid in use.
    """

    gamma: float
    kappa_bar: float = 1.0

    def __post_init__(self):
        if self.gamma < 0.0:
            raise ValueError(f"gamma must be >= 0, got {self.gamma}")
        if self.kappa_bar <= 0.0:
            raise ValueError(f"kappa_bar must be positive, got {self.kappa_bar}")

    def cap(self):
        if self.gamma == 0.0:
            return np.inf
        return self.kappa_bar / self.gamma


def optimal_conductivity_unbounded(q):
    """Pointwise optimal conductivity without an upper bound.

    kappa(x) = c * r(x) with r the inner row norm and
    c = |enlarged region| / ||q||_{1,2}; the returned value is the
    limiting compliance ||q||^2 / (2 |enlarged region|).
    """
    grid = q.grid
    r = row_norms_raw(grid, q.values)
    n12 = grid.cell_measure * float(r.sum())
    if n12 == 0.0:
        raise DegenerateInputError("flux is identically zero")
    volume = grid.omega_delta_measure
    c_hat = volume / n12
    kappa = ScalarField(grid, Support.OMEGA_DELTA, c_hat * r)
    return kappa, n12 ** 2 / (2.0 * volume)


def compliance_value(q, kappa):
    """Compliance 0.5 * sum h^n kappa^{-1} r^2 with 0^{-1} 0^2 = 0."""
    grid = q.grid
    r = row_norms_raw(grid, q.values)
    k = kappa.values if isinstance(kappa, ScalarField) else np.asarray(kappa)
    active = r > 0.0
    if np.any(k[active] <= 0.0):
        return np.inf
    return 0.5 * grid.cell_measure * float(
        np.sum(r[active] ** 2 / k[active]))


def water_filling_conductivity(q, budget):
    """Capped optimal conductivity by water filling.

    Solves ``min 0.5 sum h^n kappa^{-1} r^2`` over
    ``0 <= kappa <= kappa_bar/gamma`` with the volume budget, via
    ``kappa = min(cap, r / sqrt(lam))`` and a monotone bisection for the
    multiplier.  Cells with vanishing rows get no material.
    """
    if budget.gamma <= 0.0:
        raise ValueError("water filling requires gamma > 0; "
                         "use optimal_conductivity_unbounded for the limit")
    grid = q.grid
    r = row_norms_raw(grid, q.values)
    if not np.any(r > 0.0):
        raise DegenerateInputError("flux is identically zero")
    hn = grid.cell_measure
    volume = grid.omega_delta_measure
    cap = budget.cap()
    active = r > 0.0
    ra = r[active]

    kappa = np.zeros(grid.n_delta)
    if hn * ra.size * cap <= volume:
        # cap binds everywhere material is useful; budget stays slack
        kappa[active] = cap
    else:
        lam = _waterfill_multiplier(ra, hn, cap, volume)
        kappa[active] = np.minimum(cap, ra / np.sqrt(lam))
    value = 0.5 * hn * float(np.sum(ra ** 2 / kappa[active]))
    return ScalarField(grid, Support.OMEGA_DELTA, kappa), value


def _waterfill_multiplier(ra, hn, cap, volume, tol=1e-12):
    def vol(lam):
        return hn * float(np.minimum(cap, ra / np.sqrt(lam)).sum())

    lo = (ra[ra > 0.0].min() / cap) ** 2
    hi = (hn * float(ra.sum()) / volume) ** 2
    for _ in range(200):
        if vol(lo) >= volume:
            break
        lo *= 0.25
    else:
        raise NumericalError("water-filling bracket expansion failed (low end)")
    for _ in range(200):
        if vol(hi) <= volume:
            break
        hi *= 4.0
    else:
        raise NumericalError("water-filling bracket expansion failed (high end)")
    while hi - lo > tol * lo:
        mid = 0.5 * (lo + hi)
        if vol(mid) > volume:
            lo = mid
        else:
            hi = mid
    return hi  # feasible side of the volume constraint


def solve_design_gamma(f, kernel, budget, config=None):
    """Positive-volume design: alternate conductivity and flux updates.

    Starting from the antisymmetric basis-pursuit flux, water filling
    updates the conductivity and a weighted quadratic flux solve updates
    the flux until the objective stalls.  The result is accepted only if
    the theorem-backed sandwich holds: the limiting-compliance lower
    bound below the achieved value, the Tikhonov-based upper bound above
    it (within ten gap tolerances); otherwise a numerical error reports
    both certificates.
    """
    config = config or SolverConfig()
    if budget.gamma <= 0.0:
        raise ValueError("solve_design_gamma requires gamma > 0")
    grid = kernel.grid
    beta = budget.gamma / budget.kappa_bar

    if not np.any(f.values):
        q = TwoPointField.zeros(grid, Symmetry.ANTISYMMETRIC)
        kappa = ScalarField(grid, Support.OMEGA_DELTA, np.zeros(grid.n_delta))
        report = SolveReport(0.0, 0.0, 0.0, 0.0, 0, True,
                             {"lower_certificate": 0.0,
                              "upper_certificate": 0.0,
                              "tikhonov_beta": beta})
        return q, kappa, report

    q_field, bp_report = solve_basis_pursuit(f, kernel, True, config)
    q = q_field.values
    kappa, value = water_filling_conductivity(q_field, budget)
    total_inner_iters = bp_report.iterations
    converged_inner = bp_report.converged

    for _ in range(60):
        w_pairs = _harmonic_resistivity(grid, kappa.values)
        q_next, inner = _solve_compliance_flux(kernel, f.values, w_pairs,
                                               config, q0=q)
        total_inner_iters += inner.iterations
        converged_inner = converged_inner and inner.converged
        q_f = TwoPointField(grid, q_next, Symmetry.ANTISYMMETRIC)
        kappa_new, value_new = water_filling_conductivity(q_f, budget)
        if value_new > value:
            # an inexact inner solve must never push the objective up
            break
        q, kappa = q_next, kappa_new
        decrease = value - value_new
        value = value_new
        if decrease <= config.tol_gap * max(1.0, abs(value)):
            break

    q = _feasibility_correct(grid, kernel.amplitude, q, f.values)
    q_field = TwoPointField(grid, q, Symmetry.ANTISYMMETRIC)
    kappa, value = water_filling_conductivity(q_field, budget)

    volume = grid.omega_delta_measure
    lower = _norm12_raw(grid, q) ** 2 / (2.0 * volume)
    qt, tik_report = solve_tikhonov(f, kernel, beta, config)
    upper = (tik_report.breakdown["norm_12"] ** 2 / (2.0 * volume)
             + tik_report.breakdown["half_beta_norm2_sq"])

    slack = 10.0 * config.tol_gap * max(1.0, upper)
    if value > upper + slack or lower > value + slack:
        raise NumericalError(
            "design objective escaped its sandwich certificates: "
            f"lower {lower:.12e}, value {value:.12e}, upper {upper:.12e}")

    resid = 0.0  # corrected flux satisfies the constraint exactly
    report = SolveReport(
        optimal_value=value,
        dual_value=lower,
        gap=(upper - lower) / max(1.0, abs(value)),
        primal_residual=resid,
        iterations=total_inner_iters,
        converged=converged_inner and tik_report.converged,
        breakdown={"lower_certificate": lower, "upper_certificate": upper,
                   "tikhonov_beta": beta},
    )
    return q_field, kappa, report


def _harmonic_resistivity(grid, kappa_values):
    """Pairwise resistivity 0.5 (kappa_i^{-1} + kappa_j^{-1}), inf at voids."""
    inv = np.full(kappa_values.shape[0], np.inf)
    pos = kappa_values > 0.0
    inv[pos] = 1.0 / kappa_values[pos]
    return 0.5 * (inv[grid.pair_i] + inv[grid.pair_j])


def local_reference_1d(f, resolution=None):
    """Value of the local one-dimensional limit problem.

    In one dimension the divergence constraint integrates exactly:
    admissible fluxes are Q + c with Q the cumulative integral of the
    source, and the optimal constant is a median, giving
    ``min_c sum h |Q_i + c|``.
    """
    grid = f.grid
    if grid.dimension != 1:
        raise ValueError("the local reference value is one-dimensional")
    values = f.values
    n = grid.n_omega
    if resolution is not None and resolution != n:
        idx = np.minimum((np.arange(resolution) + 0.5) * n // resolution,
                         n - 1).astype(int)
        values = values[idx]
        n = resolution
    h = 1.0 / n
    run = h * np.cumsum(values)
    q_mid = run - 0.5 * h * values   # cumulative integral at cell centers
    c = -float(np.median(q_mid))
    return float(h * np.abs(q_mid + c).sum())


@dataclass
class DeltaSweepResult:
    rows: list
    dual_trend_monotone: bool


def delta_sweep(f, deltas, config=None):
    """Solve the dual and antisymmetric problems for shrinking horizons.

    Each row records (delta, d_star, p_star_antisym, local_ref,
    converged).  The dual values are checked for a monotone trend toward
    the one-dimensional local reference; the antisymmetric values are
    recorded without any convergence claim.  Rows of non-converged
    solves are flagged and the sweep continues.
    """
    from .geometry import build_grid, build_kernel

    config = config or SolverConfig()
    grid0 = f.grid
    deltas = list(deltas)
    if any(d2 >= d1 for d1, d2 in zip(deltas, deltas[1:])):
        raise ValueError("deltas must be strictly decreasing")
    if any(d <= grid0.spacing for d in deltas):
        raise ValueError("every delta must exceed the grid spacing")

    local_ref = (local_reference_1d(f) if grid0.dimension == 1 else np.nan)
    rows = []
    for delta in deltas:
        grid = build_grid(grid0.dimension, grid0.cells_per_side, delta)
        kernel = build_kernel(grid)
        f_d = ScalarField.on_omega(grid, f.values)
        _, dual_report = solve_dual_temperature(f_d, kernel, config)
        _, bp_report = solve_basis_pursuit(f_d, kernel, True, config)
        rows.append({
            "delta": delta,
            "d_star": dual_report.optimal_value,
            "p_star_antisym": bp_report.optimal_value,
            "local_ref": local_ref,
            "converged": dual_report.converged and bp_report.converged,
        })

    monotone = True
    if grid0.dimension == 1:
        errs = [abs(row["d_star"] - local_ref) for row in rows]
        monotone = all(e2 <= e1 for e1, e2 in zip(errs, errs[1:]))
    return DeltaSweepResult(rows=rows, dual_trend_monotone=monotone)
