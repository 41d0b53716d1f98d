from dataclasses import dataclass, field

import numpy as np
import pytest

from nlflux import (DegenerateInputError, DesignBudget, ScalarField,
                    SolverConfig, Symmetry, TwoPointField, build_grid,
                    build_kernel, compliance_value, delta_sweep,
                    local_reference_1d, optimal_conductivity_unbounded,
                    solve_basis_pursuit, solve_design_gamma,
                    water_filling_conductivity)
from nlflux.design import _harmonic_resistivity
from nlflux.norms import row_norms_raw


@dataclass
class _StubGrid:
    """Two outer cells with unit cell measure, for closed-form checks."""

    pair_i: np.ndarray = field(
        default_factory=lambda: np.array([0, 1], dtype=np.int64))
    pair_j: np.ndarray = field(
        default_factory=lambda: np.array([1, 0], dtype=np.int64))
    mirror: np.ndarray = field(
        default_factory=lambda: np.array([1, 0], dtype=np.int64))
    n_delta: int = 2
    n_omega: int = 2
    n_pairs: int = 2
    cell_measure: float = 1.0
    omega_delta_measure: float = 2.0


def test_unbounded_conductivity_closed_form():
    grid = _StubGrid()
    q = TwoPointField(grid, np.array([2.0, 1.0]))
    kappa, value = optimal_conductivity_unbounded(q)
    np.testing.assert_allclose(kappa.values, [4.0 / 3.0, 2.0 / 3.0])
    assert abs(value - 9.0 / 4.0) <= 1e-14
    # the budget is active
    assert abs(kappa.values.sum() - 2.0) <= 1e-14


def test_unbounded_conductivity_budget_active_and_optimal():
    g = build_grid(1, 8, 0.3)
    rng = np.random.default_rng(0)
    q = TwoPointField(g, rng.standard_normal(g.n_pairs))
    kappa, value = optimal_conductivity_unbounded(q)
    vol = g.cell_measure * kappa.values.sum()
    assert abs(vol - g.omega_delta_measure) <= 1e-12
    # closed form beats 50 random feasible conductivities
    for _ in range(50):
        w = rng.random(g.n_delta) + 1e-3
        k_rand = w * (g.omega_delta_measure / (g.cell_measure * w.sum()))
        assert value <= compliance_value(q, k_rand) + 1e-10

    with pytest.raises(DegenerateInputError):
        optimal_conductivity_unbounded(TwoPointField.zeros(g))


def test_water_filling_regimes():
    g = build_grid(1, 8, 0.3)
    rng = np.random.default_rng(1)
    q = TwoPointField(g, rng.standard_normal(g.n_pairs))

    # tiny gamma: cap inactive, reduces to the unbounded solution
    k0, v0 = optimal_conductivity_unbounded(q)
    kw, vw = water_filling_conductivity(q, DesignBudget(gamma=1e-9))
    np.testing.assert_allclose(kw.values, k0.values, rtol=1e-9)
    assert abs(vw - v0) <= 1e-9 * v0

    # huge gamma: cap binds wherever rows are active
    from nlflux import norm_2
    gamma = 1e4
    kc, vc = water_filling_conductivity(q, DesignBudget(gamma=gamma))
    r = row_norms_raw(g, q.values)
    np.testing.assert_allclose(kc.values[r > 0], 1.0 / gamma)
    assert abs(vc - gamma / 2.0 * norm_2(q) ** 2) <= 1e-9 * vc

    # monotonicity in the cap: capped value dominates the unbounded one
    for gamma in (0.5, 1.0, 5.0):
        _, v = water_filling_conductivity(q, DesignBudget(gamma=gamma))
        assert v >= v0 - 1e-12


def test_water_filling_feasibility_and_optimality():
    g = build_grid(1, 16, 0.25)
    rng = np.random.default_rng(2)
    q = TwoPointField(g, rng.standard_normal(g.n_pairs))
    budget = DesignBudget(gamma=0.8, kappa_bar=1.0)
    kappa, value = water_filling_conductivity(q, budget)
    cap = budget.cap()
    assert np.all(kappa.values >= 0.0)
    assert np.all(kappa.values <= cap * (1.0 + 1e-12))
    vol = g.cell_measure * kappa.values.sum()
    assert vol <= g.omega_delta_measure * (1.0 + 1e-12)
    # true lower envelope among random feasible conductivities
    for _ in range(50):
        w = rng.random(g.n_delta) * cap
        scale = min(1.0, g.omega_delta_measure / (g.cell_measure * w.sum()))
        k_rand = w * scale
        assert compliance_value(q, k_rand) >= value - 1e-10


def test_harmonic_pairwise_identity():
    # 0.5 sum_pairs kpair^{-1} q^2 == 0.5 sum_cells kappa^{-1} r^2
    g = build_grid(1, 8, 0.3)
    rng = np.random.default_rng(3)
    q_vals = rng.standard_normal(g.n_pairs)
    q_vals = 0.5 * (q_vals - q_vals[g.mirror])
    q = TwoPointField(g, q_vals, Symmetry.ANTISYMMETRIC)
    kappa = rng.random(g.n_delta) + 0.5
    w = _harmonic_resistivity(g, kappa)
    lhs = 0.5 * g.cell_measure ** 2 * float(np.sum(w * q_vals ** 2))
    rhs = compliance_value(q, kappa)
    assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(rhs))


def test_design_gamma_zero_source():
    g = build_grid(1, 8, 0.3)
    k = build_kernel(g)
    f0 = ScalarField.on_omega(g, 0.0)
    q, kappa, rep = solve_design_gamma(f0, k, DesignBudget(gamma=0.1))
    assert rep.optimal_value == 0.0
    assert not np.any(q.values)


def test_design_gamma_sweep_certificates():
    g = build_grid(1, 16, 0.25)
    k = build_kernel(g)
    f = ScalarField.on_omega(g, 1.0)
    config = SolverConfig()
    _, bp = solve_basis_pursuit(f, k, True, config)
    limit = bp.optimal_value ** 2 / (2.0 * g.omega_delta_measure)
    values = []
    for gamma in (0.5, 0.1, 0.02):
        q, kappa, rep = solve_design_gamma(
            f, k, DesignBudget(gamma=gamma, kappa_bar=1.0), config)
        lo = rep.breakdown["lower_certificate"]
        up = rep.breakdown["upper_certificate"]
        assert lo <= rep.optimal_value + 1e-9
        assert rep.optimal_value <= up + 1e-9
        values.append(rep.optimal_value)
        cap = 1.0 / gamma
        assert np.all(kappa.values <= cap + 1e-12)
        assert (g.cell_measure * kappa.values.sum()
                <= g.omega_delta_measure * (1.0 + 1e-12))
    assert all(v2 <= v1 + 1e-9 for v1, v2 in zip(values, values[1:]))
    assert abs(values[-1] - limit) <= 0.05 * limit


def test_alternation_half_steps_never_increase():
    from nlflux.solvers import _solve_compliance_flux

    g = build_grid(1, 16, 0.25)
    k = build_kernel(g)
    f = ScalarField.on_omega(g, 1.0)
    config = SolverConfig()
    budget = DesignBudget(gamma=0.5, kappa_bar=1.0)
    q, _ = solve_basis_pursuit(f, k, True, config)
    kappa, v0 = water_filling_conductivity(q, budget)
    w = _harmonic_resistivity(g, kappa.values)
    q2_vals, _ = _solve_compliance_flux(k, f.values, w, config, q0=q.values)
    q2 = TwoPointField(g, q2_vals, Symmetry.ANTISYMMETRIC)
    v1 = compliance_value(q2, kappa.values)
    assert v1 <= v0 + 1e-12 * max(1.0, v0)
    _, v2 = water_filling_conductivity(q2, budget)
    assert v2 <= v1 + 1e-12 * max(1.0, v1)


def test_local_reference_closed_forms():
    g = build_grid(1, 128, 0.2)
    one = ScalarField.on_omega(g, 1.0)
    assert abs(local_reference_1d(one) - 0.25) <= 1e-12
    zero = ScalarField.on_omega(g, 0.0)
    assert local_reference_1d(zero) == 0.0
    two = ScalarField.on_omega(g, 2.0)
    assert abs(local_reference_1d(two) - 0.5) <= 1e-12

    g2 = build_grid(2, 8, 0.25)
    with pytest.raises(ValueError):
        local_reference_1d(ScalarField.on_omega(g2, 1.0))


def test_delta_sweep_single_row_consistency():
    from nlflux import solve_dual_temperature

    g = build_grid(1, 32, 0.25)
    f = ScalarField.on_omega(g, 1.0)
    config = SolverConfig(tol_primal=1e-8, tol_gap=1e-7, step_ratio=4.0)
    res = delta_sweep(f, [0.2], config)
    assert len(res.rows) == 1
    row = res.rows[0]
    gd = build_grid(1, 32, 0.2)
    kd = build_kernel(gd)
    fd = ScalarField.on_omega(gd, 1.0)
    _, dual = solve_dual_temperature(fd, kd, config)
    _, bp = solve_basis_pursuit(fd, kd, True, config)
    assert row["d_star"] == dual.optimal_value
    assert row["p_star_antisym"] == bp.optimal_value
    assert row["p_star_antisym"] >= row["d_star"] - 1e-6
    assert row["local_ref"] == 0.25


def test_delta_sweep_validation():
    g = build_grid(1, 32, 0.25)
    f = ScalarField.on_omega(g, 1.0)
    with pytest.raises(ValueError):
        delta_sweep(f, [0.1, 0.2])
    with pytest.raises(ValueError):
        delta_sweep(f, [0.2, 0.01])
