import numpy as np
import pytest

from nlflux import (Symmetry, TwoPointField, build_full_interaction_grid,
                    build_grid, norm_2, norm_12, norm_inf2, project_ball_12,
                    project_ball_inf2, prox_norm12, row_norm_profile,
                    symmetry_project)
from nlflux.norms import row_norms_raw
from nlflux.operators import antisym_raw, pair_inner


@pytest.fixture(scope="module")
def grid():
    return build_grid(1, 16, 0.25)


def _random_field(grid, rng):
    return TwoPointField(grid, rng.standard_normal(grid.n_pairs))


def test_zero_field_norms(grid):
    z = TwoPointField.zeros(grid)
    assert norm_12(z) == 0.0
    assert norm_inf2(z) == 0.0


def test_single_pair_norm(grid):
    a = 1.7
    values = np.zeros(grid.n_pairs)
    values[3] = a
    values[grid.mirror[3]] = -a
    q = TwoPointField(grid, values)
    hn = grid.cell_measure
    expected = 2.0 * hn * np.sqrt(hn * a * a)
    assert abs(norm_12(q) - expected) <= 1e-15


def test_row_profile_consistency(grid):
    rng = np.random.default_rng(0)
    q = _random_field(grid, rng)
    prof = row_norm_profile(q)
    assert np.all(prof.values >= 0.0)
    assert abs(prof.norm_12() - norm_12(q)) == 0.0
    assert abs(prof.norm_inf2() - norm_inf2(q)) == 0.0


def test_hoelder_chain(grid):
    rng = np.random.default_rng(1)
    measure = grid.omega_delta_measure
    for _ in range(100):
        q = _random_field(grid, rng)
        assert norm_12(q) <= np.sqrt(measure) * norm_2(q) * (1.0 + 1e-12)


def test_pairing_bound(grid):
    rng = np.random.default_rng(2)
    for _ in range(100):
        p = _random_field(grid, rng)
        q = _random_field(grid, rng)
        pairing = abs(pair_inner(grid, p.values, q.values))
        assert pairing <= norm_inf2(p) * norm_12(q) * (1.0 + 1e-12)


def test_sect5_field_norm_target():
    # -sin(pi x) + sin(pi x') has (inf,2)-norm 2^{-1/2} on the unit square
    target = 2.0 ** -0.5
    previous = np.inf
    values = {}
    for n in (8, 16, 32, 64):
        g = build_full_interaction_grid(1, n)
        p = TwoPointField.from_function(
            g, lambda x, xp: -np.sin(np.pi * x) + np.sin(np.pi * xp),
            Symmetry.ANTISYMMETRIC)
        values[n] = norm_inf2(p)
        discrepancy = abs(values[n] - target)
        assert discrepancy < previous
        previous = discrepancy
    assert abs(values[64] - target) <= 0.02, (
        f"norm at N=64 is {values[64]:.6f}, {abs(values[64]-target):.6f} "
        f"away from {target:.6f}")


def test_prox_closed_form(grid):
    rng = np.random.default_rng(3)
    q = _random_field(grid, rng)
    r = row_norms_raw(grid, q.values)
    # normalize one row to inner norm 2, shrink with step 1 -> norm 1
    i = int(np.argmax(r))
    values = np.zeros(grid.n_pairs)
    mask = grid.pair_i == i
    values[mask] = q.values[mask] * (2.0 / r[i])
    out = prox_norm12(TwoPointField(grid, values), 1.0)
    r_out = row_norms_raw(grid, out.values)
    assert abs(r_out[i] - 1.0) <= 1e-12
    np.testing.assert_allclose(out.values[mask], 0.5 * values[mask])


def test_prox_full_shrinkage(grid):
    rng = np.random.default_rng(4)
    q = _random_field(grid, rng)
    step = float(row_norms_raw(grid, q.values).max()) + 1.0
    out = prox_norm12(q, step)
    assert not np.any(out.values)


def test_prox_subgradient_optimality(grid):
    # 0 in step * subdifferential(norm12)(out) + (out - q):
    # nonzero rows match the gradient exactly; zero rows need the
    # residual row norm within the step
    rng = np.random.default_rng(5)
    hn = grid.cell_measure
    for _ in range(20):
        q = _random_field(grid, rng)
        step = 0.5 * float(np.median(row_norms_raw(grid, q.values)))
        out = prox_norm12(q, step)
        r_out = row_norms_raw(grid, out.values)
        resid = q.values - out.values  # equals step * subgradient row-wise
        for i in range(grid.n_delta):
            mask = grid.pair_i == i
            if not np.any(mask):
                continue
            if r_out[i] > 1e-14:
                grad = step * hn * out.values[mask] / r_out[i]
                np.testing.assert_allclose(hn * resid[mask], grad,
                                           rtol=1e-10, atol=1e-14)
            else:
                rnorm = np.sqrt(hn * np.sum(resid[mask] ** 2))
                assert rnorm <= step * (1.0 + 1e-12)


def test_prox_firmly_nonexpansive(grid):
    rng = np.random.default_rng(6)
    for _ in range(100):
        a = _random_field(grid, rng)
        b = _random_field(grid, rng)
        pa = prox_norm12(a, 0.3)
        pb = prox_norm12(b, 0.3)
        assert (np.linalg.norm(pa.values - pb.values)
                <= np.linalg.norm(a.values - b.values) * (1.0 + 1e-12))


def test_ball12_projection_properties(grid):
    rng = np.random.default_rng(7)
    inside = _random_field(grid, rng)
    small = TwoPointField(grid, inside.values
                          * (0.5 / max(norm_12(inside), 1e-9)))
    out = project_ball_12(small, 1.0)
    np.testing.assert_array_equal(out.values, small.values)

    for _ in range(20):
        q = _random_field(grid, rng)
        big = TwoPointField(grid, q.values * (3.0 / norm_12(q)))
        proj = project_ball_12(big, 1.0)
        assert abs(norm_12(proj) - 1.0) <= 1e-10
        again = project_ball_12(proj, 1.0)
        np.testing.assert_allclose(again.values, proj.values, atol=1e-13)

    for _ in range(20):
        a = _random_field(grid, rng)
        b = _random_field(grid, rng)
        pa = project_ball_12(a, 1.0)
        pb = project_ball_12(b, 1.0)
        assert (np.linalg.norm(pa.values - pb.values)
                <= np.linalg.norm(a.values - b.values) * (1.0 + 1e-12))


def test_ball_inf2_projection(grid):
    rng = np.random.default_rng(8)
    q = _random_field(grid, rng)
    feasible = project_ball_inf2(q, norm_inf2(q) * 2.0)
    np.testing.assert_array_equal(feasible.values, q.values)

    out = project_ball_inf2(q, 1.0)
    assert norm_inf2(out) <= 1.0 + 1e-14
    r_in = row_norms_raw(grid, q.values)
    r_out = row_norms_raw(grid, out.values)
    scaled = r_in > 1.0
    np.testing.assert_allclose(r_out[scaled], 1.0, atol=1e-12)
    np.testing.assert_allclose(r_out[~scaled], r_in[~scaled], atol=1e-14)


def test_alternating_projections_reach_intersection(grid):
    # the ball projection of an antisymmetric field is generally not
    # antisymmetric, but alternating the two projections settles on a
    # point satisfying both constraints
    rng = np.random.default_rng(9)
    q = rng.standard_normal(grid.n_pairs)
    for _ in range(2000):
        q = antisym_raw(grid, project_ball_12(
            TwoPointField(grid, q), 1.0).values)
    f = TwoPointField(grid, q)
    assert norm_12(f) <= 1.0 + 1e-8
    assert np.max(np.abs(q + q[grid.mirror])) <= 1e-8
    ball = project_ball_12(f, 1.0)
    assert np.max(np.abs(ball.values - q)) <= 1e-8
