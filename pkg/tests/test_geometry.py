import numpy as np
import pytest

from nlflux import ConfigurationError, build_full_interaction_grid, build_grid, build_kernel


def test_1d_grid_basic():
    g = build_grid(1, 4, 0.3)
    assert g.n_omega == 4
    assert g.spacing == 0.25
    centers = g.centers[g.omega_idx, 0]
    np.testing.assert_allclose(centers, [0.125, 0.375, 0.625, 0.875])
    # collar centers lie inside (-0.3, 1.3)
    assert np.all(g.centers[:, 0] > -0.3) and np.all(g.centers[:, 0] < 1.3)


def test_2d_grid_collar_count_frozen():
    # independent derivation: 12x12 bounding lattice minus the 4 corner
    # cells whose centers sit at distance sqrt(2)*0.1875 >= 0.25
    g = build_grid(2, 8, 0.25)
    assert g.n_omega == 64
    assert g.n_delta == 140


def test_omega_subset_of_collar():
    for dim, n, delta in [(1, 8, 0.3), (2, 6, 0.25)]:
        g = build_grid(dim, n, delta)
        assert np.all(g.in_omega[g.omega_idx])
        # every collar center is within delta + h of the domain
        gap = np.maximum(np.maximum(-g.centers, g.centers - 1.0), 0.0)
        dist = np.sqrt((gap ** 2).sum(axis=1))
        assert np.all(dist < delta + g.spacing)


def test_invalid_configurations():
    with pytest.raises(ConfigurationError):
        build_grid(3, 8, 0.25)
    with pytest.raises(ConfigurationError):
        build_grid(1, 0, 0.3)
    with pytest.raises(ConfigurationError):
        build_grid(1, 8, 0.0)
    with pytest.raises(ConfigurationError):
        build_grid(1, 8, 1.0)


def test_deterministic_rebuild():
    a = build_grid(2, 8, 0.25)
    b = build_grid(2, 8, 0.25)
    np.testing.assert_array_equal(a.centers, b.centers)
    np.testing.assert_array_equal(a.pair_i, b.pair_i)
    np.testing.assert_array_equal(a.pair_j, b.pair_j)
    np.testing.assert_array_equal(a.mirror, b.mirror)


def test_pair_table_mirrors_and_horizon():
    g = build_grid(2, 6, 0.3)
    ci = g.centers[g.pair_i]
    cj = g.centers[g.pair_j]
    dist = np.linalg.norm(ci - cj, axis=1)
    assert np.all(dist > 0.0) and np.all(dist < 0.3)
    assert np.array_equal(g.pair_i[g.mirror], g.pair_j)
    assert np.array_equal(g.pair_j[g.mirror], g.pair_i)


def test_full_interaction_grid():
    g = build_full_interaction_grid(1, 8)
    assert g.n_delta == g.n_omega == 8
    assert g.n_pairs == 8 * 7


def test_kernel_normalization_constants():
    g1 = build_grid(1, 16, 0.25)
    k1 = build_kernel(g1)
    assert k1.second_moment_constant == 1.0
    assert abs(k1.stencil_second_moment() - 1.0) <= 1e-10

    g2 = build_grid(2, 8, 0.25)
    k2 = build_kernel(g2)
    assert k2.second_moment_constant == 0.5
    assert abs(k2.stencil_second_moment() - 2.0) <= 1e-10


@pytest.mark.parametrize("dim,n,delta", [
    (1, 4, 0.3), (1, 16, 0.25), (1, 64, 0.1), (1, 128, 0.05),
    (2, 4, 0.3), (2, 8, 0.25), (2, 12, 0.2),
])
def test_kernel_normalization_everywhere(dim, n, delta):
    g = build_grid(dim, n, delta)
    k = build_kernel(g)
    target = 1.0 / k.second_moment_constant
    assert abs(k.stencil_second_moment() - target) <= 1e-10


def test_amplitude_converges_to_continuum():
    # constant profile: int_{-d}^{d} z^2 c^2 dz = 1  =>  c = sqrt(3/(2 d^3))
    analytic = np.sqrt(3.0 / (2.0 * 0.3 ** 3))
    errors = []
    for n in (16, 64, 256, 1024):
        k = build_kernel(build_grid(1, n, 0.3))
        errors.append(abs(k.amplitude - analytic) / analytic)
    assert all(e2 < e1 for e1, e2 in zip(errors, errors[1:]))
    assert errors[-1] < 2e-3


def test_kernel_requires_admissible_offsets():
    g = build_grid(1, 4, 0.2)  # spacing 0.25 > delta: no offsets inside
    with pytest.raises(ConfigurationError):
        build_kernel(g)


def test_kernel_rejects_mismatched_delta():
    g = build_grid(1, 8, 0.25)
    with pytest.raises(ConfigurationError):
        build_kernel(g, delta=0.3)
