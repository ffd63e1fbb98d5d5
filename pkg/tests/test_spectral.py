# -*- coding: utf-8 -*-

import numpy as np
import pytest

import schwarzflow.exceptions as exceptions
import schwarzflow.functional as functional
import schwarzflow.geometry as geometry
import schwarzflow.spectral as spectral
from schwarzflow.geometry import Chart


def dense_from_lower(ab):
    n = ab.shape[1]
    out = np.zeros((n, n))
    for k in range(ab.shape[0]):
        idx = np.arange(n - k)
        out[idx + k, idx] = ab[k, :n - k]
        out[idx, idx + k] = ab[k, :n - k]
    return out


def dense_from_general(ab, lower, upper):
    n = ab.shape[1]
    out = np.zeros((n, n))
    for i in range(n):
        for j in range(max(0, i - lower), min(n, i + upper + 1)):
            out[i, j] = ab[upper + i - j, j]
    return out


def test_symmetric_banded_matvec():
    rng = np.random.default_rng(0)
    ab = rng.normal(size=(4, 20))
    x = rng.normal(size=20)
    np.testing.assert_allclose(spectral.symmetric_banded_matvec(ab, x),
                               dense_from_lower(ab) @ x, rtol=1e-12)


def test_general_banded_matvec():
    rng = np.random.default_rng(1)
    ab = rng.normal(size=(5, 12))
    x = rng.normal(size=12)
    np.testing.assert_allclose(spectral.general_banded_matvec(ab, 2, 2, x),
                               dense_from_general(ab, 2, 2) @ x, rtol=1e-12)


def test_assembly_matches_discrete_forms():
    grid = functional.Grid(Chart.P, 32)
    mats = spectral.assemble(grid)
    rng = np.random.default_rng(2)
    x = rng.normal(size=3 * grid.n)
    h = functional.RadialSymTensor.from_vector(grid, x)
    assert mats.quadratic(x) == pytest.approx(functional.energy(h),
                                              rel=1e-10)
    assert mats.mass(x) == pytest.approx(functional.l2_norm(h) ** 2,
                                         rel=1e-12)
    assert mats.size == 3 * grid.n


def test_assembly_rejects_small_grids():
    with pytest.raises(exceptions.ParameterError):
        spectral.assemble(functional.Grid(Chart.P, 8))


def test_singular_mass_is_rejected():
    grid = functional.Grid(Chart.P, 16)
    mats = spectral.assemble(grid)
    B = mats.B_diag.copy()
    B[3] = 0.0
    with pytest.raises(exceptions.AssemblyError):
        spectral.QuadraticFormMatrices(grid, mats.A_band, B)


def test_lowest_eigenvalue(eigen):
    assert -0.9 < eigen.lam < -0.65
    assert eigen.second_ritz > eigen.lam
    assert functional.l2_norm(eigen.mode) == pytest.approx(1.0, rel=1e-10)
    assert eigen.grid.n == 256


def test_mode_sign_is_fixed(eigen):
    u0 = eigen.mode.u0
    first = u0[np.flatnonzero(np.abs(u0) > 1e-14 * np.max(np.abs(u0)))[0]]
    assert first > 0


def test_mode_is_stationary_for_the_form(eigen):
    mats = spectral.assemble(eigen.grid)
    x = eigen.mode.vector()
    residual = mats.matvec(x) - eigen.lam * mats.B_diag * x
    assert np.linalg.norm(residual / np.sqrt(mats.B_diag)) < 1e-3


def test_shift_above_spectrum_fails(p_grid):
    with pytest.raises(exceptions.SolverError):
        spectral.min_eig(spectral.assemble(p_grid), shift=0.0)


def test_iteration_cap_reports_last_iterate(p_grid):
    with pytest.raises(exceptions.SolverError) as info:
        spectral.min_eig(spectral.assemble(p_grid), max_iter=1, ritz=False)
    assert info.value.last_iterate is not None


def test_rayleigh_quotients_bound_the_eigenvalue(eigen, p_grid):
    mats = spectral.assemble(p_grid)
    for n in (3, 10, 30):
        h = functional.hat_tensor(p_grid, n=n)
        assert spectral.rayleigh_upper_bound(mats, h) >= eigen.lam - 1e-9


def test_rayleigh_rejects_zero(p_grid):
    mats = spectral.assemble(p_grid)
    with pytest.raises(exceptions.ParameterError):
        spectral.rayleigh_upper_bound(
            mats, functional.RadialSymTensor(p_grid, 0.0, 0.0, 0.0))


def test_upper_bound_from_certificate(eigen):
    bound = spectral.upper_bound_from_lemma36()
    assert bound == pytest.approx(-0.1038, abs=1e-3)
    assert bound >= eigen.lam


def test_lichnerowicz_band_layout(p_grid):
    ab, lower, upper = spectral.lichnerowicz_banded(p_grid)
    assert (lower, upper) == (3, 3)
    assert ab.shape == (7, 3 * p_grid.n)
    assert np.all(np.isfinite(ab))


def test_decay_report(eigen):
    report = spectral.decay_check(eigen)
    assert report.c0 >= 0.0 and report.c1 >= 0.0
    assert report.bolt_value >= 0.0
    assert isinstance(report.bolt_regular, bool)
    assert set(report.as_dict()) == {"c0", "c1", "bounded_inner",
                                     "bounded_outer", "bolt_value",
                                     "bolt_regular"}


def test_gauge_diagnostic_keys(eigen):
    diag = spectral.gauge_diagnostic(eigen)
    assert set(diag) == {"trace_l2", "divergence_l2", "gauge_l2"}
    assert all(np.isfinite(v) and v >= 0 for v in diag.values())


@pytest.mark.slow
def test_eigenvalue_converges_on_fine_grids():
    lams = [spectral.solve(n, ritz=False).lam for n in (1024, 2048, 4096)]
    # second-order extrapolation from the two finest grids
    limit = lams[2] + (lams[2] - lams[1]) / 3.0
    assert limit < 0.0
    assert abs(lams[2] - limit) <= 1e-4 * abs(limit)
    assert abs(lams[0] - limit) > abs(lams[2] - limit)
    assert abs(lams[1] - lams[2]) < abs(lams[0] - lams[1])


@pytest.mark.slow
def test_fine_grid_agrees_with_coarse_grids(eigen):
    fine = spectral.solve(4096, ritz=False)
    assert fine.iterations > 1
    assert fine.lam == pytest.approx(eigen.lam, rel=1e-3)
    mats = spectral.assemble(fine.grid)
    assert spectral.eigen_residual(mats, fine.mode.vector(), fine.lam) \
        <= 1e-5 * max(1.0, abs(fine.lam))


def test_iteration_stops_on_the_eigen_residual(eigen, p_grid):
    assert eigen.iterations > 1
    mats = spectral.assemble(p_grid)
    gap = spectral.eigen_residual(mats, eigen.mode.vector(), eigen.lam)
    assert gap <= 1e-5 * max(1.0, abs(eigen.lam))


def test_loose_tolerance_stops_earlier(p_grid):
    mats = spectral.assemble(p_grid)
    loose = spectral.min_eig(mats, tol=1e-4, ritz=False)
    tight = spectral.min_eig(mats, ritz=False)
    assert loose.iterations < tight.iterations
    assert loose.lam == pytest.approx(tight.lam, abs=1e-3)


def test_weak_operator_is_minus_mass_inverse_times_stiffness():
    grid = functional.Grid(Chart.S, 16, s_max=6.0)
    mats = spectral.assemble(grid)
    ab, lower, upper = spectral.weak_lichnerowicz_banded(mats)
    expected = -dense_from_lower(mats.A_band) / mats.B_diag[:, None]
    np.testing.assert_allclose(dense_from_general(ab, lower, upper),
                               expected, rtol=1e-12)


def test_flow_grid_eigenpair(flow_grid, flow_eigen, eigen):
    assert flow_eigen.grid is flow_grid
    assert flow_eigen.lam == pytest.approx(eigen.lam, rel=0.05)
    mats = spectral.assemble(flow_grid)
    ab, lower, upper = spectral.weak_lichnerowicz_banded(mats)
    x = flow_eigen.mode.vector()
    gap = spectral.general_banded_matvec(ab, lower, upper, x) \
        + flow_eigen.lam * x
    assert np.sqrt(np.sum(mats.B_diag * gap ** 2)) \
        <= 2e-5 * max(1.0, abs(flow_eigen.lam))


@pytest.mark.slow
def test_solve_uses_p_grid():
    result = spectral.solve(512, ritz=False)
    assert result.grid.chart is geometry.Chart.P
    assert result.second_ritz is None


def test_hand_built_diagonal_problem(p_grid):
    size = 3 * p_grid.n
    A = np.zeros((4, size))
    A[0] = 1.0
    A[0, 0] = -1.0
    mats = spectral.QuadraticFormMatrices(p_grid, A, np.ones(size))
    result = spectral.min_eig(mats)
    assert result.lam == pytest.approx(-1.0, abs=1e-9)
    assert result.second_ritz == pytest.approx(1.0)
    assert result.mode.u0[0] > 0.0


def test_lichnerowicz_of_zero(p_grid):
    zero = functional.RadialSymTensor(p_grid, 0.0, 0.0, 0.0)
    np.testing.assert_array_equal(spectral.lichnerowicz_apply(zero).u, 0.0)


def test_mode_residual_is_recorded(eigen):
    assert eigen.residual_l2 == pytest.approx(
        spectral.residual_l2(eigen.mode, eigen.lam))


def test_repeated_solves_are_identical(p_grid):
    a = spectral.min_eig(spectral.assemble(p_grid), ritz=False)
    b = spectral.min_eig(spectral.assemble(p_grid), ritz=False)
    assert a.lam == b.lam
    np.testing.assert_array_equal(a.mode.u, b.mode.u)
