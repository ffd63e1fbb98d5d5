# -*- coding: utf-8 -*-

import math

import numpy as np
import pytest

import schwarzflow.deturck as deturck
import schwarzflow.exceptions as exceptions
import schwarzflow.flow as flow


@pytest.fixture(scope="module")
def short_run(s_grid, eigen):
    t0 = math.log(1e-3) / -eigen.lam
    return flow.run(1e-3, t0 + 0.05, s_grid, eigen, background="g0",
                    dt=1e-3, record_every=10)


def test_zero_amplitude_gives_the_identity(s_grid, eigen):
    traj = flow.run(0.0, 0.003, s_grid, eigen, background="g0", dt=1e-3)
    dmap = deturck.deturck_map(traj)
    assert len(dmap) == len(traj.states)
    for X in dmap.feet:
        np.testing.assert_array_equal(X, s_grid.nodes)
    np.testing.assert_array_equal(dmap.slope, 1.0)
    np.testing.assert_array_equal(dmap.y, dmap.feet)
    assert np.all(dmap.displacement() == 0.0)


def test_map_of_a_short_run(short_run, s_grid):
    dmap = deturck.deturck_map(short_run)
    assert dmap.feet.shape == (len(short_run.states), s_grid.n)
    assert dmap.y.shape == dmap.feet.shape
    assert np.all(np.diff(dmap.feet, axis=-1) > 0)
    assert np.all(np.isfinite(dmap.y))
    assert np.all(dmap.displacement() < s_grid.dx)
    assert "DeTurckMap" in repr(dmap)


def test_pullback_with_identity_feet(short_run, s_grid):
    state = short_run.final
    np.testing.assert_allclose(deturck.pullback(state, s_grid.nodes),
                               state.v, rtol=1e-10)


def test_pullback_undoes_a_scaling(flow_grid, flow_eigen):
    grid = flow_grid
    stretch = 1.001
    v = grid.metric.components(stretch * grid.nodes) / grid.g
    v[:, 1] *= stretch ** 2
    state = flow.FlowState(0.0, v, v.copy(), flow_eigen.mode,
                           flow_eigen.lam, 0.0)
    out = deturck.pullback(state, grid.nodes / stretch,
                           np.full(grid.n, 1.0 / stretch))
    np.testing.assert_allclose(out[:-20], 1.0, atol=3e-4)


def test_pullback_rejects_wrong_shape(short_run):
    with pytest.raises(exceptions.DataError):
        deturck.pullback(short_run.final, np.linspace(0.1, 1.0, 5))


def test_residuals(short_run):
    dmap = deturck.deturck_map(short_run)
    ricci, rdt = deturck.ricci_flow_residual(short_run, dmap)
    assert np.isfinite(ricci) and ricci >= 0.0
    assert np.isfinite(rdt) and rdt >= 0.0


def test_residuals_reject_mismatched_map(short_run):
    dmap = deturck.deturck_map(short_run)
    cut = deturck.DeTurckMap(dmap.delta[:-1], dmap.feet[:-1], dmap.y[:-1],
                             dmap.nodes)
    with pytest.raises(exceptions.DataError):
        deturck.ricci_flow_residual(short_run, cut)


@pytest.mark.parametrize("ricci, rdt, expected", [
    (1e-6, 1e-6, True),
    (9e-6, 1e-6, True),
    (2e-5, 1e-6, False),
    (0.0, 0.0, True),
])
def test_residual_check(ricci, rdt, expected):
    assert deturck.residual_check(ricci, rdt) is expected


@pytest.mark.slow
def test_pulled_back_flow_is_a_ricci_flow(flow_grid, flow_eigen):
    epsilon = 2.0 ** -7
    t0 = math.log(epsilon) / -flow_eigen.lam
    traj = flow.run(epsilon, t0 + 2.0, flow_grid, flow_eigen,
                    background="g0", dt=1e-3, record_every=20)
    assert traj.reason == "t_end"
    dmap = deturck.deturck_map(traj)
    ricci, rdt = deturck.ricci_flow_residual(traj, dmap)
    assert rdt > 0.0
    assert deturck.residual_check(ricci, rdt)
