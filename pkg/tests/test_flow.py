# -*- coding: utf-8 -*-

import gc
import math
import weakref

import numpy as np
import pytest

import schwarzflow.exceptions as exceptions
import schwarzflow.flow as flow
import schwarzflow.functional as functional
import schwarzflow.geometry as geometry


def test_config_defaults_and_overrides():
    cfg = flow.FlowConfig(epsilon=1e-3, dt=0.0)
    assert cfg.epsilon == 1e-3
    assert cfg.dt is None
    assert cfg.background == "g0_plus_eps_h"
    assert cfg.grid_n == 2048


def test_config_rejects_unknown_background():
    with pytest.raises(exceptions.ParameterError):
        flow.FlowConfig(background="flat")


def test_mode_transfer_to_s_grid(s_grid, eigen):
    mode = flow.mode_on(s_grid, eigen)
    assert mode.grid is s_grid
    assert np.all(np.isfinite(mode.u))


def test_mode_transfer_refuses_extrapolation(eigen):
    far = functional.Grid(geometry.Chart.S, 64, s_max=500.0)
    with pytest.raises(exceptions.ExtrapolationError):
        flow.mode_on(far, eigen)


def test_initial_state(s_grid, eigen):
    state = flow.initial_state(1e-3, s_grid, eigen)
    assert state.t == pytest.approx(math.log(1e-3) / -eigen.lam)
    assert state.delta == pytest.approx(1e-3)
    np.testing.assert_allclose(state.v, 1.0 + 1e-3 * state.mode.u)
    np.testing.assert_array_equal(state.background_v, state.v)
    with pytest.raises(ValueError):
        state.v[0, 0] = 2.0


def test_initial_state_rejects_negative_epsilon(s_grid, eigen):
    with pytest.raises(exceptions.ParameterError):
        flow.initial_state(-1e-3, s_grid, eigen)


def test_zero_amplitude_is_the_background(s_grid, eigen):
    state = flow.initial_state(0.0, s_grid, eigen, background="g0")
    assert state.t == 0.0
    np.testing.assert_array_equal(state.v, 1.0)
    for form in ("direct", "expanded", "weak"):
        np.testing.assert_allclose(flow.rdt_rhs(state, form), 0.0,
                                   atol=1e-9)


def test_forms_agree_when_background_is_the_metric(s_grid, eigen):
    state = flow.initial_state(1e-2, s_grid, eigen)
    direct = flow.rdt_rhs(state, "direct")
    expanded = flow.rdt_rhs(state, "expanded")
    np.testing.assert_allclose(expanded, direct,
                               atol=1e-8 * np.max(np.abs(direct)) + 1e-12)
    np.testing.assert_allclose(direct, flow.ricci_tendency(s_grid, state.v),
                               atol=1e-12)


def test_forms_agree_to_first_order_against_g0(s_grid, eigen):
    state = flow.initial_state(1e-4, s_grid, eigen, background="g0")
    direct = flow.rdt_rhs(state, "direct")
    expanded = flow.rdt_rhs(state, "expanded")
    np.testing.assert_allclose(expanded, direct,
                               atol=1e-3 * np.max(np.abs(direct)))


def test_unknown_form(s_grid, eigen):
    state = flow.initial_state(1e-3, s_grid, eigen)
    with pytest.raises(exceptions.ParameterError):
        flow.rdt_rhs(state, "strong")


def test_deturck_vector_vanishes_against_itself(s_grid, eigen):
    state = flow.initial_state(1e-2, s_grid, eigen)
    V = flow.deturck_vector(s_grid, state.v, state.background_v)
    np.testing.assert_allclose(V, 0.0, atol=1e-12)


def test_positivity_window(s_grid, eigen):
    state = flow.initial_state(0.0, s_grid, eigen, background="g0")
    broken = state.replace(1.0, np.full_like(state.v, 2.5))
    with pytest.raises(exceptions.FlowBlowupError) as info:
        broken.check_positivity()
    assert info.value.last_state is broken
    with pytest.raises(exceptions.FlowBlowupError) as info:
        broken.check_positivity(last_state=state)
    assert info.value.last_state is state


def test_step_keeps_the_background_fixed(s_grid, eigen):
    state = flow.initial_state(0.0, s_grid, eigen, background="g0")
    new = flow.step(state, 1e-3)
    assert new.t == pytest.approx(1e-3)
    np.testing.assert_allclose(new.v, 1.0, atol=1e-12)


def test_step_rejects_non_positive_dt(s_grid, eigen):
    state = flow.initial_state(1e-3, s_grid, eigen)
    with pytest.raises(exceptions.ParameterError):
        flow.step(state, 0.0)


def test_default_dt(s_grid):
    dt = flow.default_dt(s_grid)
    assert 0.0 < dt <= 1e-3


def test_cone_distance_on_the_ray(s_grid, eigen):
    h = flow.mode_on(s_grid, eigen)
    report = flow.cone_distance(0.25 * h, h)
    assert report.delta_star == pytest.approx(0.25)
    assert report.opening <= 1e-6 * functional.sobolev_norm(h)


def test_cone_distance_opposite_and_zero(s_grid, eigen):
    h = flow.mode_on(s_grid, eigen)
    c = functional.sobolev_norm(h)
    report = flow.cone_distance(-1.0 * h, h)
    assert report.delta_star == math.inf
    assert report.opening == pytest.approx(c)
    zero = functional.RadialSymTensor(s_grid, 0.0, 0.0, 0.0)
    assert flow.cone_distance(zero, h).delta_star == 0.0
    with pytest.raises(exceptions.ParameterError):
        flow.cone_distance(h, zero)


def test_short_run(s_grid, eigen):
    t0 = math.log(1e-3) / -eigen.lam
    traj = flow.run(1e-3, t0 + 0.0105, s_grid, eigen, dt=1e-3,
                    record_every=5)
    assert traj.reason == "t_end"
    assert traj.steps == 11
    assert traj.final.t == pytest.approx(t0 + 0.0105)
    assert len(traj.states) == 4
    assert set(traj.rows[0]) == set(flow.TRAJECTORY_COLUMNS)
    assert traj.warning is None
    assert np.all(np.diff(traj.column("t")) > 0)


def test_run_rejects_end_before_start(s_grid, eigen):
    with pytest.raises(exceptions.ParameterError):
        flow.run(1e-3, -100.0, s_grid, eigen)


def test_large_amplitude_is_flagged(s_grid, eigen):
    t0 = math.log(0.02) / -eigen.lam
    traj = flow.run(0.02, t0 + 0.002, s_grid, eigen, dt=1e-3)
    assert traj.warning is not None


def test_growth_fit_needs_points(s_grid, eigen):
    t0 = math.log(1e-3) / -eigen.lam
    traj = flow.run(1e-3, t0 + 0.002, s_grid, eigen, dt=1e-3)
    with pytest.raises(exceptions.DataError):
        flow.growth_fit(traj)


def test_growth_matches():
    fit = {"slope": 0.80, "ci": [0.79, 0.81]}
    assert flow.growth_matches(fit, -0.77)
    assert not flow.growth_matches({"slope": 1.0, "ci": [0.95, 1.05]}, -0.77)


def test_ancient_limit_validates_amplitudes(s_grid, eigen):
    with pytest.raises(exceptions.ParameterError):
        flow.ancient_limit([1e-4, 1e-3], 0.0, s_grid, eigen)
    with pytest.raises(exceptions.ParameterError):
        flow.ancient_limit([1e-3], 0.0, s_grid, eigen)
    with pytest.raises(exceptions.ParameterError):
        flow.ancient_limit([1e-3, 1e-4], -100.0, s_grid, eigen)


def test_ancient_limit_small(s_grid, eigen):
    t_common = math.log(1e-3) / -eigen.lam + 0.02
    result = flow.ancient_limit([1e-3, 8e-4], t_common, s_grid, eigen,
                                dt=1e-3, record_every=100, workers=2)
    assert len(result["rows"]) == 2
    assert len(result["distances"]) == 1
    assert result["rows"][-1]["distance_to_next"] is None
    assert not any(row["flagged"] for row in result["rows"])
    for traj in result["trajectories"]:
        assert traj.final.t == pytest.approx(t_common)
        assert traj.background == "g0"


def test_mode_on_its_own_grid(flow_grid, flow_eigen):
    assert flow.mode_on(flow_grid, flow_eigen) is flow_eigen.mode


def test_initial_state_rejects_t0_with_epsilon(s_grid, eigen):
    with pytest.raises(exceptions.ParameterError):
        flow.initial_state(1e-3, s_grid, eigen, t0=0.0)


def test_stepper_is_cached_per_grid():
    grid = functional.Grid(geometry.Chart.S, 32, s_max=8.0)
    first = flow._stepper(grid)
    assert flow._stepper(grid) is first
    twin = functional.Grid(geometry.Chart.S, 32, s_max=8.0)
    assert flow._stepper(twin) is not first


def test_stepper_does_not_keep_its_grid_alive():
    grid = functional.Grid(geometry.Chart.S, 32, s_max=8.0)
    flow._stepper(grid)
    ref = weakref.ref(grid)
    del grid
    gc.collect()
    assert ref() is None


def test_linearization_grows_the_mode_at_minus_lambda(flow_grid,
                                                      flow_eigen):
    delta = 1e-6
    state = flow.initial_state(delta, flow_grid, flow_eigen, background="g0")
    tendency = functional.RadialSymTensor.from_frame(
        flow_grid, flow.rdt_rhs(state, "weak"))
    expected = flow_eigen.mode * (-flow_eigen.lam * delta)
    assert functional.l2_norm(tendency - expected) \
        <= 1e-3 * functional.l2_norm(expected)


def test_zero_amplitude_run_stays_at_g0(flow_grid, flow_eigen):
    traj = flow.run(0.0, 1.0, flow_grid, flow_eigen, dt=1e-3,
                    record_every=100)
    assert traj.t0 == 0.0
    assert traj.steps == 1000
    assert traj.reason == "t_end"
    for state in traj.states:
        assert np.max(np.abs(state.v - 1.0)) <= 1e-8
    assert np.all(traj.column("norm_w") == 0.0)


def test_zero_amplitude_run_before_time_zero(s_grid, eigen):
    traj = flow.run(0.0, -3.0, s_grid, eigen, dt=1e-2)
    assert traj.t0 == pytest.approx(-3.0 + 1.0 / eigen.lam)
    assert traj.final.t == pytest.approx(-3.0)
    assert np.all(traj.column("norm_g_minus_g0") == 0.0)


@pytest.mark.slow
@pytest.mark.parametrize("background", ["g0_plus_eps_h", "g0"])
def test_growth_rate_is_minus_lambda(flow_grid, flow_eigen, background):
    t0 = math.log(1e-3) / -flow_eigen.lam
    traj = flow.run(1e-3, t0 + 1.5, flow_grid, flow_eigen,
                    background=background, record_every=20)
    assert traj.reason == "t_end"
    fit = flow.growth_fit(traj)
    assert abs(fit["slope"] + flow_eigen.lam) <= 0.05 * abs(flow_eigen.lam)
    assert flow.growth_matches(fit, flow_eigen.lam)

    # the first e-folding stays on the ray through the mode
    t = traj.column("t")
    early = t <= t0 + 1.0 / -flow_eigen.lam
    size = functional.l2_norm(flow_eigen.mode)
    assert np.all(traj.column("norm_w")[early]
                  <= 0.05 * traj.column("delta")[early] * size)


@pytest.mark.slow
def test_ancient_limit_is_cauchy(flow_grid, flow_eigen):
    epsilons = [2.0 ** -n for n in range(4, 8)]
    result = flow.ancient_limit(epsilons, -3.0, flow_grid, flow_eigen,
                                dt=1e-3, record_every=50, workers=2)
    assert all(row["reason"] == "t_end" for row in result["rows"])
    distances = result["distances"]
    assert len(distances) == 3
    assert all(b < a for a, b in zip(distances, distances[1:]))
    assert result["cauchy"]
    assert np.isfinite(result["cone_bound"])
