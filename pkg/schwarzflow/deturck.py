#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""The de Turck diffeomorphism of a recorded Ricci-de Turck trajectory.

A solution g~ of the Ricci-de Turck flow becomes a Ricci flow after
pulling back along the flow of -V. Written in the amplitude
delta = exp(-lambda t), the feet X(delta; x0) of that flow solve::

    dX/ddelta = -a(X, delta),   a = V^1 / (-lambda delta),   X(0) = x0

and the map y of the de Turck equation is the inverse of x0 -> X. Before
the first record a is held at its first recorded value, where V is still
linear in delta.
"""

import logging

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import CubicSpline

# Original modules
import schwarzflow.constants as constants
import schwarzflow.exceptions as exceptions
import schwarzflow.flow as flow
import schwarzflow.functional as functional

logger = logging.getLogger(__name__)


class DeTurckMap(object):

    """Feet and inverse map of the de Turck diffeomorphism.

    :param delta: Amplitudes of the recorded states, increasing.
    :param feet: X at every record, shape (records, n).
    :param y: The inverse map at the nodes, same shape.
    :param nodes: The s grid nodes x0.
    :param slope: (optional) dX/dx0 at every record; ones by default.

    """

    def __init__(self, delta, feet, y, nodes, slope=None):
        self.delta = np.asarray(delta, dtype=float)
        self.feet = np.asarray(feet, dtype=float)
        self.y = np.asarray(y, dtype=float)
        self.nodes = np.asarray(nodes, dtype=float)
        if slope is None:
            slope = np.ones_like(self.feet)
        self.slope = np.asarray(slope, dtype=float)

    def __len__(self):
        return self.delta.size

    def displacement(self):
        """max |X - x0| per record.

        """

        return np.max(np.abs(self.feet - self.nodes), axis=-1)

    def __repr__(self):
        return "DeTurckMap(records={}, max_shift={:.3g})".format(
            len(self), float(np.max(self.displacement(), initial=0.0)))


def _speeds(trajectory):
    """Splines of a = V^1 / (-lambda delta) at each record, through zeros
    at s = 0 and s = s_max.

    """

    grid = trajectory.grid
    lam = trajectory.lam
    xs = np.concatenate([[0.0], grid.nodes, [grid.faces[-1]]])
    splines = []
    for state in trajectory.states:
        V = flow.deturck_vector(grid, state.v, state.background_v)
        splines.append(CubicSpline(
            xs, np.concatenate([[0.0], V / (-lam * state.delta), [0.0]])))
    return splines


def deturck_map(trajectory):
    """Integrates the characteristics of the de Turck equation.

    The slope J = dX/dx0 is carried along with dJ/ddelta = -a'(X) J.

    :param trajectory: A :class:`schwarzflow.flow.Trajectory` on an s grid.
    :rtype: :class:`DeTurckMap`
    :raises schwarzflow.exceptions.DeTurckCrossingError: If two feet cross;
                                                         ``location`` holds
                                                         (delta, x0).
    :raises schwarzflow.exceptions.FlowError: If the integrator fails.

    """

    grid = trajectory.grid
    x0 = grid.nodes
    n = x0.size
    deltas = np.array([state.delta for state in trajectory.states])
    if np.any(np.diff(deltas) <= 0):
        raise exceptions.DataError(msg="records must increase in delta")
    splines = _speeds(trajectory)

    if trajectory.epsilon == 0.0 or not any(np.any(s.c) for s in splines):
        feet = np.tile(x0, (deltas.size, 1))
        return DeTurckMap(deltas, feet, feet.copy(), x0)

    def speed(delta, X, nu=0):
        k = int(np.searchsorted(deltas, delta, side="right")) - 1
        if k < 0:
            return splines[0](X, nu)
        elif k >= deltas.size - 1:
            return splines[-1](X, nu)
        w = (delta - deltas[k]) / (deltas[k + 1] - deltas[k])
        return (1.0 - w) * splines[k](X, nu) + w * splines[k + 1](X, nu)

    def rhs(delta, z):
        X, J = z[:n], z[n:]
        return np.concatenate([-speed(delta, X), -speed(delta, X, 1) * J])

    sol = solve_ivp(rhs, (0.0, deltas[-1]), np.concatenate([x0, np.ones(n)]),
                    t_eval=deltas, rtol=1e-10, atol=1e-12 * grid.faces[-1])
    if not sol.success:
        raise exceptions.FlowError(msg="characteristics failed: {}".format(
            sol.message))
    feet = sol.y[:n].T
    slope = sol.y[n:].T

    for delta, X in zip(deltas, feet):
        bad = np.flatnonzero(np.diff(X) <= 0.0)
        if bad.size:
            location = (float(delta), float(x0[bad[0]]))
            raise exceptions.DeTurckCrossingError(
                msg="characteristics cross at delta={:.6g}, s={:.6g}".format(
                    *location),
                location=location)
    y = np.array([np.interp(x0, X, x0) for X in feet])
    logger.debug("de Turck map over %d records, max shift %.3g",
                 deltas.size, float(np.max(np.abs(feet - x0))))
    return DeTurckMap(deltas, feet, y, x0, slope)


def _profile(grid, v):
    """Cubic spline of frame profiles with the bolt and outer ghosts.

    """

    xs = np.concatenate([[-grid.nodes[0]], grid.nodes,
                         [2.0 * grid.faces[-1] - grid.nodes[-1]]])
    vs = np.concatenate([v[:1], v, 2.0 - v[-1:]], axis=0)
    return CubicSpline(xs, vs, axis=0)


def pullback(state, feet, slope=None):
    """Frame profiles of the pull-back of ``state`` along x -> X(x).

    :param feet: X at the nodes of the state's grid.
    :param slope: (optional) dX/dx at the nodes; a finite difference of
                  ``feet`` when omitted.
    :returns: Array of shape (n, 3).

    """

    grid = state.grid
    X = np.asarray(feet, dtype=float)
    if X.shape != grid.nodes.shape:
        raise exceptions.DataError(msg="feet do not match the grid")
    if slope is None:
        slope = np.gradient(X, grid.nodes)
    v = _profile(grid, state.v)(X)
    g0X = grid.metric.components(X)
    out = v * g0X / grid.g
    out[:, 1] *= np.asarray(slope, dtype=float) ** 2
    return out


def _mismatch(grid, records):
    """max over intervals of the trapezoid defect of d/dt v = rate.

    :param records: Triples ``(t, v, rate)``.

    """

    worst = 0.0
    for (t0, v0, rate0), (t1, v1, rate1) in zip(records, records[1:]):
        defect = (v1 - v0) / (t1 - t0) - 0.5 * (rate0 + rate1)
        norm = functional.l2_norm(
            functional.RadialSymTensor.from_frame(grid, defect))
        worst = max(worst, norm)
    return worst


def ricci_flow_residual(trajectory, dmap):
    """Residuals of the pulled-back Ricci flow and of the stored flow.

    Both use the same trapezoid defect between consecutive records, and
    both against closed-form tendencies: -2 Ric for the pull-back and the
    direct Ricci-de Turck form for the stored states. Neither is the
    tendency the time stepper integrates, so both carry the same spatial
    truncation.

    :returns: ``(ricci_residual, rdt_residual)``

    """

    grid = trajectory.grid
    states = trajectory.states
    if len(states) != len(dmap):
        raise exceptions.DataError(msg="map and trajectory do not match")
    if len(states) < 2:
        raise exceptions.DataError(msg="need at least two records")

    pulled = []
    for state, X, J in zip(states, dmap.feet, dmap.slope):
        v = pullback(state, X, J)
        pulled.append((state.t, v, flow.ricci_tendency(grid, v)))
    ricci = _mismatch(grid, pulled)
    rdt = _mismatch(grid, [(s.t, s.v, flow.rdt_rhs(s, form="direct"))
                           for s in states])
    logger.info("de Turck residuals: ricci %.3g, rdt %.3g", ricci, rdt)
    return ricci, rdt


def residual_check(ricci, rdt, factor=constants.DETURCK_FACTOR):
    return bool(ricci <= factor * rdt)
