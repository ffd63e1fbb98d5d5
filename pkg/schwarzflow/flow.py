#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""Radially symmetric diagonal Ricci-de Turck flow started along the
unstable mode of g0.

The evolving metric is stored by frame profiles v_i = g_ii / g0_ii on a
:class:`schwarzflow.functional.Grid` in the s chart. The flow is::

    d/dt g = -2 Ric(g) + L_V g,   V^k = g^ij (Gamma^k_ij - bar Gamma^k_ij)

with a fixed background bar g, either g0 + eps h or g0. Time is tracked
together with delta = exp(-lambda t), the amplitude of the mode in the
linear regime; a run starting at amplitude eps starts at
t0 = log(eps) / (-lambda).

The linear part of the tendency is the weak form of Delta_L assembled by
:func:`schwarzflow.spectral.assemble` on the flow grid, so the eigenpair
of :func:`schwarzflow.spectral.solve_on` on that grid grows at exactly
-lambda. The closed-form tendency contributes only its nonlinear
remainder.
"""

import concurrent.futures
import logging
import math
import weakref

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.linalg import solve_banded
from scipy.stats import linregress

# Original modules
import schwarzflow.constants as constants
import schwarzflow.datatypes as datatypes
import schwarzflow.exceptions as exceptions
import schwarzflow.functional as functional
import schwarzflow.geometry as geometry
import schwarzflow.spectral as spectral

logger = logging.getLogger(__name__)

#: Column order of the trajectory diagnostics.
TRAJECTORY_COLUMNS = ("t", "delta", "norm_g_minus_g0", "norm_w",
                      "cone_opening", "farfield_max")


class FlowConfig(object):

    """Parameters of one flow run.

    :param dict values: (optional) Overrides of
                        :data:`schwarzflow.constants.DEFAULTS`.

    """

    def __init__(self, values=None, **kwargs):
        merged = dict(constants.DEFAULTS)
        merged.update(values or {})
        merged.update(kwargs)
        if merged["background"] not in constants.BACKGROUNDS:
            raise exceptions.ParameterError(
                msg="unknown background {!r}".format(merged["background"]))

        #: Amplitude of the initial perturbation.
        self.epsilon = float(merged["epsilon"])

        #: Final time.
        self.t_end = float(merged["t_end"])

        #: Number of cells of the s grid.
        self.grid_n = int(merged["grid_n"])

        #: Outer face of the s grid.
        self.s_max = float(merged["s_max"])

        #: Time step; zero selects the stability-limited default.
        self.dt = float(merged["dt"]) or None

        #: Either ``"g0"`` or ``"g0_plus_eps_h"``.
        self.background = merged["background"]

        #: Cells of the p grid used for the eigenmode.
        self.eigen_n = int(merged["eigen_n"])

        #: Steps between recorded states.
        self.record_every = int(merged["record_every"])

        #: Amplitudes above this cap are treated as nonlinear runs.
        self.eps_cap = float(merged["eps_cap"])

        #: Number of e-foldings used by the growth fit.
        self.linear_efolds = float(merged["linear_efolds"])

    def grid(self):
        return functional.Grid(geometry.Chart.S, self.grid_n, self.s_max)


def mode_on(grid, eigen):
    """The eigenmode on ``grid``.

    A mode computed on ``grid`` itself is returned as is; a mode of another
    grid is interpolated, which only approximates the discrete eigenmode of
    ``grid``.

    :raises schwarzflow.exceptions.ExtrapolationError: If ``grid`` reaches
                                                        beyond the p grid.

    """

    source = eigen.mode.grid
    if source is grid:
        return eigen.mode
    p = grid.p
    if p[0] < source.p[0] or p[-1] > source.p[-1]:
        raise exceptions.ExtrapolationError(
            msg="the grid reaches outside the eigenmode's grid")
    spline = CubicSpline(source.p, eigen.mode.u, axis=0)
    return functional.RadialSymTensor.from_frame(grid, spline(p))


class FlowState(object):

    """An immutable snapshot of the flow.

    :param float t: Flow time.
    :param v: Frame profiles of g, shape (n, 3).
    :param background_v: Frame profiles of the background.
    :param mode: The eigenmode on the same grid.
    :param float lam: Its eigenvalue (negative).
    :param float epsilon: Starting amplitude.

    """

    def __init__(self, t, v, background_v, mode, lam, epsilon):
        self.t = float(t)
        self.v = np.asarray(v, dtype=float)
        self.v.setflags(write=False)
        self.background_v = background_v
        self.mode = mode
        self.lam = float(lam)
        self.epsilon = float(epsilon)

    @property
    def grid(self):
        return self.mode.grid

    @property
    def delta(self):
        """exp(-lambda t), recomputed from t.

        """

        return math.exp(-self.lam * self.t)

    @property
    def amplitude(self):
        """Amplitude of the mode in the linear flow; zero for eps = 0.

        """

        return self.delta if self.epsilon > 0 else 0.0

    def replace(self, t, v):
        return FlowState(t, v, self.background_v, self.mode, self.lam,
                         self.epsilon)

    def perturbation(self):
        """g - g0 as a radial tensor.

        """

        return functional.RadialSymTensor.from_frame(self.grid, self.v - 1.0)

    def check_positivity(self, last_state=None):
        """Raises if g left the window (1/2, 2) around the background.

        """

        ratio = self.v / self.background_v
        lo, hi = constants.POSITIVITY
        if not np.all(np.isfinite(ratio)) or np.any(ratio <= lo) \
                or np.any(ratio >= hi):
            bad = int(np.argmax(np.any((ratio <= lo) | (ratio >= hi)
                                       | ~np.isfinite(ratio), axis=-1)))
            raise exceptions.FlowBlowupError(
                msg="positivity lost at t={:.6g}, s={:.4g}".format(
                    self.t, self.grid.nodes[bad]),
                last_state=last_state if last_state is not None else self)

    def __repr__(self):
        return "FlowState(t={:.6g}, delta={:.6g})".format(self.t, self.delta)


def initial_state(epsilon, grid, eigen, background="g0_plus_eps_h", t0=None):
    """The state g0 + eps h at t0 = log(eps) / (-lambda).

    :param t0: (optional) Start time of the unperturbed run, eps = 0,
               which has no t0 of its own; 0 by default.
    :raises schwarzflow.exceptions.ParameterError: For eps < 0, an unknown
                                                    background or a t0
                                                    given with eps > 0.

    """

    if epsilon < 0:
        raise exceptions.ParameterError(msg="epsilon must be non-negative")
    if background not in constants.BACKGROUNDS:
        raise exceptions.ParameterError(
            msg="unknown background {!r}".format(background))
    if epsilon > 0 and t0 is not None:
        raise exceptions.ParameterError(
            msg="t0 is fixed by epsilon={}".format(epsilon))
    mode = mode_on(grid, eigen)
    v = 1.0 + epsilon * mode.u
    vbar = v.copy() if background == "g0_plus_eps_h" else np.ones_like(v)
    vbar.setflags(write=False)
    if epsilon > 0:
        t0 = math.log(epsilon) / (-eigen.lam)
    state = FlowState(t0 or 0.0, v, vbar, mode, eigen.lam, epsilon)
    state.check_positivity()
    return state


# -- right-hand sides ------------------------------------------------------

def _ghosted(grid, v):
    """Profiles with the even bolt ghost and the outer ghost odd about 1.

    """

    return np.concatenate([v[:1], v, 2.0 - v[-1:]], axis=0)


def frame_derivatives(grid, v):
    """Centred first and second s-derivatives of frame profiles.

    """

    vv = _ghosted(grid, v)
    d1 = (vv[2:] - vv[:-2]) / (2.0 * grid.dx)
    d2 = (vv[2:] - 2.0 * vv[1:-1] + vv[:-2]) / grid.dx ** 2
    return d1, d2


def metric_jet(grid, v):
    """(g, dg, d2g) of the metric with frame profiles ``v``.

    """

    dv, d2v = frame_derivatives(grid, v)
    g0, dg0, d2g0 = grid.g, grid.dg, grid.d2g
    return (v * g0, dv * g0 + v * dg0,
            d2v * g0 + 2.0 * dv * dg0 + v * d2g0)


def _direct_parts(grid, v, vbar):
    g, dg, d2g = metric_jet(grid, v)
    gb, dgb, d2gb = metric_jet(grid, vbar)
    (a1, b1, c1), (a2, b2, c2) = [d.T for d in
                                  geometry.log_derivatives(g, dg, d2g)]
    (ab1, bb1, cb1), (ab2, bb2, cb2) = [
        d.T for d in geometry.log_derivatives(gb, dgb, d2gb)]
    B = g[:, 1]
    Bb = gb[:, 1]

    rho = (vbar / v).T
    drho = rho * (dgb / gb - dg / g).T

    F = (-a1 + b1 - 2.0 * c1) / (2.0 * B)
    dF = (-a2 + b2 - 2.0 * c2) / (2.0 * B) - b1 * F
    N = -rho[0] * ab1 + rho[1] * bb1 - 2.0 * rho[2] * cb1
    dN = (-(drho[0] * ab1 + rho[0] * ab2)
          + (drho[1] * bb1 + rho[1] * bb2)
          - 2.0 * (drho[2] * cb1 + rho[2] * cb2))
    Fb = N / (2.0 * Bb)
    dFb = dN / (2.0 * Bb) - bb1 * Fb
    return {"k": geometry.sectional_curvatures(g, dg, d2g),
            "logd": (a1, b1, c1), "V": F - Fb, "dV": dF - dFb}


def deturck_vector(grid, v, vbar):
    """The radial component V^1 of the de Turck field in the s chart.

    """

    return _direct_parts(grid, v, vbar)["V"]


def _ricci_terms(v, k):
    k01, k02, k12, k23 = k.T
    return np.stack([-2.0 * (k01 + 2.0 * k02),
                     -2.0 * (k01 + 2.0 * k12),
                     -2.0 * (k02 + k12 + k23)], axis=-1) * v


def ricci_tendency(grid, v):
    """Frame tendencies of -2 Ric(g) alone.

    """

    g, dg, d2g = metric_jet(grid, v)
    return _ricci_terms(v, geometry.sectional_curvatures(g, dg, d2g))


def _rhs_direct(grid, v, vbar):
    parts = _direct_parts(grid, v, vbar)
    a1, b1, c1 = parts["logd"]
    V, dV = parts["V"], parts["dV"]
    lie = np.stack([V * a1, V * b1 + 2.0 * dV, V * c1], axis=-1) * v
    return _ricci_terms(v, parts["k"]) + lie


def _rhs_expanded(grid, v, vbar):
    g, dg, d2g = metric_jet(grid, v)
    gb, dgb, d2gb = metric_jet(grid, vbar)

    gm = geometry.metric_matrix(g)
    dgm = geometry.metric_matrix(dg)
    d2gm = geometry.metric_matrix(d2g)
    gi = 1.0 / np.concatenate([g, g[:, 2:3]], axis=-1)
    gbi = 1.0 / np.concatenate([gb, gb[:, 2:3]], axis=-1)

    G = geometry.christoffel_tensor(gb, dgb)
    dG = geometry.christoffel_tensor_derivative(gb, dgb, d2gb)
    Rb = geometry.riemann_tensor(gb, dgb, d2gb)

    # T[k, i, j] = bar nabla_k g_ij
    D = np.zeros(G.shape)
    D[:, 1] = dgm
    T = (D - np.einsum("nmki,nmj->nkij", G, gm)
         - np.einsum("nmkj,nim->nkij", G, gm))

    # radial derivative of T[1]
    ta = (np.einsum("nmi,nmj->nij", dG[:, 1, :, 1, :], gm)
          + np.einsum("nmi,nmj->nij", G[:, :, 1, :], dgm))
    dT1 = d2gm - ta - np.swapaxes(ta, 1, 2)

    diffusion = (gi[:, 1, None, None] * dT1
                 - np.einsum("na,nmaa,nmij->nij", gi, G, T)
                 - np.einsum("na,nmai,namj->nij", gi, G, T)
                 - np.einsum("na,nmaj,naim->nij", gi, G, T))

    # g^ab g_ip bar g^pq bar R_jaqb for diagonal g and bar g
    half = np.einsum("na,ni,ni,njaia->nij", gi, 1.0 / gi, gbi, Rb)
    curvature = -(half + np.swapaxes(half, 1, 2))

    quadratic = 0.5 * (
        np.einsum("na,np,nipa,njpa->nij", gi, gi, T, T, optimize=True)
        + 2.0 * np.einsum("na,np,najp,npia->nij", gi, gi, T, T,
                          optimize=True)
        - 2.0 * np.einsum("na,np,najp,naip->nij", gi, gi, T, T,
                          optimize=True)
        - 2.0 * np.einsum("na,np,njpa,naip->nij", gi, gi, T, T,
                          optimize=True)
        - 2.0 * np.einsum("na,np,nipa,najp->nij", gi, gi, T, T,
                          optimize=True))

    total = diffusion + curvature + quadratic
    return np.stack([total[:, 0, 0], total[:, 1, 1], total[:, 2, 2]],
                    axis=-1) / grid.g


def rdt_rhs(state, form="expanded"):
    """Frame tendencies d/dt v of the Ricci-de Turck flow.

    :param str form: (optional) ``"expanded"`` evaluates the background
                     covariant form with Shi's quadratic terms,
                     ``"direct"`` evaluates -2 Ric + L_V g in closed form,
                     ``"weak"`` is the tendency :func:`step` integrates:
                     the direct form with its linearization at g0 replaced
                     by the weak form of Delta_L.
    :returns: Array of shape (n, 3).
    :raises schwarzflow.exceptions.FlowBlowupError: If ``state`` is outside
                                                   the positivity window.

    """

    state.check_positivity()
    if form == "expanded":
        return _rhs_expanded(state.grid, state.v, state.background_v)
    elif form == "direct":
        return _rhs_direct(state.grid, state.v, state.background_v)
    elif form == "weak":
        stepper = _stepper(state.grid)
        dev = state.v - 1.0
        return stepper.linear(dev) + stepper.remainder(
            state.grid, state.v, state.background_v)
    raise exceptions.ParameterError(msg="unknown form {!r}".format(form))


class _Stepper(object):

    """Linear part of the IMEX scheme for one grid.

    The implicit operator is -B^-1 A, the weak form of Delta_L of g0 acting
    on v - 1. It holds the diffusion and the stiff couplings at the bolt.
    No reference to the grid is kept, so a cached stepper does not keep its
    grid alive.

    """

    def __init__(self, grid):
        mats = spectral.assemble(grid)
        self.A_band = mats.A_band
        self.B_diag = mats.B_diag
        self.ab, self.lower, self.upper = \
            spectral.weak_lichnerowicz_banded(mats)
        ones = np.ones((grid.n, 3))
        #: Discrete tendency of g0 itself, zero up to rounding.
        self.rest = _rhs_direct(grid, ones, ones)
        # (dt, system) swapped as one tuple; runs may share a stepper
        self._cached = (None, None)

    def linear(self, dev):
        x = dev.reshape(-1)
        return (-spectral.symmetric_banded_matvec(self.A_band, x)
                / self.B_diag).reshape(dev.shape)

    def remainder(self, grid, v, vbar):
        """Closed-form tendency minus its linearization at g0.

        The linearization is a central difference along v - 1.

        """

        out = _rhs_direct(grid, v, vbar) - self.rest
        dev = v - 1.0
        scale = float(np.max(np.abs(dev)))
        if scale > 0.0:
            tau = constants.LINEARIZATION_STEP
            ones = np.ones_like(v)
            unit = dev / scale
            out -= scale * (_rhs_direct(grid, 1.0 + tau * unit, ones)
                            - _rhs_direct(grid, 1.0 - tau * unit, ones)) \
                / (2.0 * tau)
        return out

    def solve(self, dt, rhs):
        """Solves (1 - dt/2 L) x = rhs.

        """

        cached_dt, system = self._cached
        if dt != cached_dt:
            system = -0.5 * dt * self.ab
            system[self.upper] += 1.0
            self._cached = (dt, system)
        try:
            out = solve_banded((self.lower, self.upper), system,
                               rhs.reshape(-1))
        except (ValueError, np.linalg.LinAlgError) as err:
            raise exceptions.FlowError(msg="implicit solve failed: {}".format(
                err))
        return out.reshape(rhs.shape)


_STEPPERS = weakref.WeakKeyDictionary()


def _stepper(grid):
    """The stepper of ``grid``, built once and dropped with the grid.

    """

    stepper = _STEPPERS.get(grid)
    if stepper is None:
        stepper = _STEPPERS[grid] = _Stepper(grid)
    return stepper


def step(state, dt):
    """One IMEX step: Crank-Nicolson on the linear part, forward Euler on
    the nonlinear remainder.

    The linear part of a step multiplies the mode by
    (1 - dt lambda / 2) / (1 + dt lambda / 2), which is exp(-lambda dt) up
    to third order in dt.

    :rtype: :class:`FlowState`
    :raises schwarzflow.exceptions.FlowError: If the solve fails.
    :raises schwarzflow.exceptions.FlowBlowupError: If positivity is lost;
                                                   carries ``state``.

    """

    if not dt > 0:
        raise exceptions.ParameterError(msg="dt must be positive")
    grid = state.grid
    stepper = _stepper(grid)
    dev = state.v - 1.0
    rhs = (dev + 0.5 * dt * stepper.linear(dev)
           + dt * stepper.remainder(grid, state.v, state.background_v))
    new = state.replace(state.t + dt, 1.0 + stepper.solve(dt, rhs))
    new.check_positivity(last_state=state)
    return new


def default_dt(grid):
    """min(1e-3, 0.25 ds^2 / max g^11) on the background.

    """

    return min(constants.DT_MAX,
               constants.CFL * grid.dx ** 2 * float(np.min(grid.g[:, 1])))


def cone_distance(phi, h):
    """Distance of ``phi`` to the ray through ``h`` in the cone sense.

    Minimizes ||phi - delta h|| / delta over delta >= 0 in W^{1,2}.

    :param phi: g - g0 as a :class:`functional.RadialSymTensor`.
    :param h: The direction.
    :rtype: :class:`schwarzflow.datatypes.ConeReport`
    :raises schwarzflow.exceptions.ParameterError: If h vanishes.

    """

    c = functional.sobolev_inner(h, h)
    if c <= 0.0:
        raise exceptions.ParameterError(msg="the direction h vanishes")
    a = functional.sobolev_inner(phi, phi)
    b = functional.sobolev_inner(phi, h)
    if a == 0.0:
        return datatypes.ConeReport(opening=math.sqrt(c), delta_star=0.0)
    if b > 0.0:
        return datatypes.ConeReport(opening=math.sqrt(max(0.0, c - b * b / a)),
                                    delta_star=a / b)
    return datatypes.ConeReport(opening=math.sqrt(c), delta_star=math.inf)


class Trajectory(object):

    """Recorded states and diagnostics of one run.

    """

    def __init__(self, epsilon, t0, lam, background, grid):
        self.epsilon = epsilon
        self.t0 = t0
        self.lam = lam
        self.background = background
        self.grid = grid

        #: Recorded :class:`FlowState` snapshots.
        self.states = []

        #: Diagnostic rows, see :data:`TRAJECTORY_COLUMNS`.
        self.rows = []

        #: ``"t_end"`` or ``"blowup"``.
        self.reason = None

        #: Set for runs above the amplitude cap.
        self.warning = None

        self.steps = 0
        self.dt = None

    @property
    def final(self):
        return self.states[-1]

    def record(self, state):
        self.states.append(state)
        self.rows.append(diagnostics(state))

    def column(self, name):
        return np.array([row[name] for row in self.rows])


def diagnostics(state):
    """The recorded quantities of one state.

    ``norm_w`` is the distance of g - g0 from the linear flow
    :attr:`FlowState.amplitude` h; it is informational and no check is
    derived from it.

    :rtype: dict
    """

    phi = state.perturbation()
    w = functional.RadialSymTensor.from_frame(
        state.grid, state.v - 1.0 - state.amplitude * state.mode.u)
    size = np.max(np.abs(phi.u), axis=-1)
    tail = max(1, int(math.ceil(constants.FARFIELD_FRACTION * size.size)))
    peak = float(np.max(size))
    return {
        "t": state.t,
        "delta": state.delta,
        "norm_g_minus_g0": functional.l2_norm(phi),
        "norm_w": functional.l2_norm(w),
        "cone_opening": cone_distance(phi, state.mode).opening,
        "farfield_max": float(np.max(size[-tail:])) / peak if peak else 0.0,
    }


def run(epsilon, t_end, grid, eigen, background="g0_plus_eps_h", dt=None,
        record_every=constants.DEFAULTS["record_every"],
        eps_cap=constants.EPS_CAP):
    """Integrates from t0 = log(eps) / (-lambda) to ``t_end``.

    The unperturbed run, eps = 0, is the fixed point g0; it starts at 0
    when ``t_end`` is positive and one e-folding time before ``t_end``
    otherwise.

    Blow-up ends the run early with ``reason == "blowup"``; it is not
    raised.

    :param eigen: The :class:`schwarzflow.spectral.EigenResult`, ideally
                  computed on ``grid`` itself.
    :rtype: :class:`Trajectory`
    :raises schwarzflow.exceptions.ParameterError: If t_end < t0.

    """

    start = None
    if epsilon == 0:
        start = 0.0 if t_end > 0 else t_end - 1.0 / (-eigen.lam)
    if eigen.grid is not grid:
        logger.info("mode interpolated from %r; its growth rate is only "
                    "close to %.6g", eigen.grid, -eigen.lam)
    state = initial_state(epsilon, grid, eigen, background, t0=start)
    if t_end < state.t:
        raise exceptions.ParameterError(
            msg="t_end={} precedes t0={:.6g}".format(t_end, state.t))
    dt = dt or default_dt(grid)
    traj = Trajectory(epsilon, state.t, eigen.lam, background, grid)
    traj.dt = dt
    if epsilon > eps_cap:
        traj.warning = "nonlinear regime: epsilon {} above cap {}".format(
            epsilon, eps_cap)
        logger.warning(traj.warning)

    traj.record(state)
    count = int(math.ceil((t_end - state.t) / dt - 1e-9))
    logger.debug("flow eps=%g from t0=%.6g to %.6g in %d steps", epsilon,
                 state.t, t_end, count)
    try:
        for k in range(count):
            h = dt if k < count - 1 else t_end - state.t
            state = step(state, h)
            traj.steps += 1
            if traj.steps % record_every == 0 or k == count - 1:
                traj.record(state)
        traj.reason = "t_end"
    except exceptions.FlowBlowupError as err:
        logger.warning("blow-up: %s", err)
        if err.last_state is not traj.states[-1]:
            traj.record(err.last_state)
        traj.reason = "blowup"
    logger.info("flow eps=%g ended (%s) at t=%.6g", epsilon, traj.reason,
                traj.final.t)
    return traj


def growth_fit(traj, efolds=1.0):
    """Slope of log ||g - g0||_2 against t over the first e-foldings.

    :returns: Dict with ``slope``, ``stderr``, ``ci`` and ``points``.
    :raises schwarzflow.exceptions.DataError: With fewer than 3 points.

    """

    t = traj.column("t")
    norm = traj.column("norm_g_minus_g0")
    window = (t <= traj.t0 + efolds / (-traj.lam)) & (norm > 0)
    if np.count_nonzero(window) < 3:
        raise exceptions.DataError(msg="too few points for a growth fit")
    fit = linregress(t[window], np.log(norm[window]))
    half = 1.96 * fit.stderr
    return {"slope": float(fit.slope), "stderr": float(fit.stderr),
            "ci": [float(fit.slope - half), float(fit.slope + half)],
            "points": int(np.count_nonzero(window))}


def growth_matches(fit, lam, tol=0.05):
    """True if the fitted slope is -lambda within ``tol`` or its CI.

    """

    target = -lam
    lo, hi = fit["ci"]
    return abs(fit["slope"] - target) <= tol * abs(target) or lo <= target <= hi


def ancient_limit(epsilons, t_common, grid, eigen, background="g0",
                  dt=None, record_every=constants.DEFAULTS["record_every"],
                  workers=1):
    """Runs each eps_n from its own t_n to ``t_common`` and compares them.

    :param workers: (optional) Number of threads for independent runs.
    :returns: Dict with ``rows``, ``distances``, ``cauchy``, ``cone_bound``
              and the trajectories.
    :raises schwarzflow.exceptions.ParameterError: If the amplitudes are
                                                    not strictly decreasing
                                                    or t_common precedes
                                                    the first t0.

    """

    eps = [float(e) for e in epsilons]
    if len(eps) < 2 or any(b >= a for a, b in zip(eps, eps[1:])) \
            or eps[-1] <= 0:
        raise exceptions.ParameterError(
            msg="epsilons must be positive and strictly decreasing")
    t_first = math.log(eps[0]) / (-eigen.lam)
    if t_common < t_first - 1e-12:
        raise exceptions.ParameterError(
            msg="t_common={} precedes t0={:.6g}".format(t_common, t_first))
    t_common = max(t_common, t_first)

    def member(e):
        return run(e, t_common, grid, eigen, background=background, dt=dt,
                   record_every=record_every, eps_cap=math.inf)

    if workers > 1:
        with concurrent.futures.ThreadPoolExecutor(workers) as pool:
            trajectories = list(pool.map(member, eps))
    else:
        trajectories = [member(e) for e in eps]

    rows = []
    distances = []
    for k, traj in enumerate(trajectories):
        row = {"epsilon": traj.epsilon, "t0": traj.t0,
               "t_final": traj.final.t, "reason": traj.reason,
               "max_opening": float(np.max(traj.column("cone_opening"))),
               "distance_to_next": None, "flagged": traj.reason != "t_end"}
        if k + 1 < len(trajectories):
            diff = functional.RadialSymTensor.from_frame(
                grid, traj.final.v - trajectories[k + 1].final.v)
            row["distance_to_next"] = functional.sobolev_norm(diff)
            distances.append(row["distance_to_next"])
        rows.append(row)

    cauchy = all(b <= a * (1.0 + constants.CAUCHY_TOL)
                 for a, b in zip(distances, distances[1:]))
    if not cauchy:
        logger.warning("distances are not decreasing: %r", distances)
    return {"rows": rows, "distances": distances, "cauchy": cauchy,
            "cone_bound": max(row["max_opening"] for row in rows),
            "t_common": t_common, "trajectories": trajectories}
