#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""Radial diagonal 2-tensors on g0 and the quadratic form of the second
variation.

A tensor h = h00 dt^2 + h11 dx^2 + h22 dOmega^2 is stored by its frame
components u_i = h_ii / g0_ii, so that |h|^2 = u0^2 + u1^2 + 2 u2^2 and all
integrals reduce to weighted sums in the radial chart. The constant factor
of the angular and time directions, 16 pi^2, is kept in every integral.
"""

import logging
import math

import numpy as np
from scipy.integrate import quad
from scipy.interpolate import CubicSpline

# Original modules
import schwarzflow.constants as constants
import schwarzflow.datatypes as datatypes
import schwarzflow.exceptions as exceptions
import schwarzflow.geometry as geometry

logger = logging.getLogger(__name__)

#: Multiplicities of the frame components (the sphere pair counts twice).
MASS = np.array([1.0, 1.0, 2.0])

SQRT2 = math.sqrt(2.0)


def _radius_gaps(x_a, x_b, r_a, r_b, inner):
    """r_b - r_a, without cancellation where the chart equals p.

    """

    gap = r_b - r_a
    q_a = (1.0 - x_a) * (1.0 + x_a)
    q_b = (1.0 - x_b) * (1.0 + x_b)
    stable = (x_b - x_a) * (x_b + x_a) / (q_a * q_b)
    return np.where(inner, stable, gap)


class Grid(object):

    """A uniform cell-centred grid in the p or s chart.

    Node i sits at (i + 1/2) dx, faces at multiples of dx. The face at the
    bolt (x = 0) has zero flux weight and carries an even reflection, so
    fields there are only required to be regular. At the outer face the
    frame components are pinned to zero. In the p chart the outer face
    stops one cell short of p = 1, where r is infinite.

    :param chart: :attr:`geometry.Chart.P` or :attr:`geometry.Chart.S`.
    :param int n: Number of cells.
    :param float s_max: (optional) Outer face of an s grid.
    :raises schwarzflow.exceptions.ParameterError: For n < 2 or an r grid.

    """

    def __init__(self, chart=geometry.Chart.P, n=constants.DEFAULTS[
            "eigen_n"], s_max=constants.DEFAULTS["s_max"], schart=None):
        chart = geometry.Chart(chart)
        if chart is geometry.Chart.R:
            raise exceptions.ParameterError(
                msg="grids live in the p or s chart")
        if int(n) != n or n < 2:
            raise exceptions.ParameterError(
                msg="a grid needs at least 2 cells, got {}".format(n))
        n = int(n)

        #: The radial chart.
        self.chart = chart

        #: Number of cells.
        self.n = n

        #: The background metric g0 in :attr:`chart`.
        self.metric = geometry.schwarzschild(chart, schart)

        if chart is geometry.Chart.P:
            self.dx = 1.0 / (n + 1)
            inner_limit = 1.0
        else:
            if s_max <= self.metric.schart.r_outer:
                raise exceptions.ParameterError(
                    msg="s_max must exceed {}".format(
                        self.metric.schart.r_outer))
            self.dx = float(s_max) / n
            inner_limit = self.metric.schart.s_inner

        #: Cell centres.
        self.nodes = (np.arange(n) + 0.5) * self.dx

        #: Cell faces, from the bolt outwards.
        self.faces = np.arange(n + 1) * self.dx

        #: Areal radius at the nodes.
        self.r = np.atleast_1d(self.metric.r_of(self.nodes))

        r_faces = np.empty(n + 1)
        r_faces[0] = 1.0
        r_faces[1:] = self.metric.r_of(self.faces[1:])
        #: Areal radius at the faces.
        self.r_faces = r_faces

        gaps = _radius_gaps(self.faces[:-1], self.faces[1:], r_faces[:-1],
                            r_faces[1:], self.faces[1:] <= inner_limit)
        #: Exact g0 volumes of the cells.
        self.weights = constants.VOLUME_FACTOR * gaps * (
            r_faces[:-1] ** 2 + r_faces[:-1] * r_faces[1:]
            + r_faces[1:] ** 2) / 3.0

        g, dg, d2g = self.metric.jet(self.nodes)
        #: Background components (A, B, C) and their chart derivatives.
        self.g, self.dg, self.d2g = g, dg, d2g

        gf = self.metric.jet(self.faces[1:])[0]
        kappa = np.zeros(n + 1)
        kappa[1:] = constants.VOLUME_FACTOR * np.sqrt(
            gf[:, 0] / gf[:, 1]) * gf[:, 2]
        #: Flux weights 16 pi^2 sqrt(A/B) C at the faces; zero at the bolt.
        self.kappa = kappa

        d1, _ = geometry.log_derivatives(g, dg, d2g)
        #: Log-derivatives (alpha', beta', gamma') at the nodes.
        self.logd = d1

        #: Coupling of u1 - u0 in |grad h|^2.
        self.P = d1[:, 0] ** 2 / (2.0 * g[:, 1])

        #: Coupling of u1 - u2 in |grad h|^2.
        self.Q = d1[:, 2] ** 2 / g[:, 1]

        #: Sectional curvatures (K01, K02, K12, K23) at the nodes.
        self.sectional = geometry.sectional_curvatures(g, dg, d2g)

        #: Matrix of 2R(h, h) in frame components at each node.
        self.kmat = geometry.curvature_matrix(self.sectional)

        logger.debug("grid %s n=%d dx=%.3g r in [%.4g, %.4g]", chart.value,
                     n, self.dx, self.r[0], self.r[-1])

    @property
    def p(self):
        """The p value of every node.

        """

        if self.chart is geometry.Chart.P:
            return self.nodes
        return np.atleast_1d(geometry.to_p(self.r))

    @property
    def volume(self):
        return float(np.sum(self.weights))

    def __len__(self):
        return self.n

    def __repr__(self):
        return "Grid({}, n={})".format(self.chart.value, self.n)


class RadialSymTensor(object):

    """A radial diagonal 2-tensor sampled at the nodes of a grid.

    :param grid: The :class:`Grid`.
    :param u0: Frame component h00 / g0_00.
    :param u1: Frame component h11 / g0_11.
    :param u2: Frame component h22 / g0_22 (also h33 / g0_33).
    :raises schwarzflow.exceptions.DataError: For wrong lengths or
                                               non-finite samples.

    """

    def __init__(self, grid, u0, u1, u2):
        parts = [np.full(grid.n, float(c)) if np.ndim(c) == 0
                 else np.asarray(c, dtype=float) for c in (u0, u1, u2)]
        for part in parts:
            if part.shape != (grid.n,):
                raise exceptions.DataError(
                    msg="expected {} samples per component, got {}".format(
                        grid.n, part.shape))
        u = np.stack(parts, axis=-1)
        if not np.all(np.isfinite(u)):
            raise exceptions.DataError(msg="non-finite tensor samples")

        #: The grid.
        self.grid = grid

        #: Frame components, shape (n, 3).
        self.u = u

    @classmethod
    def from_frame(cls, grid, u):
        u = np.asarray(u, dtype=float)
        return cls(grid, u[:, 0], u[:, 1], u[:, 2])

    @classmethod
    def from_vector(cls, grid, x):
        """Builds a tensor from an interleaved (u0, u1, u2) vector.

        """

        return cls.from_frame(grid, np.reshape(x, (grid.n, 3)))

    @property
    def u0(self):
        return self.u[:, 0]

    @property
    def u1(self):
        return self.u[:, 1]

    @property
    def u2(self):
        return self.u[:, 2]

    def vector(self):
        """The interleaved (u0, u1, u2) vector.

        """

        return self.u.reshape(-1).copy()

    def norm_sq_pointwise(self):
        return np.sum(MASS * self.u ** 2, axis=-1)

    def __add__(self, other):
        return RadialSymTensor.from_frame(self.grid, self.u + other.u)

    def __sub__(self, other):
        return RadialSymTensor.from_frame(self.grid, self.u - other.u)

    def __mul__(self, c):
        return RadialSymTensor.from_frame(self.grid, float(c) * self.u)

    __rmul__ = __mul__


def pointwise_norm(h):
    """|h| at every node.

    """

    return np.sqrt(h.norm_sq_pointwise())


def _gradient_form(grid, U, V):
    """Symmetric form of integral |grad h|^2 on frame arrays.

    """

    dU = U[1:] - U[:-1]
    dV = V[1:] - V[:-1]
    total = np.sum(grid.kappa[1:-1] * np.sum(MASS * dU * dV, axis=-1)
                   ) / grid.dx
    # pinned outer face, half a cell away
    total += grid.kappa[-1] * np.sum(MASS * U[-1] * V[-1]) / (0.5 * grid.dx)
    total += np.sum(grid.weights * (
        grid.P * (U[:, 1] - U[:, 0]) * (V[:, 1] - V[:, 0])
        + grid.Q * (U[:, 1] - U[:, 2]) * (V[:, 1] - V[:, 2])))
    return float(total)


def _curvature_form(grid, U, V):
    return float(np.sum(grid.weights * np.einsum(
        "ni,nij,nj->n", U, grid.kmat, V)))


def _l2_form(grid, U, V):
    return float(np.sum(grid.weights * np.sum(MASS * U * V, axis=-1)))


def _check(*tensors):
    grid = tensors[0].grid
    for t in tensors:
        if t.grid is not grid:
            raise exceptions.DataError(msg="tensors live on different grids")
        if not np.all(np.isfinite(t.u)):
            raise exceptions.DataError(msg="non-finite tensor samples")
    return grid


def energy(h):
    """The discrete quadratic form a(h) = int |grad h|^2 - 2 R(h, h).

    """

    grid = _check(h)
    return _gradient_form(grid, h.u, h.u) - _curvature_form(grid, h.u, h.u)


def bilinear(h, k):
    """The symmetric form a(h, k) behind :func:`energy`.

    """

    grid = _check(h, k)
    return _gradient_form(grid, h.u, k.u) - _curvature_form(grid, h.u, k.u)


def l2_inner(h, k):
    grid = _check(h, k)
    return _l2_form(grid, h.u, k.u)


def l2_norm(h):
    """The L^2 norm with respect to g0.

    """

    return math.sqrt(l2_inner(h, h))


def sobolev_inner(h, k):
    """The W^{1,2} inner product: L^2 part plus gradient part.

    """

    grid = _check(h, k)
    return _gradient_form(grid, h.u, k.u) + _l2_form(grid, h.u, k.u)


def sobolev_norm(h):
    return math.sqrt(max(sobolev_inner(h, h), 0.0))


def hardy_gap(h):
    """Both sides of the Hardy inequality int |grad h|^2 >= int |h|^2/r^2.

    :returns: ``(lhs, rhs)``

    """

    grid = _check(h)
    lhs = _gradient_form(grid, h.u, h.u)
    rhs = float(np.sum(grid.weights * h.norm_sq_pointwise() / grid.r ** 2))
    return lhs, rhs


def curvature_term_bound(h):
    """The curvature term |2 int R(h, h)| and the bound 4 int |h|^2 / r^3.

    :returns: ``(term, bound)``

    """

    grid = _check(h)
    term = abs(_curvature_form(grid, h.u, h.u))
    bound = 4.0 * float(np.sum(grid.weights * h.norm_sq_pointwise()
                               / grid.r ** 3))
    return term, bound


def _splines(h):
    return [CubicSpline(h.grid.nodes, h.u[:, c]) for c in range(3)]


def covariant_derivative(h, x):
    """Nonzero components of grad h at chart value ``x``.

    Components are coordinate components in the r chart, at the equator.

    :returns: Dict mapping (k, i, j) to (grad_k h)_ij.
    :raises schwarzflow.exceptions.ExtrapolationError: If ``x`` is outside
                                                        the node hull.

    """

    grid = h.grid
    if not grid.nodes[0] <= x <= grid.nodes[-1]:
        raise exceptions.ExtrapolationError(
            msg="{} is outside [{}, {}]".format(x, grid.nodes[0],
                                                 grid.nodes[-1]))
    r, dr = (float(v[0]) for v in _chart_rate(grid, x))
    values = [float(s(x)) for s in _splines(h)]
    slopes = [float(s(x, 1)) / dr for s in _splines(h)]

    A, dA = 1.0 - 1.0 / r, 1.0 / r ** 2
    g = (A, 1.0 / A, r ** 2, r ** 2)
    u = values + [values[2]]
    du = slopes + [slopes[2]]

    out = {}
    for i in range(4):
        out[(1, i, i)] = g[i] * du[i]
    out[(0, 0, 1)] = out[(0, 1, 0)] = 0.5 * dA * (u[1] - u[0])
    for k in (2, 3):
        out[(k, 1, k)] = out[(k, k, 1)] = r * (u[1] - u[k])
    return out


def _chart_rate(grid, x):
    """r and dr/dx at chart values ``x``.

    """

    x = np.atleast_1d(np.asarray(x, dtype=float))
    if grid.chart is geometry.Chart.P:
        r, dr, _, _ = geometry.p_derivatives(x)
        return r, dr
    r, dr, _, _ = grid.metric.schart.derivatives(x)
    return r, dr


def trace_and_divergence(h):
    """Trace H = tr_g0 h and the radial component of the divergence
    (zeta h)_1 = -(div h)_1, at the nodes.

    """

    grid = _check(h)
    alpha, _, gamma = grid.logd.T
    du1 = CubicSpline(grid.nodes, h.u1)(grid.nodes, 1)
    trace = h.u0 + h.u1 + 2.0 * h.u2
    zeta = -(du1 + 0.5 * alpha * (h.u1 - h.u0) + gamma * (h.u1 - h.u2))
    return trace, zeta


def gauge_residual(h):
    """Frame components of Hess(H) + 2 grad(zeta h) at the nodes.

    Vanishes when h solves the linearized Einstein equation in de Turck
    gauge with zero trace and divergence.

    """

    grid = _check(h)
    trace, zeta = trace_and_divergence(h)
    y = CubicSpline(grid.nodes, trace)(grid.nodes, 1) + 2.0 * zeta
    dy = CubicSpline(grid.nodes, y)(grid.nodes, 1)
    A, B, C = grid.g.T
    dA, dB, dC = grid.dg.T
    # -Gamma^1_ii y for i = 0, 2 and the radial slot
    x00 = 0.5 * dA / B * y / A
    x11 = (dy - 0.5 * dB / B * y) / B
    x22 = 0.5 * dC / B * y / C
    return np.stack([x00, x11, x22], axis=-1)


def volume_integral(func, a, b):
    """int_a^b func(p) dvol in the p chart, without the 16 pi^2 factor.

    The g0 density is 2p / (1 - p^2)^4.

    """

    if not 0.0 <= a <= b < 1.0:
        raise exceptions.DomainError(msg="need 0 <= a <= b < 1")

    def integrand(p):
        q = (1.0 - p) * (1.0 + p)
        return func(p) * 2.0 * p / q ** 4

    return quad(integrand, a, b, epsabs=constants.QUAD_EPSABS,
                epsrel=1e-12, limit=constants.QUAD_LIMIT)[0]


class CutOff(object):

    """The cut-off profile eta of the test tensor eta * (1, 1, -1).

    eta ramps linearly from 0 at r = 1 to 1 at r = 1 + 1/n, stays 1 up to
    sqrt(2) and decays as exp(-rate (r - sqrt(2))) beyond. When
    1 + 1/n >= sqrt(2) the plateau is empty and the ramp stops at
    sqrt(2).

    :raises schwarzflow.exceptions.ParameterError: For n < 1 or rate <= 0.

    """

    def __init__(self, n, rate=constants.TAIL_RATE):
        if int(n) != n or n < 1:
            raise exceptions.ParameterError(
                msg="n must be a positive integer, got {}".format(n))
        if rate <= 0:
            raise exceptions.ParameterError(msg="tail rate must be positive")
        self.n = int(n)
        self.rate = float(rate)
        self.ramp_end = min(1.0 + 1.0 / self.n, SQRT2)

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        return np.where(
            r < self.ramp_end, self.n * (r - 1.0),
            np.where(r < SQRT2, 1.0, np.exp(-self.rate * (r - SQRT2))))


def _quad(func, a, b):
    if b <= a:
        return 0.0
    return quad(func, a, b, epsabs=constants.QUAD_EPSABS, epsrel=1e-12,
                limit=constants.QUAD_LIMIT)[0]


def _tail(func):
    """int_sqrt2^inf func(r) dr, mapped by r = sqrt2 + u / (1 - u).

    """

    def mapped(u):
        if u >= 1.0:
            return 0.0
        return func(SQRT2 + u / (1.0 - u)) / (1.0 - u) ** 2

    return _quad(mapped, 0.0, 1.0)


def lemma36_certificate(n=constants.LEMMA_N, rate=constants.TAIL_RATE):
    """Evaluates the eight integrals bounding a of the cut-off test tensor.

    With eta from :class:`CutOff` and pieces I1 (ramp), I2 (plateau), I3
    (tail)::

        J1, J2, J3 = int 16 eta^2              over I1, I2, I3
        J4, J5     = int 4 eta'^2 (1 - 1/r)    over I1, I3
        J6, J7, J8 = -int 32 eta^2 / r         over I1, I2, I3

    and a_hat = 16 pi^2 sum(J). The ``*_volume`` fields replace the
    derivative terms by int 4 eta'^2 (r^2 - r), which is what the g0
    volume form gives.

    :rtype: :class:`schwarzflow.datatypes.Lemma36Certificate`
    :raises schwarzflow.exceptions.ParameterError: For n < 1.

    """

    eta = CutOff(n, rate)
    n = eta.n
    a, b = 1.0, eta.ramp_end

    def ramp(r):
        return n * (r - 1.0)

    def tail(r):
        return math.exp(-rate * (r - SQRT2))

    J = {
        "J1": _quad(lambda r: 16.0 * ramp(r) ** 2, a, b),
        "J2": _quad(lambda r: 16.0, b, SQRT2),
        "J3": _tail(lambda r: 16.0 * tail(r) ** 2),
        "J4": _quad(lambda r: 4.0 * n ** 2 * (1.0 - 1.0 / r), a, b),
        "J5": _tail(lambda r: 4.0 * rate ** 2 * tail(r) ** 2
                    * (1.0 - 1.0 / r)),
        "J6": -_quad(lambda r: 32.0 * ramp(r) ** 2 / r, a, b),
        "J7": -_quad(lambda r: 32.0 / r, b, SQRT2),
        "J8": -_tail(lambda r: 32.0 * tail(r) ** 2 / r),
    }
    J4v = _quad(lambda r: 4.0 * n ** 2 * (r * r - r), a, b)
    J5v = _tail(lambda r: 4.0 * rate ** 2 * tail(r) ** 2 * (r * r - r))

    groups = {
        "ne1": J["J1"] + J["J6"],
        "ne2": J["J2"] + J["J4"] + J["J7"],
        "ne3": J["J3"] + J["J5"] + J["J8"],
    }
    inequalities = {
        name: {"value": value, "bound": constants.LEMMA_THRESHOLDS[name],
               "holds": value <= constants.LEMMA_THRESHOLDS[name]}
        for name, value in groups.items()}

    # fixed summation order keeps totals bit-stable
    total = math.fsum(J["J{}".format(k)] for k in range(1, 9))
    total_volume = total - J["J4"] - J["J5"] + J4v + J5v
    cert = datatypes.Lemma36Certificate(
        n=n, tail_rate=rate, J=J, total=total,
        a_hat=constants.VOLUME_FACTOR * total, inequalities=inequalities,
        J4_volume=J4v, J5_volume=J5v, total_volume=total_volume,
        a_hat_volume=constants.VOLUME_FACTOR * total_volume)
    logger.info("cut-off certificate n=%d: total %.6g (volume %.6g)", n,
                total, total_volume)
    return cert


def hat_norm_sq(n=constants.LEMMA_N, rate=constants.TAIL_RATE):
    """||eta (1, 1, -1)||^2 in L^2(g0), by quadrature.

    """

    eta = CutOff(n, rate)
    n = eta.n
    inner = _quad(lambda r: (n * (r - 1.0)) ** 2 * r * r, 1.0, eta.ramp_end)
    plateau = _quad(lambda r: r * r, eta.ramp_end, SQRT2)
    tail = _tail(lambda r: math.exp(-2.0 * rate * (r - SQRT2)) * r * r)
    return constants.VOLUME_FACTOR * 4.0 * (inner + plateau + tail)


def hat_tensor(grid, n=constants.LEMMA_N, rate=constants.TAIL_RATE):
    """The cut-off test tensor eta * (1, 1, -1) sampled on ``grid``.

    """

    eta = CutOff(n, rate)(grid.r)
    return RadialSymTensor(grid, eta, eta, -eta)
