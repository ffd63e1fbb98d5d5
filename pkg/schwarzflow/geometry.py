#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""Charts, metric ansatz and curvature of diagonal radial metrics.

The manifold is S^1 x R x S^2 with coordinates (t, x, theta, phi), where
x is one of three radial charts:

* ``r``, the areal radius, r > 1;
* ``p = sqrt(1 - 1/r)``, regular at the bolt r = 1;
* ``s``, equal to p for r <= 2 and to r for r >= 3, blended in between.

Every metric handled here is diagonal and depends on x only::

    g = A(x) dt^2 + B(x) dx^2 + C(x) (dtheta^2 + sin^2 theta dphi^2)

Components carrying the sphere are reported at the equator theta = pi/2
with the factor sin^2 theta stripped, so g33 = g22 = C there. Index order
is (t, x, theta, phi) = (0, 1, 2, 3) throughout.

Curvature uses the convention in which the round sphere has positive
sectional curvature, so R_0101(g0) = +1/r^3 in the r chart.
"""

import enum
import functools
import itertools
import logging
import math

import numpy as np
from scipy.interpolate import CubicHermiteSpline
from scipy.optimize import brentq

# Original modules
import schwarzflow.constants as constants
import schwarzflow.datatypes as datatypes
import schwarzflow.exceptions as exceptions

logger = logging.getLogger(__name__)

#: Unordered index pairs of the sectional curvatures.
PAIRS = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))

#: Position of each pair in the reduced (K01, K02, K12, K23) vector.
_REDUCED = {(0, 1): 0, (0, 2): 1, (0, 3): 1, (1, 2): 2, (1, 3): 2, (2, 3): 3}


class Chart(enum.Enum):

    """The radial charts.

    """

    R = "r"
    P = "p"
    S = "s"


def _unwrap(a):
    a = np.asarray(a)
    if a.ndim == 0:
        return float(a)
    return a


def to_p(r):
    """Converts the areal radius to the bolt chart, p^2 = 1 - 1/r.

    :param r: Scalar or array with every entry in (1, inf).
    :raises schwarzflow.exceptions.DomainError: If some r <= 1.

    """

    r = np.asarray(r, dtype=float)
    if not np.all(np.isfinite(r)) or np.any(r <= 1.0):
        raise exceptions.DomainError(
            msg="r must lie in (1, inf), got min {}".format(np.min(r)))
    return _unwrap(np.sqrt((r - 1.0) / r))


def to_r(p):
    """Inverse of :func:`to_p`.

    :raises schwarzflow.exceptions.DomainError: If some p is outside
                                                 (0, 1).

    """

    p = np.asarray(p, dtype=float)
    if not np.all(np.isfinite(p)) or np.any(p <= 0.0) or np.any(p >= 1.0):
        raise exceptions.DomainError(msg="p must lie in (0, 1)")
    return _unwrap(1.0 / ((1.0 - p) * (1.0 + p)))


def p_derivatives(p):
    """Returns r and its first three derivatives with respect to p.

    """

    p = np.asarray(p, dtype=float)
    q = (1.0 - p) * (1.0 + p)
    return (1.0 / q, 2.0 * p / q ** 2, (2.0 + 6.0 * p ** 2) / q ** 3,
            24.0 * p * (1.0 + p ** 2) / q ** 4)


class SChart(object):

    """The blended chart s.

    On r <= r_inner the chart equals p, on r >= r_outer it equals r, and
    in between it is the cubic Hermite interpolant matching the values and
    slopes of both branches.

    :param float r_inner: (optional) Inner junction, in r.
    :param float r_outer: (optional) Outer junction, in r.
    :raises schwarzflow.exceptions.ChartConstructionError: If the blend is
                                                          not monotone.

    """

    def __init__(self, r_inner=constants.S_BLEND[0],
                 r_outer=constants.S_BLEND[1]):
        if not 1.0 < r_inner < r_outer:
            raise exceptions.ChartConstructionError(
                msg="junctions must satisfy 1 < r_inner < r_outer")

        #: Inner junction in r.
        self.r_inner = float(r_inner)

        #: Outer junction in r.
        self.r_outer = float(r_outer)

        #: Chart value at the inner junction.
        self.s_inner = to_p(r_inner)

        slope_inner = 1.0 / (2.0 * self.s_inner * r_inner ** 2)
        secant = (r_outer - self.s_inner) / (r_outer - r_inner)
        if secant <= 0.0:
            raise exceptions.ChartConstructionError(
                msg="the chart would decrease across the blend")
        alpha = slope_inner / secant
        beta = 1.0 / secant
        if alpha < 0 or beta < 0 or alpha ** 2 + beta ** 2 > 9.0:
            raise exceptions.ChartConstructionError(
                msg="Fritsch-Carlson test failed (alpha={:.4g}, "
                    "beta={:.4g})".format(alpha, beta))

        self._blend = CubicHermiteSpline(
            [r_inner, r_outer], [self.s_inner, r_outer], [slope_inner, 1.0])
        self._d1 = self._blend.derivative(1)
        self._d2 = self._blend.derivative(2)
        self._d3 = self._blend.derivative(3)

    def s_of_r(self, r):
        """Maps r to s.

        """

        r = np.asarray(r, dtype=float)
        p = np.asarray(to_p(r))
        mid = self._blend(np.clip(r, self.r_inner, self.r_outer))
        s = np.where(r <= self.r_inner, p,
                     np.where(r >= self.r_outer, r, mid))
        return _unwrap(s)

    def r_of_s(self, s):
        """Maps s back to r; the blend is inverted with Brent's method.

        """

        s = np.atleast_1d(np.asarray(s, dtype=float))
        if not np.all(np.isfinite(s)) or np.any(s <= 0.0):
            raise exceptions.DomainError(msg="s must lie in (0, inf)")
        r = np.empty_like(s)
        inner = s <= self.s_inner
        outer = s >= self.r_outer
        r[inner] = 1.0 / ((1.0 - s[inner]) * (1.0 + s[inner]))
        r[outer] = s[outer]
        for idx in np.flatnonzero(~(inner | outer)):
            target = s[idx]
            r[idx] = brentq(lambda x: float(self._blend(x)) - target,
                            self.r_inner, self.r_outer, xtol=1e-14)
        return r if r.size > 1 else float(r[0])

    def derivatives(self, s):
        """Returns r(s) with its first three s-derivatives.

        """

        s = np.atleast_1d(np.asarray(s, dtype=float))
        r = np.atleast_1d(self.r_of_s(s))
        r1 = np.ones_like(s)
        r2 = np.zeros_like(s)
        r3 = np.zeros_like(s)

        inner = s <= self.s_inner
        _, r1[inner], r2[inner], r3[inner] = p_derivatives(s[inner])

        mid = ~inner & (s < self.r_outer)
        if np.any(mid):
            h1 = self._d1(r[mid])
            h2 = self._d2(r[mid])
            h3 = self._d3(r[mid])
            r1[mid] = 1.0 / h1
            r2[mid] = -h2 * r1[mid] ** 3
            r3[mid] = -h3 * r1[mid] ** 4 + 3.0 * h2 ** 2 * r1[mid] ** 5
        return r, r1, r2, r3


@functools.lru_cache(maxsize=1)
def default_schart():
    """The s chart with the standard junctions at r = 2 and r = 3.

    """

    return SChart()


def to_s(r):
    """Maps r to the default s chart.

    """

    return default_schart().s_of_r(r)


def s_inverse(s):
    """Maps s back to r in the default s chart.

    """

    return default_schart().r_of_s(s)


class ChartPoint(object):

    """A radial position given in one chart, convertible to the others.

    :param chart: A :class:`Chart` or its string value.
    :param float value: The coordinate value.
    :raises schwarzflow.exceptions.DomainError: If ``value`` is outside the
                                                 chart's range.

    """

    def __init__(self, chart, value):
        #: The chart of :attr:`value`.
        self.chart = Chart(chart)

        #: The coordinate value.
        self.value = float(value)

        # conversion validates the range
        self._r = r_of_x(self.chart, self.value)

    @property
    def r(self):
        return self._r

    @property
    def p(self):
        return to_p(self._r)

    @property
    def s(self):
        if self.chart is Chart.S:
            return self.value
        return to_s(self._r)

    def to(self, chart):
        """Returns the same point expressed in ``chart``.

        """

        chart = Chart(chart)
        return ChartPoint(chart, getattr(self, chart.value))

    def __repr__(self):
        return "ChartPoint({}={!r})".format(self.chart.value, self.value)


def r_of_x(chart, x, schart=None):
    """Areal radius of chart value ``x``.

    """

    chart = Chart(chart)
    if chart is Chart.R:
        x = np.asarray(x, dtype=float)
        if not np.all(np.isfinite(x)) or np.any(x <= 1.0):
            raise exceptions.DomainError(msg="r must lie in (1, inf)")
        return _unwrap(x)
    elif chart is Chart.P:
        return to_r(x)
    return (schart or default_schart()).r_of_s(x)


def x_of_r(chart, r, schart=None):
    """Chart value of areal radius ``r``.

    """

    chart = Chart(chart)
    if chart is Chart.R:
        return _unwrap(np.asarray(r, dtype=float))
    elif chart is Chart.P:
        return to_p(r)
    return (schart or default_schart()).s_of_r(r)


def _richardson(func, x, h):
    """Central difference of ``func`` at ``x`` with one Richardson step.

    ``func`` maps an array of shape (...) to shape (..., m).

    """

    hh = np.expand_dims(h, -1)
    wide = (func(x + h) - func(x - h)) / (2.0 * hh)
    narrow = (func(x + 0.5 * h) - func(x - 0.5 * h)) / hh
    return (4.0 * narrow - wide) / 3.0


class DiagonalRadialMetric(object):

    """A diagonal metric whose components depend on the radial chart only.

    :param chart: The radial chart of the components.
    :param g00: Callable giving A(x).
    :param g11: Callable giving B(x).
    :param g22: Callable giving C(x); g33 = C sin^2 theta is implied.
    :param jet: (optional) Callable returning exact ``(g, dg, d2g)``
                arrays of shape (..., 3). Without it the derivatives are
                taken by Richardson-extrapolated central differences.
    :param tuple domain: (optional) Open interval of admissible x.
    :param str name: (optional) Label used in reports.

    """

    def __init__(self, chart, g00, g11, g22, jet=None,
                 domain=(-math.inf, math.inf), name="metric", schart=None):
        #: The radial chart.
        self.chart = Chart(chart)

        #: Open interval of admissible chart values.
        self.domain = (float(domain[0]), float(domain[1]))

        #: Label used in reports.
        self.name = name

        #: Period of the Euclidean time circle.
        self.t_period = constants.T_PERIOD

        #: The s chart used when :attr:`chart` is ``S``.
        self.schart = schart or default_schart()

        self._funcs = (g00, g11, g22)
        self._jet = jet

    def check_domain(self, x):
        x = np.asarray(x, dtype=float)
        lo, hi = self.domain
        if not np.all(np.isfinite(x)) or np.any(x <= lo) or np.any(x >= hi):
            raise exceptions.DomainError(
                msg="{} is outside the domain ({}, {}) of {}".format(
                    x if x.ndim == 0 else "a value", lo, hi, self.name))

    def components(self, x):
        """Returns (A, B, C) stacked on the last axis.

        """

        self.check_domain(x)
        x = np.asarray(x, dtype=float)
        if self._jet is not None:
            return self._jet(x)[0]
        return np.stack([np.broadcast_to(f(x), x.shape).astype(float)
                         for f in self._funcs], axis=-1)

    def jet(self, x):
        """Returns ``(g, dg, d2g)``, each of shape (..., 3).

        :raises schwarzflow.exceptions.DomainError: If x is outside the
                                                     domain or a component
                                                     is not positive.

        """

        self.check_domain(x)
        x = np.asarray(x, dtype=float)
        if self._jet is not None:
            g, dg, d2g = self._jet(x)
        else:
            h = constants.FD_STEP * np.maximum(1.0, np.abs(x))
            g = self.components(x)
            dg = _richardson(self.components, x, h)
            d2g = _richardson(
                lambda y: _richardson(self.components, y, h), x, 100.0 * h)
        if np.any(g <= 0.0):
            raise exceptions.DomainError(
                msg="{} is not positive definite here".format(self.name))
        return g, dg, d2g

    def r_of(self, x):
        if self.chart is Chart.R:
            return _unwrap(np.asarray(x, dtype=float))
        return r_of_x(self.chart, x, self.schart)

    def x_of(self, r):
        return x_of_r(self.chart, r, self.schart)

    def step_scale(self, x):
        """Length scale on which the components vary near ``x``.

        """

        lo, hi = self.domain
        scale = min(x - lo, hi - x)
        if not math.isfinite(scale):
            scale = max(1.0, abs(x))
        return scale


def _schwarzschild_r_jet(r):
    A = np.stack([(r - 1.0) / r, 1.0 / r ** 2, -2.0 / r ** 3], axis=0)
    B = np.stack([r / (r - 1.0), -1.0 / (r - 1.0) ** 2,
                  2.0 / (r - 1.0) ** 3], axis=0)
    C = np.stack([r ** 2, 2.0 * r, np.full_like(r, 2.0)], axis=0)
    return tuple(np.stack([A[k], B[k], C[k]], axis=-1) for k in range(3))


def _schwarzschild_p_jet(p):
    q = (1.0 - p) * (1.0 + p)
    A = np.stack([p ** 2, 2.0 * p, np.full_like(p, 2.0)], axis=0)
    B = np.stack([4.0 / q ** 4, 32.0 * p / q ** 5,
                  (32.0 + 288.0 * p ** 2) / q ** 6], axis=0)
    C = np.stack([1.0 / q ** 2, 4.0 * p / q ** 3,
                  (4.0 + 20.0 * p ** 2) / q ** 4], axis=0)
    return tuple(np.stack([A[k], B[k], C[k]], axis=-1) for k in range(3))


def pullback_jet(jet_r, r, r1, r2, r3):
    """Pulls an r-chart jet back along x -> r(x).

    A and C transform as functions, B as the dx^2 coefficient.

    """

    g, dg, d2g = jet_r
    out_g = g.copy()
    out_dg = dg * r1[..., None]
    out_d2g = d2g * r1[..., None] ** 2 + dg * r2[..., None]

    B, dB, d2B = g[..., 1], dg[..., 1], d2g[..., 1]
    out_g[..., 1] = B * r1 ** 2
    out_dg[..., 1] = dB * r1 ** 3 + 2.0 * B * r1 * r2
    out_d2g[..., 1] = (d2B * r1 ** 4 + 5.0 * dB * r1 ** 2 * r2
                       + 2.0 * B * r2 ** 2 + 2.0 * B * r1 * r3)
    return out_g, out_dg, out_d2g


def _schwarzschild_s_jet(schart):
    def jet(s):
        shape = np.shape(s)
        s = np.atleast_1d(np.asarray(s, dtype=float))
        g = np.empty(s.shape + (3,))
        dg = np.empty_like(g)
        d2g = np.empty_like(g)

        inner = s <= schart.s_inner
        if np.any(inner):
            g[inner], dg[inner], d2g[inner] = _schwarzschild_p_jet(s[inner])
        if np.any(~inner):
            r, r1, r2, r3 = schart.derivatives(s[~inner])
            g[~inner], dg[~inner], d2g[~inner] = pullback_jet(
                _schwarzschild_r_jet(r), r, r1, r2, r3)
        return tuple(a.reshape(shape + (3,)) for a in (g, dg, d2g))
    return jet


def schwarzschild(chart=Chart.R, schart=None):
    """The Euclidean Schwarzschild metric g0 with M = 1/2 in ``chart``.

    """

    chart = Chart(chart)
    if chart is Chart.R:
        jet, domain = _schwarzschild_r_jet, (1.0, math.inf)
    elif chart is Chart.P:
        jet, domain = _schwarzschild_p_jet, (0.0, 1.0)
    else:
        schart = schart or default_schart()
        jet, domain = _schwarzschild_s_jet(schart), (0.0, math.inf)

    def component(k):
        return lambda x: jet(np.asarray(x, dtype=float))[0][..., k]

    return DiagonalRadialMetric(chart, component(0), component(1),
                                component(2), jet=jet, domain=domain,
                                name="g0", schart=schart)


def flat_product():
    """The flat metric dt^2 + dr^2 + r^2 dOmega^2.

    """

    def jet(r):
        one = np.ones_like(r)
        g = np.stack([one, one, r ** 2], axis=-1)
        dg = np.stack([0 * r, 0 * r, 2.0 * r], axis=-1)
        d2g = np.stack([0 * r, 0 * r, 2.0 * one], axis=-1)
        return g, dg, d2g

    return DiagonalRadialMetric(Chart.R, lambda r: 1.0, lambda r: 1.0,
                                lambda r: r ** 2, jet=jet,
                                domain=(0.0, math.inf), name="flat")


def round_sphere_product(radius):
    """The product dt^2 + dr^2 + radius^2 dOmega^2.

    """

    if radius <= 0:
        raise exceptions.ParameterError(msg="radius must be positive")
    return DiagonalRadialMetric(Chart.R, lambda r: np.ones_like(r),
                                lambda r: np.ones_like(r),
                                lambda r: np.full_like(r, radius ** 2),
                                domain=(0.0, math.inf),
                                name="sphere({})".format(radius))


def log_derivatives(g, dg, d2g):
    """First and second derivatives of log(g) componentwise.

    """

    d1 = dg / g
    return d1, d2g / g - d1 ** 2


def sectional_curvatures(g, dg, d2g):
    """Closed-form sectional curvatures of coordinate planes.

    :returns: Array (..., 4) holding K01, K02, K12, K23. The remaining
              planes satisfy K03 = K02 and K13 = K12.

    """

    (a1, b1, c1), (a2, _, c2) = [
        np.moveaxis(d, -1, 0) for d in log_derivatives(g, dg, d2g)]
    B = g[..., 1]
    C = g[..., 2]
    k01 = -(0.5 * a2 + 0.25 * a1 ** 2 - 0.25 * a1 * b1) / B
    k02 = -0.25 * a1 * c1 / B
    k12 = -(0.5 * c2 + 0.25 * c1 ** 2 - 0.25 * c1 * b1) / B
    k23 = 1.0 / C - 0.25 * c1 ** 2 / B
    return np.stack([k01, k02, k12, k23], axis=-1)


def expand_pairs(k):
    """Maps reduced curvatures (..., 4) to the six planes in :data:`PAIRS`.

    """

    return np.stack([k[..., _REDUCED[pair]] for pair in PAIRS], axis=-1)


def curvature_matrix(k):
    """Matrix of 2R(h, h) in frame components (u0, u1, u2).

    """

    k01, k02, k12, k23 = np.moveaxis(k, -1, 0)
    zero = np.zeros_like(k01)
    return np.stack([
        np.stack([zero, 2 * k01, 4 * k02], axis=-1),
        np.stack([2 * k01, zero, 4 * k12], axis=-1),
        np.stack([4 * k02, 4 * k12, 4 * k23], axis=-1)], axis=-2)


def christoffel(metric, x):
    """Closed-form nonzero Christoffel symbols at ``x``.

    The symbols Gamma^2_33 and Gamma^3_23 vanish at the equator and are
    not listed.

    :returns: Dict mapping (k, i, j) to Gamma^k_ij, both orders of (i, j).
    :raises schwarzflow.exceptions.DomainError: Outside the domain.

    """

    g, dg, _ = metric.jet(float(x))
    A, B, C = g
    dA, dB, dC = dg
    out = {
        (0, 0, 1): dA / (2 * A),
        (1, 0, 0): -dA / (2 * B),
        (1, 1, 1): dB / (2 * B),
        (1, 2, 2): -dC / (2 * B),
        (1, 3, 3): -dC / (2 * B),
        (2, 1, 2): dC / (2 * C),
        (3, 1, 3): dC / (2 * C),
    }
    for (k, i, j) in list(out):
        out[(k, j, i)] = out[(k, i, j)]
    return out


def riemann(metric, x):
    """Curvature of ``metric`` at ``x`` from the closed forms.

    :rtype: :class:`schwarzflow.datatypes.CurvatureSet`

    """

    g, dg, d2g = metric.jet(float(x))
    k = sectional_curvatures(g, dg, d2g)
    k6 = expand_pairs(k)
    gfull = (g[0], g[1], g[2], g[2])

    riem = {}
    ricci = {(i, i): 0.0 for i in range(4)}
    sectional = {}
    for (i, j), kij in zip(PAIRS, k6):
        value = float(kij) * gfull[i] * gfull[j]
        riem[(i, j)] = riem[(j, i)] = value
        sectional[(i, j)] = sectional[(j, i)] = float(kij)
        ricci[(i, i)] += float(kij) * gfull[i]
        ricci[(j, j)] += float(kij) * gfull[j]

    return datatypes.CurvatureSet(
        christoffel=christoffel(metric, x), riemann_diag=riem, ricci=ricci,
        sectional=sectional, riem_norm_sq=4.0 * float(np.sum(k6 ** 2)))


def sectional_bound_check(metric, r_samples):
    """Checks |K_ij| <= r^-3 for every coordinate plane.

    :returns: A :class:`schwarzflow.datatypes.SectionalReport`; a
              violated bound is reported, not raised.

    """

    r = np.atleast_1d(np.asarray(r_samples, dtype=float))
    x = np.atleast_1d(metric.x_of(r))
    g, dg, d2g = metric.jet(x)
    k6 = expand_pairs(sectional_curvatures(g, dg, d2g))
    ratios = np.abs(k6) * r[:, None] ** 3
    idx = np.unravel_index(int(np.argmax(ratios)), ratios.shape)
    worst = (float(r[idx[0]]), PAIRS[idx[1]])
    max_ratio = float(ratios[idx])
    logger.debug("sectional bound: max ratio %.6g at r=%.4g plane %s",
                 max_ratio, worst[0], worst[1])
    return datatypes.SectionalReport(
        max_ratio=max_ratio, worst=worst, holds=max_ratio <= 1.0 + 1e-12)


def schwarzschild_norm_sq(r):
    """|Rm|^2 of g0, 12 / r^6.

    """

    return 12.0 / np.asarray(r, dtype=float) ** 6


def curvature_norm_check(metric, r_samples):
    """Largest relative deviation of |Rm|^2 from 12 r^-6.

    :returns: ``(max_deviation, holds)``

    """

    r = np.atleast_1d(np.asarray(r_samples, dtype=float))
    g, dg, d2g = metric.jet(np.atleast_1d(metric.x_of(r)))
    norm_sq = 4.0 * np.sum(expand_pairs(
        sectional_curvatures(g, dg, d2g)) ** 2, axis=-1)
    dev = float(np.max(np.abs(norm_sq / schwarzschild_norm_sq(r) - 1.0)))
    return dev, dev <= constants.CHART_TOL


# -- generic tensor engine -------------------------------------------------

def metric_matrix(g):
    """The 4x4 matrices diag(A, B, C, C) of an array of components.

    """

    full = np.concatenate([g, g[..., 2:3]], axis=-1)
    return full[..., :, None] * np.eye(4)


def _levi_civita(ginv, dmet):
    # dmet[..., a, i, j] = d_a g_ij
    low = 0.5 * (np.einsum("...ikj->...kij", dmet)
                 + np.einsum("...jki->...kij", dmet) - dmet)
    return np.einsum("...kl,...lij->...kij", ginv, low)


def _radial(d):
    out = np.zeros(d.shape[:-1] + (4, 4, 4))
    out[..., 1, :, :] = metric_matrix(d)
    return out


def christoffel_tensor(g, dg):
    """Gamma[..., k, i, j] of diagonal radial metrics at the equator.

    """

    ginv = metric_matrix(1.0 / g)
    return _levi_civita(ginv, _radial(dg))


def christoffel_tensor_derivative(g, dg, d2g):
    """dGamma[..., a, k, i, j] = d_a Gamma^k_ij at the equator.

    """

    dmet = _radial(dg)
    ddmet = _radial(d2g)
    low = 0.5 * (np.einsum("...ikj->...kij", dmet)
                 + np.einsum("...jki->...kij", dmet) - dmet)
    dlow = 0.5 * (np.einsum("...ikj->...kij", ddmet)
                  + np.einsum("...jki->...kij", ddmet) - ddmet)
    ginv = metric_matrix(1.0 / g)
    dginv = metric_matrix(-dg / g ** 2)

    out = np.zeros(g.shape[:-1] + (4, 4, 4, 4))
    out[..., 1, :, :, :] = (np.einsum("...kl,...lij->...kij", dginv, low)
                            + np.einsum("...kl,...lij->...kij", ginv, dlow))
    # theta-derivatives of -sin cos and cot at theta = pi/2
    out[..., 2, 2, 3, 3] = 1.0
    out[..., 2, 3, 2, 3] = -1.0
    out[..., 2, 3, 3, 2] = -1.0
    return out


def riemann_from_christoffel(gmat, gamma, dgamma):
    """All-lower Riemann tensor R_abcd from Gamma and its derivatives.

    """

    rup = (np.einsum("...cadb->...abcd", dgamma)
           - np.einsum("...dacb->...abcd", dgamma)
           + np.einsum("...ace,...edb->...abcd", gamma, gamma)
           - np.einsum("...ade,...ecb->...abcd", gamma, gamma))
    return np.einsum("...ae,...ebcd->...abcd", gmat, rup)


def riemann_tensor(g, dg, d2g):
    """R_abcd of diagonal radial metrics through the einsum engine.

    """

    return riemann_from_christoffel(metric_matrix(g),
                                    christoffel_tensor(g, dg),
                                    christoffel_tensor_derivative(g, dg, d2g))


def riemann_from_sectional(g, k):
    """Builds the full R_abcd array from the reduced sectional curvatures.

    """

    gfull = np.concatenate([g, g[..., 2:3]], axis=-1)
    out = np.zeros(g.shape[:-1] + (4, 4, 4, 4))
    k6 = expand_pairs(k)
    for n, (i, j) in enumerate(PAIRS):
        value = k6[..., n] * gfull[..., i] * gfull[..., j]
        out[..., i, j, i, j] = out[..., j, i, j, i] = value
        out[..., i, j, j, i] = out[..., j, i, i, j] = -value
    return out


# -- finite-difference oracle ----------------------------------------------

def _oracle_metric(metric):
    def gmat(coords):
        g = metric.components(coords[1])
        return np.diag([g[0], g[1], g[2], g[2] * math.sin(coords[2]) ** 2])
    return gmat


def _partials(func, coords, steps):
    out = []
    for a in range(4):
        e = np.zeros(4)
        e[a] = steps[a]
        wide = (func(coords + e) - func(coords - e)) / (2.0 * steps[a])
        narrow = (func(coords + 0.5 * e) - func(coords - 0.5 * e)) / steps[a]
        out.append((4.0 * narrow - wide) / 3.0)
    return np.stack(out)


def finite_difference_curvature(metric, r):
    """Christoffel and Riemann tensors of ``metric`` by finite differences.

    The full 4-d metric is evaluated, theta dependence included, at
    (0, x(r), pi/2, 0).

    :returns: ``(gamma, riem)`` with shapes (4, 4, 4) and (4, 4, 4, 4).

    """

    x = float(metric.x_of(r))
    coords = np.array([0.0, x, 0.5 * math.pi, 0.0])
    gmat = _oracle_metric(metric)
    inner = np.array([constants.FD_STEP,
                      constants.FD_STEP * max(1.0, abs(x)),
                      constants.FD_STEP, constants.FD_STEP])
    outer = np.array([constants.FD_OUTER_STEP,
                      constants.FD_OUTER_STEP * metric.step_scale(x),
                      constants.FD_OUTER_STEP, constants.FD_OUTER_STEP])

    def gamma_at(c):
        return _levi_civita(np.linalg.inv(gmat(c)), _partials(gmat, c, inner))

    gamma = gamma_at(coords)
    dgamma = _partials(gamma_at, coords, outer)
    return gamma, riemann_from_christoffel(gmat(coords), gamma, dgamma)


def _christoffel_name(k, i, j):
    return "Gamma^{}_{}{}".format(k, i, j)


def _riemann_name(a, b, c, d):
    return "R_{}{}{}{}".format(a, b, c, d)


def oracle_parity(metric, radii, fault=None):
    """Compares closed forms with the finite-difference oracle.

    Christoffel errors are relative to the largest symbol at the radius,
    Riemann errors to the curvature scale r^-3 g_ii g_jj of the plane.

    :param fault: (optional) Name of a component whose closed form is
                  negated before comparison; a test hook.
    :returns: A :class:`schwarzflow.datatypes.ParityReport`.

    """

    rows = []
    worst = (0.0, None)
    for r in np.atleast_1d(np.asarray(radii, dtype=float)):
        x = float(metric.x_of(r))
        g, dg, d2g = metric.jet(x)
        p = to_p(r)
        s = to_s(r)

        closed_gamma = np.zeros((4, 4, 4))
        for (k, i, j), value in christoffel(metric, x).items():
            closed_gamma[k, i, j] = value
        closed_riem = riemann_from_sectional(g, sectional_curvatures(
            g, dg, d2g))
        oracle_gamma, oracle_riem = finite_difference_curvature(metric, r)

        gamma_scale = float(np.max(np.abs(closed_gamma)))
        for k, i, j in itertools.product(range(4), repeat=3):
            if j < i:
                continue
            closed, oracle = closed_gamma[k, i, j], oracle_gamma[k, i, j]
            name = _christoffel_name(k, i, j)
            if name == fault:
                closed = -closed
            err = abs(closed - oracle)
            if closed == 0.0 and err <= 1e-12 * gamma_scale:
                continue
            rows.append((float(r), p, s, name, closed, oracle, err))
            if err / gamma_scale > worst[0]:
                worst = (err / gamma_scale, name)

        gfull = np.concatenate([g, g[2:3]])
        for a, b, c, d in itertools.product(range(4), repeat=4):
            if a >= b or c >= d or (a, b) > (c, d):
                continue
            scale = (r ** -3) * max(gfull[a] * gfull[b], gfull[c] * gfull[d])
            closed, oracle = closed_riem[a, b, c, d], oracle_riem[a, b, c, d]
            name = _riemann_name(a, b, c, d)
            if name == fault:
                closed = -closed
            err = abs(closed - oracle)
            if closed == 0.0 and err <= 1e-12 * scale:
                continue
            rows.append((float(r), p, s, name, closed, oracle, err))
            if err / scale > worst[0]:
                worst = (err / scale, name)

    logger.info("oracle parity over %d radii: worst %.3g (%s)",
                np.size(radii), worst[0], worst[1])
    return datatypes.ParityReport(rows=rows, max_rel_err=worst[0],
                                  worst=worst[1],
                                  holds=worst[0] <= constants.ORACLE_TOL)


def ricci_flatness(radii):
    """Largest frame Ricci component of g0 over ``radii`` in all charts.

    """

    r = np.atleast_1d(np.asarray(radii, dtype=float))
    worst = 0.0
    for chart in Chart:
        metric = schwarzschild(chart)
        g, dg, d2g = metric.jet(np.atleast_1d(metric.x_of(r)))
        k = sectional_curvatures(g, dg, d2g)
        k01, k02, k12, k23 = np.moveaxis(k, -1, 0)
        ric = np.stack([k01 + 2 * k02, k01 + 2 * k12,
                        k02 + k12 + k23], axis=-1)
        worst = max(worst, float(np.max(np.abs(ric))))
    return worst


def chart_consistency(radii):
    """Largest disagreement of sectional curvatures between charts.

    Measured in units of r^-3.

    """

    r = np.atleast_1d(np.asarray(radii, dtype=float))
    values = []
    for chart in Chart:
        metric = schwarzschild(chart)
        g, dg, d2g = metric.jet(np.atleast_1d(metric.x_of(r)))
        values.append(sectional_curvatures(g, dg, d2g) * r[:, None] ** 3)
    return max(float(np.max(np.abs(v - values[0]))) for v in values[1:])


def verify_suite(samples=50, seed=0, fault=None):
    """Runs every geometry check on ``samples`` random radii in [1.05, 50].

    :rtype: :class:`schwarzflow.datatypes.GeometryReport`

    """

    rng = np.random.default_rng(seed)
    radii = np.sort(rng.uniform(1.05, 50.0, size=samples))
    g0 = schwarzschild(Chart.R)

    parity = oracle_parity(g0, radii, fault=fault)
    ricci = ricci_flatness(radii)
    charts = chart_consistency(radii)
    sectional = sectional_bound_check(g0, radii)
    norm_dev, norm_ok = curvature_norm_check(g0, radii)

    suites = {
        "oracle_parity": {"passed": parity.holds,
                          "max_error": parity.max_rel_err,
                          "worst": parity.worst},
        "ricci_flat": {"passed": ricci <= constants.RICCI_TOL,
                       "max_error": ricci},
        "chart_consistency": {"passed": charts <= constants.CHART_TOL,
                              "max_error": charts},
        "sectional_bound": {"passed": sectional.holds,
                            "max_error": sectional.max_ratio - 1.0,
                            "worst": list(sectional.worst)},
        "curvature_norm": {"passed": norm_ok, "max_error": norm_dev},
    }
    for name, suite in suites.items():
        if not suite["passed"]:
            logger.warning("geometry suite %s failed: %r", name, suite)
    return datatypes.GeometryReport(suites=suites, rows=parity.rows,
                                    samples=samples, seed=seed)
