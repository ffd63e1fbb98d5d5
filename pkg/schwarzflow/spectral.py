#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""The lowest eigenpair of the quadratic form a on radial diagonal tensors.

The discrete form a(h) of :mod:`schwarzflow.functional` is written as a
banded symmetric matrix A on the interleaved unknowns (u0, u1, u2) of
every node, with a diagonal mass matrix B. The most negative eigenvalue of
A x = lambda B x is found by shifted inverse iteration.
"""

import logging
import math

import numpy as np
from scipy.linalg import (LinAlgError, cho_solve_banded, cholesky_banded,
                          eig_banded)

# Original modules
import schwarzflow.constants as constants
import schwarzflow.datatypes as datatypes
import schwarzflow.exceptions as exceptions
import schwarzflow.functional as functional
import schwarzflow.geometry as geometry

logger = logging.getLogger(__name__)

#: Number of sub-diagonals of the interleaved operators.
BANDWIDTH = 3


class QuadraticFormMatrices(object):

    """Banded stiffness and diagonal mass of the discrete form.

    :param grid: The :class:`schwarzflow.functional.Grid`.
    :param A_band: Lower banded storage, ``A_band[k, j] = A[j + k, j]``.
    :param B_diag: Diagonal of the mass matrix.
    :raises schwarzflow.exceptions.AssemblyError: If B is not positive.

    """

    def __init__(self, grid, A_band, B_diag):
        if not np.all(np.isfinite(B_diag)) or np.min(B_diag) <= 0.0:
            raise exceptions.AssemblyError(
                msg="mass matrix is singular (min {:.3g})".format(
                    np.min(B_diag)))
        if not np.all(np.isfinite(A_band)):
            raise exceptions.AssemblyError(msg="non-finite stiffness")
        self.grid = grid
        self.A_band = A_band
        self.B_diag = B_diag

    @property
    def size(self):
        return self.B_diag.size

    def matvec(self, x):
        """A x.

        """

        return symmetric_banded_matvec(self.A_band, x)

    def quadratic(self, x):
        return float(x @ self.matvec(x))

    def mass(self, x):
        return float(x @ (self.B_diag * x))


def symmetric_banded_matvec(ab, x):
    """Product of a lower-banded symmetric matrix with ``x``.

    """

    y = ab[0] * x
    for k in range(1, ab.shape[0]):
        band = ab[k, :-k]
        y[k:] += band * x[:-k]
        y[:-k] += band * x[k:]
    return y


def general_banded_matvec(ab, lower, upper, x):
    """Product of a matrix in :func:`scipy.linalg.solve_banded` storage.

    """

    n = x.size
    y = np.zeros(n)
    for d in range(-lower, upper + 1):
        row = ab[upper - d]
        if d >= 0:
            y[:n - d] += row[d:] * x[d:]
        else:
            y[-d:] += row[:n + d] * x[:n + d]
    return y


def assemble(grid):
    """Builds A and B for the discrete form on ``grid``.

    :raises schwarzflow.exceptions.ParameterError: If the grid has fewer
                                                    than 16 cells.
    :raises schwarzflow.exceptions.AssemblyError: If B is singular.

    """

    if grid.n < constants.MIN_GRID_N:
        raise exceptions.ParameterError(
            msg="need at least {} cells, got {}".format(constants.MIN_GRID_N,
                                                        grid.n))
    n = grid.n
    mass = functional.MASS
    A = np.zeros((BANDWIDTH + 1, 3 * n))

    # node blocks: P, Q couplings and curvature
    block = np.zeros((n, 3, 3))
    block[:, 0, 0] += grid.P
    block[:, 1, 1] += grid.P + grid.Q
    block[:, 0, 1] -= grid.P
    block[:, 1, 0] -= grid.P
    block[:, 2, 2] += grid.Q
    block[:, 1, 2] -= grid.Q
    block[:, 2, 1] -= grid.Q
    block -= grid.kmat
    block *= grid.weights[:, None, None]

    flux = grid.kappa / grid.dx
    diag = np.zeros((n, 3))
    diag += (flux[:-1] + flux[1:])[:, None] * mass
    # bolt face carries no flux; outer face is half a cell from the node
    diag[0] -= flux[0] * mass
    diag[-1] += flux[-1] * mass

    for c in range(3):
        A[0, c::3] = block[:, c, c] + diag[:, c]
    for c in range(2):
        A[1, c::3] = block[:, c + 1, c]
    A[2, 0::3] = block[:, 2, 0]
    for c in range(3):
        A[3, c:3 * (n - 1):3] = -flux[1:-1] * mass[c]

    B = np.repeat(grid.weights, 3) * np.tile(mass, n)
    logger.debug("assembled %d unknowns", 3 * n)
    return QuadraticFormMatrices(grid, A, B)


class EigenResult(object):

    """The lowest eigenpair.

    """

    def __init__(self, lam, mode, residual_l2, grid_n, iterations,
                 second_ritz=None):
        #: The eigenvalue lambda of -Delta_L h = lambda h.
        self.lam = float(lam)

        #: The B-normalized mode as a :class:`functional.RadialSymTensor`.
        self.mode = mode

        #: ||Delta_L h + lambda h||_2 with an independent stencil.
        self.residual_l2 = float(residual_l2)

        #: Number of cells.
        self.grid_n = int(grid_n)

        #: Iterations used.
        self.iterations = int(iterations)

        #: Second-lowest Ritz value.
        self.second_ritz = second_ritz

    @property
    def grid(self):
        return self.mode.grid

    def __repr__(self):
        return "EigenResult(lam={:.10g}, grid_n={})".format(self.lam,
                                                            self.grid_n)


def _fix_sign(x):
    u0 = x[0::3]
    nz = np.flatnonzero(np.abs(u0) > 1e-14 * np.max(np.abs(x)))
    if nz.size and u0[nz[0]] < 0:
        return -x
    return x


def _ritz_pair(mats):
    scale = 1.0 / np.sqrt(mats.B_diag)
    band = mats.A_band.copy()
    for k in range(band.shape[0]):
        band[k, :band.shape[1] - k] *= scale[k:] * scale[:band.shape[1] - k]
    return eig_banded(band, lower=True, eigvals_only=True, select="i",
                      select_range=(0, 1))


def _start_vector(mats):
    # the cut-off test tensor has a negative quotient for the form of g0
    x = functional.hat_tensor(mats.grid).vector()
    return x / math.sqrt(mats.mass(x))


def eigen_residual(mats, x, lam):
    """||A x - lam B x|| in the dual norm of B.

    """

    r = mats.matvec(x) - lam * mats.B_diag * x
    return math.sqrt(float(np.sum(r * r / mats.B_diag)))


def min_eig(mats, shift=constants.EIG_SHIFT, tol=constants.EIG_TOL,
            max_iter=constants.EIG_MAX_ITER, ritz=True):
    """Most negative eigenpair of A x = lambda B x by inverse iteration.

    A - shift B is factored once; the shift must lie below the spectrum.
    The iteration starts from the cut-off test tensor and stops once the
    eigen-residual of the B-normalized iterate is below sqrt(tol), which
    puts the Rayleigh quotient within about ``tol`` of the eigenvalue.

    :param bool ritz: (optional) Also compute the second Ritz value.
    :rtype: :class:`EigenResult`
    :raises schwarzflow.exceptions.SolverError: If A - shift B is not
                                                positive definite or the
                                                iteration does not settle.

    """

    shifted = mats.A_band.copy()
    shifted[0] -= shift * mats.B_diag
    try:
        factor = cholesky_banded(shifted, lower=True)
    except LinAlgError:
        raise exceptions.SolverError(
            msg="shift {} is not below the spectrum".format(shift))

    x = _start_vector(mats)
    rq = mats.quadratic(x)
    gap = math.inf
    for it in range(1, max_iter + 1):
        y = cho_solve_banded((factor, True), mats.B_diag * x)
        x = y / math.sqrt(mats.mass(y))
        rq = mats.quadratic(x)
        gap = eigen_residual(mats, x, rq)
        if gap <= math.sqrt(tol) * max(1.0, abs(rq)):
            break
    else:
        raise exceptions.SolverError(
            msg="no convergence after {} iterations (last {:.10g}, "
                "residual {:.3g})".format(max_iter, rq, gap), last_iterate=x)

    x = _fix_sign(x)
    mode = functional.RadialSymTensor.from_vector(mats.grid, x)
    residual = residual_l2(mode, rq)
    second = float(_ritz_pair(mats)[1]) if ritz else None
    logger.info("lowest eigenvalue %.10g after %d iterations "
                "(residual %.3g)", rq, it, residual)
    return EigenResult(rq, mode, residual, mats.grid.n, it, second)


def solve(n=constants.DEFAULTS["eigen_n"], **kwargs):
    """Assembles on a p grid of ``n`` cells and returns :func:`min_eig`.

    """

    return solve_on(functional.Grid(geometry.Chart.P, n), **kwargs)


def solve_on(grid, **kwargs):
    """:func:`min_eig` of the form assembled on ``grid``.

    On the flow's s grid this is the eigenpair of the very operator that
    :func:`weak_lichnerowicz_banded` hands to the time stepper.

    """

    return min_eig(assemble(grid), **kwargs)


def weak_lichnerowicz_banded(mats):
    """-B^-1 A, the weak form of Delta_L, in solve_banded storage.

    :returns: ``(ab, lower, upper)``

    """

    low = mats.A_band
    size = mats.size
    u = BANDWIDTH
    ab = np.zeros((2 * BANDWIDTH + 1, size))
    ab[u] = -low[0] / mats.B_diag
    for k in range(1, BANDWIDTH + 1):
        band = low[k, :size - k]
        # row j + k, column j
        ab[u + k, :size - k] = -band / mats.B_diag[k:]
        # row j, column j + k
        ab[u - k, k:] = -band / mats.B_diag[:size - k]
    return ab, BANDWIDTH, BANDWIDTH


def lichnerowicz_banded(grid):
    """Strong-form Delta_L in frame components as a banded matrix.

    Rows and columns are interleaved (u0, u1, u2); storage is the one of
    :func:`scipy.linalg.solve_banded` with ``BANDWIDTH`` bands either side.
    The bolt ghost is an even reflection, the outer ghost is odd about the
    outer face.

    :returns: ``(ab, lower, upper)``

    """

    n = grid.n
    alpha, beta, gamma = grid.logd.T
    drift = 0.5 * alpha - 0.5 * beta + gamma
    inv_b = 1.0 / grid.g[:, 1]
    lo = inv_b * (1.0 / grid.dx ** 2 - 0.5 * drift / grid.dx)
    hi = inv_b * (1.0 / grid.dx ** 2 + 0.5 * drift / grid.dx)
    mid = -2.0 * inv_b / grid.dx ** 2
    mid = mid.copy()
    mid[0] += lo[0]
    mid[-1] -= hi[-1]

    block = np.zeros((n, 3, 3))
    block[:, 0, 0] = -grid.P
    block[:, 0, 1] = grid.P
    block[:, 1, 0] = grid.P
    block[:, 1, 1] = -grid.P - grid.Q
    block[:, 1, 2] = grid.Q
    block[:, 2, 1] = 0.5 * grid.Q
    block[:, 2, 2] = -0.5 * grid.Q
    block += grid.kmat / functional.MASS[None, :, None]

    size = 3 * n
    ab = np.zeros((2 * BANDWIDTH + 1, size))
    u = BANDWIDTH

    def put(rows, cols, values):
        ab[u + rows - cols, cols] = values

    idx = np.arange(n)
    for c in range(3):
        rows = 3 * idx + c
        put(rows, rows, mid + block[:, c, c])
        put(rows[1:], rows[:-1], lo[1:])
        put(rows[:-1], rows[1:], hi[:-1])
        for d in range(3):
            if d != c:
                put(rows, 3 * idx + d, block[:, c, d])
    return ab, BANDWIDTH, BANDWIDTH


def lichnerowicz_apply(h):
    """Delta_L h with a non-conservative second-order stencil.

    :rtype: :class:`schwarzflow.functional.RadialSymTensor`

    """

    ab, lower, upper = lichnerowicz_banded(h.grid)
    y = general_banded_matvec(ab, lower, upper, h.vector())
    return functional.RadialSymTensor.from_vector(h.grid, y)


def residual_l2(mode, lam):
    """||Delta_L h + lam h||_2.

    """

    res = lichnerowicz_apply(mode) + lam * mode
    return functional.l2_norm(res)


def decay_check(result):
    """Endpoint behaviour of the mode (or of any tensor on a p grid).

    :param result: An :class:`EigenResult` or a ``RadialSymTensor``.
    :rtype: :class:`schwarzflow.datatypes.DecayReport`

    """

    h = getattr(result, "mode", result)
    p = h.grid.p
    size = functional.pointwise_norm(h)

    inner = p <= constants.DECAY_INNER
    outer = p >= constants.DECAY_OUTER
    ratio0 = size[inner] / p[inner]
    ratio1 = size[outer] / ((1.0 - p[outer]) * (1.0 + p[outer]))

    def bounded(ratio, end):
        if ratio.size == 0:
            return True
        return bool(ratio[end] <= 2.0 * np.mean(ratio))

    scale = max(size[0], 1e-300)
    report = datatypes.DecayReport(
        c0=float(np.max(ratio0)) if ratio0.size else 0.0,
        c1=float(np.max(ratio1)) if ratio1.size else 0.0,
        bounded_inner=bounded(ratio0, 0),
        bounded_outer=bounded(ratio1, -1),
        bolt_value=float(size[0]),
        bolt_regular=bool(abs(h.u0[0] - h.u1[0]) <= 0.05 * scale))
    if not report.bounded_inner:
        logger.info("|h|/p grows towards the bolt; |h| -> %.4g there",
                    report.bolt_value)
    return report


def gauge_diagnostic(result):
    """Trace, divergence and gauge residual norms of the mode.

    :rtype: dict
    """

    h = getattr(result, "mode", result)
    grid = h.grid
    trace, zeta = functional.trace_and_divergence(h)
    frame_zeta = zeta / np.sqrt(grid.g[:, 1])
    gap = functional.gauge_residual(h)
    return {
        "trace_l2": math.sqrt(float(np.sum(grid.weights * trace ** 2))),
        "divergence_l2": math.sqrt(float(np.sum(grid.weights
                                                * frame_zeta ** 2))),
        "gauge_l2": math.sqrt(float(np.sum(grid.weights * np.sum(
            functional.MASS * gap ** 2, axis=-1)))),
    }


def rayleigh_upper_bound(mats, h):
    """a(h) / ||h||^2 in the discrete form; bounds the lowest eigenvalue.

    """

    x = h.vector()
    mass = mats.mass(x)
    if mass <= 0.0:
        raise exceptions.ParameterError(msg="the test tensor vanishes")
    return mats.quadratic(x) / mass


def upper_bound_from_lemma36(n=constants.LEMMA_N,
                             rate=constants.TAIL_RATE):
    """a_hat / ||hat h||^2 with the cut-off certificate's literal total.

    """

    cert = functional.lemma36_certificate(n, rate)
    return cert.a_hat / functional.hat_norm_sq(n, rate)
