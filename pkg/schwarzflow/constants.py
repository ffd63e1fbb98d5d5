#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""Constants and defaults for schwarzflow.

"""

import math

#: Period of the Euclidean time circle for M = 1/2.
T_PERIOD = 4.0 * math.pi

#: Area of the unit round 2-sphere.
SPHERE_AREA = 4.0 * math.pi

#: Volume factor of the S^1 x S^2 directions (t-period times sphere area).
VOLUME_FACTOR = T_PERIOD * SPHERE_AREA

#: Value of the s chart at the inner junction r = 2.
S_JUNCTION = 1.0 / math.sqrt(2.0)

#: Inner and outer junctions of the s chart, in the r chart.
S_BLEND = (2.0, 3.0)

#: Version of every JSON and CSV layout written by the command-line tool.
SCHEMA_VERSION = 1

#: Base step of the finite-difference oracle.
FD_STEP = 1e-5

#: Relative step of the outer (Christoffel) finite difference.
FD_OUTER_STEP = 1e-3

#: Tolerance of closed form against oracle.
ORACLE_TOL = 1e-6

#: Tolerance of scalar agreement between charts, in units of r^-3.
CHART_TOL = 1e-12

#: Tolerance for Ricci flatness of the background.
RICCI_TOL = 1e-9

#: Absolute tolerance of the adaptive quadrature.
QUAD_EPSABS = 1e-10

#: Subdivision limit handed to :func:`scipy.integrate.quad`.
QUAD_LIMIT = 200

#: Thresholds of the three groupings of the cut-off test tensor.
LEMMA_THRESHOLDS = {"ne1": 0.0, "ne2": -0.7, "ne3": 0.5695}

#: The certificate total must be below this value.
LEMMA_TOTAL_MAX = -0.1

#: Default cut-off parameter of the test tensor.
LEMMA_N = 1000

#: Default decay rate of the test tensor tail.
TAIL_RATE = 2.0 / 3.0

#: Spectral shift, below any admissible eigenvalue.
EIG_SHIFT = -2.1

#: Rayleigh-quotient tolerance of inverse iteration.
EIG_TOL = 1e-10

#: Iteration cap of inverse iteration.
EIG_MAX_ITER = 500

#: Smallest grid accepted by the assembler.
MIN_GRID_N = 16

#: Window of the decay check near the bolt (p <= value).
DECAY_INNER = 0.1

#: Window of the decay check near infinity (p >= value).
DECAY_OUTER = 0.9

#: Cap on the starting amplitude; above it the run is nonlinear.
EPS_CAP = 1e-2

#: Positivity window of the flow, relative to the background.
POSITIVITY = (0.5, 2.0)

#: Largest explicit time step.
DT_MAX = 1e-3

#: CFL safety factor of the explicit remainder.
CFL = 0.25

#: Relative step of the central difference that linearizes the flow at g0.
LINEARIZATION_STEP = 1e-5

#: Largest |v - 1| an unperturbed run may reach.
DRIFT_TOL = 1e-8

#: Relative agreement required between the flow grid and p grid lambda.
LAMBDA_AGREEMENT = 0.05

#: Fraction of the s range treated as far field.
FARFIELD_FRACTION = 0.05

#: Relative tolerance of the Cauchy decrease check.
CAUCHY_TOL = 0.10

#: The de Turck pull-back passes when its residual is within this factor.
DETURCK_FACTOR = 10.0

#: Default configuration, overridable by ``key = value`` files.
DEFAULTS = {
    "epsilon": 1e-3,
    "t_end": -3.0,
    "grid_n": 2048,
    "s_max": 50.0,
    "dt": 0.0,
    "background": "g0_plus_eps_h",
    "eigen_n": 4096,
    "record_every": 50,
    "eps_cap": EPS_CAP,
    "linear_efolds": 1.0,
    "epsilons": [2.0 ** -n for n in range(4, 9)],
    "t_common": -3.0,
    "ancient_background": "g0",
    "samples": 50,
    "lemma_n": LEMMA_N,
    "residual_threshold": 1e-4,
    "shift": EIG_SHIFT,
    "max_iter": EIG_MAX_ITER,
    "eig_tol": EIG_TOL,
    "seed": 0,
    "workers": 1,
}

#: Accepted values of the ``background`` key.
BACKGROUNDS = ("g0", "g0_plus_eps_h")

#: Process exit codes of the command-line tool.
EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_NUMERICAL = 3
