#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""Defines the report types shared by the modules of schwarzflow.

Every report can be turned into plain JSON-ready data with
:meth:`Record.as_dict`.
"""

import math
import platform
import time

import numpy as np

# Original modules
import schwarzflow
import schwarzflow.constants as constants


def plain(value):
    """Converts numpy scalars, tuples and nested containers for JSON.

    Non-finite floats become strings so the output stays strict JSON.

    """

    if isinstance(value, Record):
        return value.as_dict()
    if isinstance(value, dict):
        return {str(k) if not isinstance(k, str) else k: plain(v)
                for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return [plain(v) for v in value.tolist()]
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, (np.integer, int)):
        return int(value)
    if isinstance(value, (np.floating, float)):
        value = float(value)
        if not math.isfinite(value):
            return repr(value)
        return value
    return value


class Record(object):

    """Base class of the reports.

    Subclasses list their public attributes in ``_fields``.

    """

    _fields = ()

    def __init__(self, **kwargs):
        for name in self._fields:
            setattr(self, name, kwargs.pop(name, None))
        if kwargs:
            raise TypeError("unexpected fields: {}".format(sorted(kwargs)))

    def as_dict(self):
        """Returns the fields as JSON-ready data.

        :rtype: dict
        """

        return {name: plain(getattr(self, name)) for name in self._fields}

    def __repr__(self):
        return "{}({})".format(type(self).__name__, ", ".join(
            "{}={!r}".format(n, getattr(self, n)) for n in self._fields
            if not isinstance(getattr(self, n), (list, dict, np.ndarray))))


class CurvatureSet(Record):

    """Curvature of a diagonal radial metric at one point.

    Sphere components are taken at theta = pi/2 with sin^2 theta stripped.

    ``christoffel``
        Dict (k, i, j) -> Gamma^k_ij, symmetric in (i, j).
    ``riemann_diag``
        Dict (i, j) -> R_ijij, stored for both orders.
    ``ricci``
        Dict (i, i) -> R_ii.
    ``sectional``
        Dict (i, j) -> K_ij.
    ``riem_norm_sq``
        |Rm|^2, non-negative.

    """

    _fields = ("christoffel", "riemann_diag", "ricci", "sectional",
               "riem_norm_sq")


class SectionalReport(Record):

    """Result of the bound |K_ij| <= r^-3.

    """

    _fields = ("max_ratio", "worst", "holds")


class ParityReport(Record):

    """Closed forms against the finite-difference oracle.

    ``rows`` hold ``(r, p, s, component_name, closed_form, oracle,
    abs_err)``.

    """

    _fields = ("rows", "max_rel_err", "worst", "holds")


class GeometryReport(Record):

    """All geometry suites of one verification run.

    """

    _fields = ("suites", "rows", "samples", "seed")

    @property
    def passed(self):
        return all(suite["passed"] for suite in self.suites.values())

    def as_dict(self):
        return {"samples": self.samples, "seed": self.seed,
                "passed": self.passed, "suites": plain(self.suites),
                "schema": constants.SCHEMA_VERSION}


class Lemma36Certificate(Record):

    """The eight integrals of the cut-off test tensor and their groupings.

    ``J`` maps "J1".."J8" to values; ``inequalities`` maps "ne1".."ne3"
    to dicts with ``value``, ``bound`` and ``holds``. The ``*_volume``
    fields carry the bracket with the r^2 weight of the volume form kept
    on the derivative terms.

    """

    _fields = ("n", "tail_rate", "J", "total", "a_hat", "inequalities",
               "J4_volume", "J5_volume", "total_volume", "a_hat_volume")

    @property
    def holds(self):
        return (self.total < constants.LEMMA_TOTAL_MAX
                and all(v["holds"] for v in self.inequalities.values()))

    def failed(self):
        """Names of the groupings that do not hold.

        :rtype: list
        """

        return [k for k, v in sorted(self.inequalities.items())
                if not v["holds"]]

    def as_dict(self):
        out = {"n": self.n, "tail_rate": self.tail_rate}
        out.update(plain(self.J))
        out.update({
            "total": plain(self.total),
            "a_hat": plain(self.a_hat),
            "inequalities": plain(self.inequalities),
            "J4_volume": plain(self.J4_volume),
            "J5_volume": plain(self.J5_volume),
            "total_volume": plain(self.total_volume),
            "a_hat_volume": plain(self.a_hat_volume),
            "holds": self.holds,
            "schema": constants.SCHEMA_VERSION,
        })
        return out


class DecayReport(Record):

    """Endpoint behaviour of a radial tensor.

    ``c0`` is sup |h|/p over p <= 0.1 and ``c1`` is sup |h|/(1 - p^2) over
    p >= 0.9. ``bolt_value`` is |h| at the innermost node and
    ``bolt_regular`` tells whether u0 - u1 vanishes there.

    """

    _fields = ("c0", "c1", "bounded_inner", "bounded_outer", "bolt_value",
               "bolt_regular")


class ConeReport(Record):

    """Distance of a profile to the ray through h.

    """

    _fields = ("opening", "delta_star")


class RunManifest(Record):

    """Describes one command-line run; written last.

    """

    _fields = ("command", "config", "artifacts", "versions", "wall_time")

    def __init__(self, command, config, artifacts=None):
        Record.__init__(self, command=command, config=dict(config),
                        artifacts=list(artifacts or []),
                        versions={"tool": schwarzflow.__version__,
                                  "python": platform.python_version(),
                                  "numpy": np.__version__,
                                  "schema": constants.SCHEMA_VERSION},
                        wall_time=None)
        self._start = time.perf_counter()

    def add(self, path):
        """Registers an artifact.

        """

        self.artifacts.append(str(path))

    def finish(self):
        """Stops the clock.

        """

        self.wall_time = time.perf_counter() - self._start
        return self
