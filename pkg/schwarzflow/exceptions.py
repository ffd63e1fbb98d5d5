#!/usr/bin/env python
# -*- coding: utf-8 -*-

""" This module contains exceptions of schwarzflow.

"""


class SchwarzflowError(Exception):

    """This is the base class for exceptions in this module.

    :param msg: (optional) The detailed information of the error.

    """

    default = "An error occurred in schwarzflow."

    def __init__(self, msg=None):
        self.msg = msg

    def __str__(self):
        if self.msg is not None:
            return str(self.msg)
        else:
            return self.default


class DomainError(SchwarzflowError):

    """Raised if a chart value is outside its range, e.g. r <= 1.

    :param msg: (optional) The detailed information of the error.

    """

    default = "The value is outside the domain of the chart."


class ChartConstructionError(SchwarzflowError):

    """Raised if the blended chart cannot be made monotone.

    :param msg: (optional) The detailed information of the error.

    """

    default = "The blend of the s chart is not monotone."


class ParameterError(SchwarzflowError):

    """Raised for an invalid argument, like ``n = 0`` or a zero tensor.

    :param msg: (optional) The detailed information of the error.

    """

    default = "An invalid parameter was given."


class DataError(SchwarzflowError):

    """Raised if sampled data are non-finite or have mismatched lengths.

    :param msg: (optional) The detailed information of the error.

    """

    default = "The sampled data are invalid."


class ExtrapolationError(SchwarzflowError):

    """Raised if a point lies outside the hull of the grid nodes.

    :param msg: (optional) The detailed information of the error.

    """

    default = "The point lies outside the grid."


class AssemblyError(SchwarzflowError):

    """Raised if the discrete quadratic form cannot be assembled.

    :param msg: (optional) The detailed information of the error.

    """

    default = "The mass matrix is singular."


class SolverError(SchwarzflowError):

    """Raised if the eigensolver does not converge.

    :param msg: (optional) The detailed information of the error.
    :param last_iterate: (optional) The iterate when the solver gave up.

    """

    default = "The eigensolver did not converge."

    def __init__(self, msg=None, last_iterate=None):
        SchwarzflowError.__init__(self, msg)
        #: The last iterate, as a flat interleaved vector.
        self.last_iterate = last_iterate


class FlowError(SchwarzflowError):

    """Raised if a time step of the flow cannot be taken.

    :param msg: (optional) The detailed information of the error.

    """

    default = "The flow step failed."


class FlowBlowupError(FlowError):

    """Raised if the metric leaves the positivity window.

    :param msg: (optional) The detailed information of the error.
    :param last_state: (optional) The last state that was still valid.

    """

    default = "The metric lost positivity."

    def __init__(self, msg=None, last_state=None):
        FlowError.__init__(self, msg)
        #: The last valid :class:`schwarzflow.flow.FlowState`.
        self.last_state = last_state


class DeTurckCrossingError(SchwarzflowError):

    """Raised if characteristics of the de Turck equation cross.

    :param msg: (optional) The detailed information of the error.
    :param location: (optional) ``(delta, x)`` where monotonicity was lost.

    """

    default = "Characteristics of the de Turck map crossed."

    def __init__(self, msg=None, location=None):
        SchwarzflowError.__init__(self, msg)
        self.location = location


class ConfigError(SchwarzflowError):

    """Raised for a malformed configuration file.

    :param msg: (optional) The detailed information of the error.

    """

    default = "The configuration is invalid."
