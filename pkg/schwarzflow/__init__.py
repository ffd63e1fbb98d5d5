#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""Numerical laboratory for Ricci flow near Euclidean Schwarzschild.

This library collects the pieces needed to study the unstable direction
of the Euclidean Schwarzschild metric on S^1 x R x S^2: exact charts and
curvature, the quadratic form of the second variation, its lowest
eigenpair, the radially symmetric Ricci-de Turck flow started along the
unstable mode, and the ancient-solution limit of those flows.

.. note :: All quantities assume the mass normalization M = 1/2, so the
           horizon sits at r = 1 and the thermal circle has period 4 pi.
"""

__author__ = "schwarzflow developers"
__version__ = "1.0.1"
__date__ = "2026-10-17"
__licence__ = "MIT License"
