# -*- coding: utf-8 -*-

"""Shared fixtures; coarse grids keep the default run fast.

"""

import pytest

import schwarzflow.functional as functional
import schwarzflow.geometry as geometry
import schwarzflow.spectral as spectral


@pytest.fixture(scope="session")
def p_grid():
    return functional.Grid(geometry.Chart.P, 256)


@pytest.fixture(scope="session")
def eigen(p_grid):
    return spectral.min_eig(spectral.assemble(p_grid))


@pytest.fixture(scope="session")
def s_grid():
    return functional.Grid(geometry.Chart.S, 64, s_max=20.0)


@pytest.fixture(scope="session")
def flow_grid():
    return functional.Grid(geometry.Chart.S, 256, s_max=12.0)


@pytest.fixture(scope="session")
def flow_eigen(flow_grid):
    return spectral.solve_on(flow_grid)


@pytest.fixture
def out_dir(tmp_path):
    return str(tmp_path)
