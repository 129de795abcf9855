import os

import pytest
from hypothesis import settings

from sym_workbench.arithmetic.ring import RingParams, make_ring
from sym_workbench.arithmetic.series import RingMatrix
from sym_workbench.structures.connection import solve_connection
from sym_workbench.structures.deformation import DeformedWindow, deform_M, deform_N, find_deformation_sequence
from sym_workbench.structures.sym_structure import SymSpec, build_sym
from sym_workbench.windows import Window

settings.register_profile("workbench", max_examples=25, deadline=None)
settings.register_profile("thorough", max_examples=500, deadline=None)
settings.load_profile(os.getenv("HYPOTHESIS_PROFILE", "workbench"))

RUNNING_PARAMS = RingParams(p=3, r=5, N=5, T=9, D=3)
RUNNING_SPEC = SymSpec(b=[1], z=2, a=2, r=5)


def trivial_deformation(window: Window) -> DeformedWindow:
    """The constant family over t: every u is the identity."""
    T = window.ctx.T
    return DeformedWindow(
        window=Window(window.phi.lift((T,)), window.decomposition),
        source=window,
        u=[RingMatrix.identity(window.ctx, n, (T,)) for n in window.ranks],
    )


@pytest.fixture(scope="module")
def point_ctx():
    """Z_3 itself: r = 1, so tau is the identity."""
    return make_ring(RingParams(p=3, r=1, N=5, T=6))


@pytest.fixture(scope="module")
def cubic_ctx():
    return make_ring(RingParams(p=3, r=3, N=5, T=6))


@pytest.fixture(scope="module")
def running_ctx():
    return make_ring(RUNNING_PARAMS)


@pytest.fixture(scope="module")
def running_structure(running_ctx):
    return build_sym(RUNNING_SPEC, running_ctx)


@pytest.fixture(scope="module")
def running_sequence(running_structure):
    return find_deformation_sequence(running_structure.N)


@pytest.fixture(scope="module")
def running_deformation(running_structure, running_sequence):
    return deform_N(running_structure.N, running_sequence), deform_M(running_structure, running_sequence)


@pytest.fixture(scope="module")
def running_connections(running_deformation):
    N_def, M_def = running_deformation
    return solve_connection(N_def), solve_connection(M_def)
