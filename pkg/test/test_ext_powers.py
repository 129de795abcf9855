import numpy as np
import pytest

from sym_workbench.arithmetic.series import RingMatrix
from sym_workbench.errors import InputError
from sym_workbench.semilinear.graded_module import SigmaLinearMap
from sym_workbench.semilinear.multilinear import wedge_matrix
from sym_workbench.semilinear.slopes import SlopeMultiset, graded_slopes
from sym_workbench.windows import (
    MultiplicativeTwist,
    WindowMorphism,
    exterior_power,
    functorial_power,
    independence_check,
    verify_window,
    window_from_dieudonne,
)
from sym_workbench.windows.ext_powers import expected_l_rank
from sym_workbench.windows.window import structure_operator


@pytest.fixture(scope="module")
def window(point_ctx):
    """diag(1, 1, p): L has rank one."""
    return window_from_dieudonne(SigmaLinearMap.from_ints(point_ctx, [[[1, 0, 0], [0, 1, 0], [0, 0, 3]]]))


def _scalar_morphism(window, value: int) -> WindowMorphism:
    return WindowMorphism(window, window, [RingMatrix.identity(window.ctx, 3) * value])


def test_expected_l_rank():
    assert expected_l_rank(4, 1, 2) == 3
    assert expected_l_rank(4, 0, 2) == 0
    assert expected_l_rank(4, 1, 0) == 0


def test_first_power_is_the_window(window):
    power = exterior_power(window, 1)
    assert power == window
    assert power.to_json() == window.to_json()


def test_second_power(window):
    power = exterior_power(window, 2)
    assert power.ranks == [3]
    assert power.l_ranks == [2]
    assert graded_slopes(power.phi) == SlopeMultiset.of(0, 1, 1)
    report = verify_window(power)
    assert report.check("W.2").passed
    assert report.check("W.3").passed
    assert report.check("psi_phi").passed


def test_zeroth_and_top_power(window, point_ctx):
    assert exterior_power(window, 0).ranks == [1]
    top = exterior_power(window, 3)
    assert top.ranks == [1]
    assert top.l_ranks == [1]
    assert top.phi[0] == RingMatrix.scalar(point_ctx, 3)


def test_power_needs_small_l(point_ctx):
    wide = window_from_dieudonne(SigmaLinearMap.from_ints(point_ctx, [[[1, 0, 0], [0, 3, 0], [0, 0, 3]]]))
    assert wide.l_ranks == [2]
    with pytest.raises(InputError):
        exterior_power(wide, 2)


def test_power_index_out_of_range(window):
    with pytest.raises(InputError):
        exterior_power(window, 4)


def test_twist(window, point_ctx):
    twist = MultiplicativeTwist([RingMatrix.scalar(point_ctx, 2)])
    assert verify_window(twist.as_window()).passed
    power = exterior_power(window, 2, twist)
    assert graded_slopes(power.phi) == SlopeMultiset.of(0, 1, 1)
    with pytest.raises(InputError):
        MultiplicativeTwist([RingMatrix.scalar(point_ctx, 3)])


def test_independence_of_decomposition(window):
    report = independence_check(window, 2, rng=np.random.default_rng(4), trials=3)
    assert len(report.checks) == 3
    assert report.passed


def test_scalar_morphisms_are_window_morphisms(window):
    assert _scalar_morphism(window, 2).verify().passed
    assert WindowMorphism.identity(window).verify().passed


def test_functoriality_respects_composition(window, point_ctx):
    two, five = _scalar_morphism(window, 2), _scalar_morphism(window, 5)
    composed = functorial_power(five.compose(two), 2)
    assert composed == functorial_power(five, 2).compose(functorial_power(two, 2))
    assert composed[0] == RingMatrix.identity(point_ctx, 3) * 100


def test_functoriality_of_identity(window):
    identity = WindowMorphism.identity(window)
    assert functorial_power(identity, 2) == WindowMorphism.identity(exterior_power(window, 2))


def test_non_morphism_is_rejected(window, point_ctx):
    mixing = RingMatrix.from_ints(point_ctx, [[1, 0, 1], [0, 1, 0], [0, 0, 1]])
    alpha = WindowMorphism(window, window, [mixing])
    assert not alpha.verify().check("commutes_with_phi").passed
    with pytest.raises(InputError):
        functorial_power(alpha, 2)


def test_morphism_shape_is_checked(window, point_ctx):
    with pytest.raises(InputError):
        WindowMorphism(window, window, [RingMatrix.identity(point_ctx, 2)])


def test_structure_operator_of_power_is_power_of_structure_operator(window, point_ctx):
    power = structure_operator(exterior_power(window, 2))[0]
    assert power.congruent(wedge_matrix(structure_operator(window)[0], 2), point_ctx.N)
