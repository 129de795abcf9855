import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sym_workbench.arithmetic.ring import RingParams, make_ring
from sym_workbench.arithmetic.series import RingMatrix
from sym_workbench.errors import InputError
from sym_workbench.semilinear.graded_module import SigmaLinearMap
from sym_workbench.windows import (
    CheckStatus,
    Frame,
    NormalDecomposition,
    Window,
    WindowVerifier,
    dieudonne_from_window,
    frobenius_base_change,
    m1_submodule,
    psi_sharp,
    random_decomposition,
    special_fibre,
    verify_window,
    window_from_dieudonne,
)
from sym_workbench.windows.point_verifier import PointWindowVerifier

POINT = make_ring(RingParams(p=3, r=1, N=5, T=6))
SUPERSINGULAR = [[0, 1], [3, 0]]


def _supersingular(ctx) -> Window:
    return window_from_dieudonne(SigmaLinearMap.from_ints(ctx, [SUPERSINGULAR] * ctx.r))


def test_dieudonne_window_decomposition(point_ctx):
    window = _supersingular(point_ctx)
    assert window.frame == Frame.POINT
    assert window.l_ranks == [1]
    assert window.quotient_dims() == [1]
    assert window.decomposition.basis(0) == RingMatrix.identity(point_ctx, 2)
    assert m1_submodule(window.phi)[0] == RingMatrix.from_ints(point_ctx, [[1, 0], [0, 3]])


def test_supersingular_window_satisfies_axioms(point_ctx):
    report = verify_window(_supersingular(point_ctx))
    assert report.passed
    assert [c.name for c in report.checks] == ["W.1", "W.2", "W.3", "psi_phi", "W.4"]
    assert report.nilpotence_index == 2


def test_psi_sharp_of_supersingular_window(point_ctx):
    psi = psi_sharp(_supersingular(point_ctx))
    assert psi[0] == RingMatrix.from_ints(point_ctx, SUPERSINGULAR)


def test_etale_window(point_ctx):
    window = window_from_dieudonne(SigmaLinearMap.identity(point_ctx, 2))
    assert window.l_ranks == [0]
    report = verify_window(window)
    assert report.passed
    assert psi_sharp(window)[0] == RingMatrix.identity(point_ctx, 2) * 3
    assert report.nilpotence_index == 1


def test_multiplicative_window_fails_nilpotence(point_ctx):
    window = window_from_dieudonne(SigmaLinearMap.from_ints(point_ctx, [[[3, 0], [0, 3]]]))
    assert window.l_ranks == [2]
    report = verify_window(window)
    assert report.check("W.3").passed
    assert report.check("W.4").status == CheckStatus.FAIL
    assert report.calculate_status() == CheckStatus.FAIL


def test_filtration_failure_has_witness(point_ctx):
    decomposition = NormalDecomposition((RingMatrix.identity(point_ctx, 2),), (1,))
    window = Window(SigmaLinearMap.identity(point_ctx, 2), decomposition)
    report = verify_window(window)
    assert report.check("W.2").status == CheckStatus.FAIL
    assert report.check("W.2").witness == {"row": 0, "col": 0}
    assert report.check("W.3").status == CheckStatus.SKIPPED
    assert not report.passed


@pytest.mark.parametrize("matrix", [[[9]], [[1, 1], [1, 1]]])
def test_non_dieudonne_operators_are_rejected(point_ctx, matrix):
    with pytest.raises(InputError):
        window_from_dieudonne(SigmaLinearMap.from_ints(point_ctx, [matrix]))


@given(st.integers(min_value=0, max_value=2 ** 32))
def test_psi_sharp_does_not_depend_on_decomposition(seed):
    window = _supersingular(POINT)
    other = window.with_decomposition(random_decomposition(window, np.random.default_rng(seed)))
    assert other == window
    assert psi_sharp(other)[0].congruent(psi_sharp(window)[0], POINT.N)
    assert verify_window(other).passed


def test_decomposition_of_another_filtration_is_rejected(point_ctx):
    window = _supersingular(point_ctx)
    swapped = RingMatrix.from_ints(point_ctx, [[0, 1], [1, 0]])
    with pytest.raises(InputError):
        window.with_decomposition(NormalDecomposition((swapped,), (1,)))


def test_series_window(point_ctx):
    window = _supersingular(point_ctx)
    series = Window(window.phi.lift((6,)), window.decomposition)
    assert series.frame == Frame.SERIES
    report = verify_window(series)
    assert report.passed
    assert report.check("special_fibre").passed
    assert special_fibre(series) == window
    with pytest.raises(InputError):
        dieudonne_from_window(series)


def test_point_verifier_rejects_series_window(point_ctx):
    window = _supersingular(point_ctx)
    with pytest.raises(ValueError):
        PointWindowVerifier().verify(Window(window.phi.lift((4,)), window.decomposition))


def test_verifier_factory():
    assert WindowVerifier("SERIES").frame == Frame.SERIES
    with pytest.raises(ValueError):
        WindowVerifier("bogus")


def test_frobenius_base_change(cubic_ctx):
    window = _supersingular(cubic_ctx)
    assert verify_window(window).passed
    twisted = frobenius_base_change(window)
    assert twisted.l_ranks == window.l_ranks
    assert verify_window(twisted).passed


def test_window_json(cubic_ctx):
    window = _supersingular(cubic_ctx)
    payload = window.to_json()
    assert payload["frame"] == "point"
    assert Window.from_json(cubic_ctx, payload) == window
