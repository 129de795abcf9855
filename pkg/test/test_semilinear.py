from fractions import Fraction

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st
from pydantic import ValidationError

from sym_workbench.arithmetic import linalg
from sym_workbench.arithmetic.ring import RingParams, make_ring
from sym_workbench.arithmetic.series import RingMatrix
from sym_workbench.errors import InputError, NotIsoclinalError, PrecisionError
from sym_workbench.semilinear.graded_module import GradedSigmaModule, SigmaLinearMap, compose_cycle
from sym_workbench.semilinear.multilinear import dual, sym_basis, sym_power, tensor, wedge_power
from sym_workbench.semilinear.slopes import (
    SlopeMultiset,
    generic_slopes,
    graded_slopes,
    newton_polygon,
    skeleton,
    ungraded_slopes,
)

QUADRATIC = make_ring(RingParams(p=3, r=2, N=5, T=6))
CUBIC = make_ring(RingParams(p=3, r=3, N=5, T=6))


def _diagonal(ctx, *entries: int) -> SigmaLinearMap:
    n = len(entries)
    rows = [[entries[i] if i == j else 0 for j in range(n)] for i in range(n)]
    return SigmaLinearMap.from_ints(ctx, [rows] * ctx.r)


def test_module_rejects_negative_ranks():
    with pytest.raises(ValidationError):
        GradedSigmaModule(ranks=[1, -1])


def test_mismatched_degrees_are_rejected():
    with pytest.raises(InputError):
        SigmaLinearMap.from_ints(QUADRATIC, [[[1], [0]], [[1]]])
    with pytest.raises(InputError):
        SigmaLinearMap.from_ints(QUADRATIC, [[[1]]])


def test_compose_cycle_of_alternating_operator():
    phi = SigmaLinearMap.from_ints(QUADRATIC, [[[3]], [[1]]])
    assert compose_cycle(phi, 0) == RingMatrix.scalar(QUADRATIC, 3)
    assert compose_cycle(phi, 1) == RingMatrix.scalar(QUADRATIC, 3)


def test_graded_and_ungraded_slopes_differ():
    phi = SigmaLinearMap.from_ints(QUADRATIC, [[[3]], [[1]]])
    assert graded_slopes(phi, 0) == SlopeMultiset.of(1)
    assert ungraded_slopes(phi) == SlopeMultiset.of(Fraction(1, 2), Fraction(1, 2))


def test_newton_polygon():
    polygon = newton_polygon([3, 1, 0])
    assert polygon.vertices == [(0, 3), (1, 1), (2, 0)]
    assert polygon.slopes() == SlopeMultiset.of(1, 2)
    assert newton_polygon([2, float("inf"), 0]).slopes() == SlopeMultiset.of(1, 1)
    assert newton_polygon([2, 2, 0]).vertices == [(0, 2), (2, 0)]


def test_newton_polygon_of_vanishing_polynomial():
    with pytest.raises(PrecisionError):
        newton_polygon([float("inf"), float("inf")])


def test_slope_multiset_serializes_fractions():
    slopes = SlopeMultiset.of(Fraction(3, 2), 0)
    assert slopes.model_dump() == {"values": ["0", "3/2"]}
    assert slopes.total() == Fraction(3, 2)
    assert not slopes.is_isoclinal()
    assert str(slopes.shifted(1)) == "{1, 5/2}"


@given(st.integers(min_value=0, max_value=2 ** 32))
def test_slopes_are_invariant_under_change_of_basis(seed):
    rng = np.random.default_rng(seed)
    change = [RingMatrix.random(CUBIC, 2, 2, rng) for _ in range(CUBIC.r)]
    assume(all(linalg.is_invertible(g) for g in change))
    phi = _diagonal(CUBIC, 1, 3)
    conjugated = phi.conjugate(change)
    assert graded_slopes(conjugated, 0) == graded_slopes(phi, 0) == SlopeMultiset.of(0, 3)


def test_skeleton_of_isoclinal_operator(point_ctx):
    result = skeleton(_diagonal(point_ctx, 3, 3), z=1)
    assert result.rank == 2
    assert not result.partial
    assert result.require_complete() is result


def test_skeleton_needs_isoclinal_operator(point_ctx):
    with pytest.raises(NotIsoclinalError):
        skeleton(_diagonal(point_ctx, 1, 3), z=1)


def test_generic_slopes_over_series_frame(point_ctx):
    matrix = RingMatrix.from_ints(point_ctx, [[3]], (6,)) + RingMatrix.from_ints(point_ctx, [[1]], (6,)).shift(1)
    phi = SigmaLinearMap([matrix])
    assert graded_slopes(phi.at_zero()) == SlopeMultiset.of(1)
    generic = generic_slopes(phi, doubled=phi.lift((12,)))
    assert generic.slopes == SlopeMultiset.of(0)
    assert generic.truncation == 6
    assert generic.certified_truncation == 12


def test_generic_slopes_need_series_frame(point_ctx):
    with pytest.raises(ValueError):
        generic_slopes(_diagonal(point_ctx, 1))


def test_wedge_power_slopes(point_ctx):
    assert graded_slopes(wedge_power(_diagonal(point_ctx, 1, 3, 9), 2)) == SlopeMultiset.of(1, 2, 3)
    assert wedge_power(_diagonal(point_ctx, 1, 3), 0).rank(0) == 1
    with pytest.raises(InputError):
        wedge_power(_diagonal(point_ctx, 1, 3, 9), 2, cap=2)


def test_sym_power_slopes(point_ctx):
    assert sym_basis(2, 2) == ((2, 0), (1, 1), (0, 2))
    assert graded_slopes(sym_power(_diagonal(point_ctx, 1, 3), 2)) == SlopeMultiset.of(0, 1, 2)


def test_tensor_and_dual_slopes(point_ctx):
    phi = _diagonal(point_ctx, 1, 3)
    assert graded_slopes(tensor(phi, phi)) == SlopeMultiset.of(0, 1, 1, 2)
    dual_phi = dual(phi)
    assert dual_phi.quasi
    assert graded_slopes(dual_phi) == SlopeMultiset.of(-1, 0)


def test_sigma_map_json(cubic_ctx):
    phi = _diagonal(cubic_ctx, 1, 3)
    payload = phi.to_json()
    assert payload["ranks"] == [2, 2, 2]
    assert SigmaLinearMap.from_json(cubic_ctx, payload) == phi
    payload["ranks"] = [1, 1, 1]
    with pytest.raises(InputError):
        SigmaLinearMap.from_json(cubic_ctx, payload)
