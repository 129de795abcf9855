import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sym_workbench.arithmetic.linalg import (
    charpoly,
    determinant,
    inverse,
    invert,
    is_invertible,
    kernel_basis,
    kernel_mod_p,
    point_inverse,
    quasi_inverse,
    rank_mod_p,
    row_echelon,
    smith_form,
    trace,
)
from sym_workbench.arithmetic.ring import RingParams, make_ring
from sym_workbench.arithmetic.series import RingMatrix
from sym_workbench.errors import InputError, SingularMatrixError

POINT = make_ring(RingParams(p=3, r=1, N=5, T=6))
entries = st.lists(st.integers(min_value=-40, max_value=40), min_size=9, max_size=9)


def _square(values: list[int]) -> RingMatrix:
    return RingMatrix.from_ints(POINT, [values[0:3], values[3:6], values[6:9]])


def test_trace(point_ctx):
    a = RingMatrix.from_ints(point_ctx, [[1, 2], [3, 4]])
    assert trace(a) == RingMatrix.scalar(point_ctx, 5)
    with pytest.raises(InputError):
        trace(RingMatrix.zeros(point_ctx, 2, 3))


def test_point_inverse(point_ctx):
    a = RingMatrix.from_ints(point_ctx, [[1, 2], [3, 4]])
    assert a @ point_inverse(a) == RingMatrix.identity(point_ctx, 2)
    with pytest.raises(SingularMatrixError):
        point_inverse(RingMatrix.from_ints(point_ctx, [[3, 0], [0, 1]]))


def test_quasi_inverse_carries_denominator(point_ctx):
    a = RingMatrix.from_ints(point_ctx, [[3, 0], [0, 1]])
    b = quasi_inverse(a)
    assert b.denom == 1
    assert a @ b == RingMatrix.identity(point_ctx, 2)
    assert invert(a) == b


def test_quasi_inverse_of_singular_matrix_raises(point_ctx):
    with pytest.raises(SingularMatrixError):
        quasi_inverse(RingMatrix.from_ints(point_ctx, [[1, 2], [2, 4]]))


def test_series_inverse(cubic_ctx):
    rng = np.random.default_rng(11)
    a = RingMatrix.identity(cubic_ctx, 3, (6,)) + RingMatrix.random(cubic_ctx, 3, 3, rng, (6,)).shift(1)
    assert is_invertible(a)
    assert a @ inverse(a) == RingMatrix.identity(cubic_ctx, 3, (6,))


def test_determinant(point_ctx):
    assert determinant(RingMatrix.from_ints(point_ctx, [[1, 2], [3, 4]])) == RingMatrix.scalar(point_ctx, -2)
    assert not is_invertible(RingMatrix.from_ints(point_ctx, [[3, 1], [0, 1]]))


def test_charpoly_of_companion_matrix(point_ctx):
    coeffs = charpoly(RingMatrix.from_ints(point_ctx, [[0, 1], [3, 0]]))
    assert coeffs[0] == RingMatrix.scalar(point_ctx, -3)
    assert coeffs[1] == RingMatrix.zeros(point_ctx, 1, 1)
    assert coeffs[2] == RingMatrix.scalar(point_ctx, 1)


@given(entries)
def test_charpoly_constant_term_is_minus_determinant(values):
    a = _square(values)
    assert charpoly(a)[0].congruent(-determinant(a), POINT.N)


@given(entries)
def test_charpoly_trace_coefficient(values):
    a = _square(values)
    assert charpoly(a)[2] == -trace(a)


def test_smith_form(point_ctx):
    a = RingMatrix.from_ints(point_ctx, [[9, 0], [0, 3]])
    form = smith_form(a)
    assert form.valuations == [1, 2]
    assert form.rank(2) == 1
    product = form.left @ a @ form.right
    assert product.entry(0, 1).is_zero() and product.entry(1, 0).is_zero()


def test_kernel_basis(point_ctx):
    a = RingMatrix.from_ints(point_ctx, [[1, 1], [1, 1]])
    kernel = kernel_basis(a, point_ctx.prec)
    assert kernel.shape == (2, 1)
    assert (a @ kernel).is_zero()


def test_residue_rank_and_kernel(point_ctx):
    a = RingMatrix.from_ints(point_ctx, [[1, 2, 0], [2, 4, 3]])
    assert rank_mod_p(a) == 1
    kernel = kernel_mod_p(a)
    assert kernel.shape == (3, 2)
    assert (a.mod_p() @ kernel).is_zero()


def test_row_echelon_pivots(point_ctx):
    reduced, pivots = row_echelon(RingMatrix.from_ints(point_ctx, [[0, 2, 1], [0, 1, 1]]))
    assert pivots == [1, 2]
    assert reduced.entry(0, 1) == RingMatrix.scalar(point_ctx, 1)
