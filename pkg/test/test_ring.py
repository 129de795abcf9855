import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from pydantic import ValidationError

from sym_workbench.arithmetic.ring import (
    RingParams,
    headroom,
    least_irreducible,
    make_ring,
    required_denominator_budget,
)
from sym_workbench.arithmetic.series import RingMatrix, TruncatedSeries
from sym_workbench.errors import (
    DenominatorBudgetError,
    EXIT_INPUT,
    EXIT_PRECISION,
    EXIT_VERIFICATION,
    InputError,
    IntegralityError,
    LadderStuckError,
    exit_code_for,
)

CUBIC = make_ring(RingParams(p=3, r=3, N=5, T=6))
coords = st.lists(st.integers(min_value=0, max_value=3 ** 8), min_size=3, max_size=3)


@pytest.mark.parametrize("p", [1, 2, 4, 9, 15])
def test_params_reject_non_odd_primes(p):
    with pytest.raises(ValidationError):
        RingParams(p=p)


def test_params_are_frozen():
    params = RingParams(p=5, r=2)
    with pytest.raises(ValidationError):
        params.p = 7


@pytest.mark.parametrize("p, T, expected", [(3, 9, 2), (3, 10, 4), (5, 6, 1), (3, 1, 0), (7, 7, 0)])
def test_required_denominator_budget(p, T, expected):
    assert required_denominator_budget(p, T) == expected


def test_working_precision_includes_headroom(running_ctx):
    assert headroom(running_ctx.params) == 22
    assert running_ctx.prec == 27
    assert running_ctx.modulus == 3 ** 27


def test_least_irreducible():
    assert least_irreducible(3, 1) == (0, 1)
    assert least_irreducible(3, 2) == (1, 0, 1)


def test_describe(cubic_ctx):
    info = cubic_ctx.describe()
    assert info["p"] == 3 and info["r"] == 3
    assert info["working_precision"] == cubic_ctx.prec
    assert len(info["modulus_polynomial"]) == 4
    assert info["modulus_polynomial"][-1] == 1


@given(coords, coords)
def test_frobenius_is_a_ring_homomorphism(a, b):
    x, y = CUBIC.element(a), CUBIC.element(b)
    assert (x * y).frobenius() == x.frobenius() * y.frobenius()
    assert (x + y).frobenius() == x.frobenius() + y.frobenius()


@given(coords)
def test_frobenius_has_order_r(a):
    x = CUBIC.element(a)
    image = x
    for _ in range(CUBIC.r):
        image = image.frobenius()
    assert image == x


@given(coords)
def test_frobenius_lifts_the_p_power_map(a):
    x = np.asarray(a, dtype=CUBIC.dtype)
    assert np.array_equal(CUBIC.frobenius_coords(x) % 3, CUBIC.power(x, 3) % 3)


@given(coords.filter(lambda c: any(v % 3 for v in c)))
def test_unit_inverse(a):
    x = CUBIC.element(a)
    assert x * x.inverse() == CUBIC.element(1)


def test_inverse_of_non_unit_raises(cubic_ctx):
    with pytest.raises(ArithmeticError):
        cubic_ctx.element(9).inverse()


def test_valuation(cubic_ctx):
    assert cubic_ctx.element(18).valuation() == 2
    assert cubic_ctx.element([3, 9, 6]).valuation() == 1
    assert cubic_ctx.element(0).valuation() == math.inf


def test_generator_frobenius_is_cube_mod_p(cubic_ctx):
    x = cubic_ctx.generator()
    assert x.frobenius() != x
    assert np.array_equal(x.frobenius().coords % 3, (x * x * x).coords % 3)


def test_random_coords_are_reduced(cubic_ctx):
    sample = cubic_ctx.random_coords(np.random.default_rng(0), (4, 2))
    assert sample.shape == (4, 2, 3)
    assert np.all(sample % cubic_ctx.modulus == sample)


def test_element_rejects_wrong_length(cubic_ctx):
    with pytest.raises(InputError):
        cubic_ctx.element([1, 2])


def test_p_power_moves_into_denominator(point_ctx):
    three = RingMatrix.from_ints(point_ctx, [[3]])
    assert three.p_power(-1) == RingMatrix.identity(point_ctx, 1)
    assert RingMatrix.identity(point_ctx, 1).p_power(-2).valuation() == -2


def test_multiplying_by_p_cancels_the_denominator_exactly(point_ctx):
    x = RingMatrix.from_ints(point_ctx, [[3 ** (point_ctx.prec - 1) + 1]])
    back = x.p_power(-1) * 3
    assert back == x
    assert back.lost == 0
    assert x.p_power(-2).p_power(1).denom == 1


def test_cancelled_digits_are_not_compared(point_ctx):
    one = RingMatrix.identity(point_ctx, 1)
    half = RingMatrix.scalar(point_ctx, pow(2, -1, point_ctx.modulus))
    stored = (half * 3).p_power(-1)
    assert stored.denom == 0
    assert stored.lost == 1
    assert stored == half
    assert stored * 2 == one
    assert stored != one
    assert (stored * 2 - one).is_zero()


def test_divide_by_p_keeps_integrality(point_ctx):
    assert RingMatrix.from_ints(point_ctx, [[9]]).divide_by_p(2) == RingMatrix.identity(point_ctx, 1)
    with pytest.raises(IntegralityError):
        RingMatrix.from_ints(point_ctx, [[2]]).divide_by_p()


def test_check_budget(point_ctx):
    a = RingMatrix.identity(point_ctx, 1).p_power(-3)
    assert a.check_budget(3) is a
    with pytest.raises(DenominatorBudgetError):
        a.check_budget(2)


def test_series_arithmetic(point_ctx):
    one_plus_t = TruncatedSeries.from_terms(point_ctx, [1, 1])
    one_minus_t = TruncatedSeries.from_terms(point_ctx, [1, -1])
    assert one_plus_t * one_minus_t == TruncatedSeries.from_terms(point_ctx, [1, 0, -1])
    assert TruncatedSeries.monomial(point_ctx, 1, 3).derivative() == TruncatedSeries.monomial(point_ctx, 3, 2)


def test_series_frobenius_raises_t_to_p(point_ctx):
    t = TruncatedSeries.monomial(point_ctx, 1, 1)
    assert t.frobenius() == TruncatedSeries.monomial(point_ctx, 1, 3)
    assert t.frobenius(2).gauss_valuation() == math.inf


def test_gauss_valuation(point_ctx):
    f = TruncatedSeries.from_terms(point_ctx, [9, 3, 27])
    assert f.gauss_valuation() == 1
    assert f.truncate(1).gauss_valuation() == 2


def test_json_rebuilds_matrix(cubic_ctx):
    a = RingMatrix.random(cubic_ctx, 2, 3, np.random.default_rng(5), (4,)).p_power(-1)
    assert RingMatrix.from_json(cubic_ctx, a.to_json()) == a


def test_exit_codes():
    assert exit_code_for(InputError("x")) == EXIT_INPUT
    assert exit_code_for(ValueError("x")) == EXIT_INPUT
    assert exit_code_for(DenominatorBudgetError("x")) == EXIT_PRECISION
    assert exit_code_for(LadderStuckError("x")) == EXIT_VERIFICATION
