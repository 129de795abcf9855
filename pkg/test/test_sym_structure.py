from fractions import Fraction

import numpy as np
import pytest
from pydantic import ValidationError

from sym_workbench.arithmetic.ring import RingParams, make_ring
from sym_workbench.arithmetic.series import RingMatrix
from sym_workbench.errors import InputError
from sym_workbench.semilinear.slopes import SlopeMultiset
from sym_workbench.structures.sym_structure import (
    SymSpec,
    build_sym,
    choose_parameters,
    sym_power_rep,
    verify_sym,
)

from conftest import RUNNING_SPEC


def test_running_parameters():
    spec = choose_parameters(RUNNING_SPEC)
    assert spec.n == 2
    assert spec.twist_slopes == [1]
    assert spec.f == [[1, 0]]
    assert spec.quotas() == [3, 1]
    assert spec.sigma == [0, 4]
    assert spec.omega == [0, 1, 2, 4]
    assert spec.slope_pair == (Fraction(1), Fraction(1))


def test_spec_serializes_fractions():
    payload = choose_parameters(RUNNING_SPEC).model_dump(mode="json")
    assert payload["a"] == "2"
    assert payload["slope_pair"] == ["1", "1"]
    assert SymSpec.model_validate(payload).is_complete


@pytest.mark.parametrize("b, z, a, r", [
    ([1], 2, 2, 4),
    ([3], 2, 2, 20),
    ([1], 2, "3/2", 5),
    ([1], 1, 1, 5),
    ([0], 3, 1, 2),
])
def test_infeasible_specs(b, z, a, r):
    with pytest.raises(InputError):
        choose_parameters(SymSpec(b=b, z=z, a=a, r=r))


@pytest.mark.parametrize("payload", [
    {"b": [1], "z": 2, "a": 0, "r": 5},
    {"b": [-1], "z": 2, "a": 2, "r": 5},
    {"b": [1], "z": 2, "a": "1/3", "r": 5},
    {"b": [], "z": 2, "a": 2, "r": 5},
])
def test_invalid_spec_values(payload):
    with pytest.raises(ValidationError):
        SymSpec.model_validate(payload)


def test_overrides_are_validated():
    with pytest.raises(InputError):
        choose_parameters(RUNNING_SPEC.model_copy(update={"slope_pair": (Fraction(1), Fraction(2))}))
    with pytest.raises(InputError):
        choose_parameters(RUNNING_SPEC.model_copy(update={"omega": [0, 1, 2, 3]}))
    with pytest.raises(InputError):
        choose_parameters(RUNNING_SPEC.model_copy(update={"f": [[2, 0]]}))


def test_running_structure(running_structure):
    report = verify_sym(running_structure)
    assert report.passed
    assert report.ranks_M == [2] * 5
    assert report.dims_N == [1, 2, 2, 2, 1]
    assert report.dims_M == [1, 1, 1, 2, 1]
    assert report.slopes_N == SlopeMultiset.of(1, 1)
    assert report.slopes_M == SlopeMultiset.of(2, 2)
    assert len(running_structure.ladder_trace) == 4


def test_rank_one_structure():
    ctx = make_ring(RingParams(p=3, r=3, N=5, T=6))
    spec = SymSpec(b=[0], z=2, a=1, r=3)
    structure = build_sym(spec, ctx)
    assert structure.spec.quotas() == [1, 0]
    assert structure.spec.sigma == [0, 1]
    assert structure.spec.omega == [0]
    report = verify_sym(structure)
    assert report.passed
    assert report.ranks_M == [1, 1, 1]
    assert report.slopes_M == SlopeMultiset.of(1)


def test_split_slope_pair(running_ctx):
    structure = build_sym(RUNNING_SPEC.model_copy(update={"slope_pair": (Fraction(0), Fraction(2))}), running_ctx)
    assert structure.expected_slopes() == SlopeMultiset.of(1, 3)
    report = verify_sym(structure)
    assert report.slopes_N == SlopeMultiset.of(0, 2)
    assert report.passed


def test_random_raise_order(running_ctx):
    spec = RUNNING_SPEC.model_copy(update={"raise_order": "random", "raise_seed": 7})
    assert verify_sym(build_sym(spec, running_ctx)).passed


def test_ring_must_match_spec(cubic_ctx):
    with pytest.raises(InputError):
        build_sym(RUNNING_SPEC, cubic_ctx)


def test_sym_power_rep_is_multiplicative(running_structure, running_ctx):
    rng = np.random.default_rng(3)
    g = RingMatrix.random(running_ctx, 2, 2, rng)
    h = RingMatrix.random(running_ctx, 2, 2, rng)
    product = sym_power_rep(g @ h, running_structure)
    assert product.congruent(sym_power_rep(g, running_structure) @ sym_power_rep(h, running_structure), running_ctx.N)
    scalar = RingMatrix.identity(running_ctx, 2) * 2
    assert sym_power_rep(scalar, running_structure) == scalar
