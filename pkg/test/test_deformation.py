from fractions import Fraction

import pytest

from sym_workbench.arithmetic.ring import RingParams, make_ring, required_denominator_budget
from sym_workbench.arithmetic.series import RingMatrix
from sym_workbench.errors import InputError
from sym_workbench.semilinear.graded_module import SigmaLinearMap
from sym_workbench.semilinear.slopes import SlopeMultiset
from sym_workbench.structures.deformation import (
    Alternative,
    check_suff,
    deform_M,
    deform_N,
    deformation_operators,
    drop_exponent,
    drop_exponents,
    enumerate_deformation_sequences,
    expected_generic_slopes,
    find_deformation_sequence,
    generic_truncations,
    in_m1,
    sequence_problems,
)
from sym_workbench.structures.sym_structure import SymSpec, build_sym, choose_parameters
from sym_workbench.windows import CheckStatus, Frame, verify_window, window_from_dieudonne

from conftest import RUNNING_SPEC


@pytest.fixture(scope="module")
def split_structure(running_ctx):
    return build_sym(RUNNING_SPEC.model_copy(update={"slope_pair": (Fraction(0), Fraction(2))}), running_ctx)


def test_running_sequence(running_structure, running_sequence):
    assert running_sequence.drops == {0, 4}
    assert running_sequence.alt[1] == Alternative.CONGRUENT
    assert sequence_problems(running_structure.N, running_sequence) == []
    assert running_sequence.to_json()["alt"][0] == "drops_to_m1"
    for sigma, e in enumerate(running_sequence.e):
        assert not in_m1(running_structure.N, sigma, e)


def test_sequence_from_another_start(running_structure):
    seq = find_deformation_sequence(running_structure.N, start=2)
    assert seq.seed[0] == 2
    assert sequence_problems(running_structure.N, seq) == []


def test_enumerated_sequences_are_valid(running_structure):
    found = enumerate_deformation_sequences(running_structure.N, limit=4)
    assert 1 <= len(found) <= 4
    for seq in found:
        assert sequence_problems(running_structure.N, seq) == []


def test_zero_slope_needs_explicit_permission(split_structure):
    with pytest.raises(InputError):
        find_deformation_sequence(split_structure.N)
    seq = find_deformation_sequence(split_structure.N, require_nonzero_slopes=False)
    assert seq.drops == set()
    assert all(a == Alternative.CONGRUENT for a in seq.alt)


def test_sequences_need_rank_two(point_ctx):
    line = window_from_dieudonne(SigmaLinearMap.from_ints(point_ctx, [[[3]]]))
    with pytest.raises(InputError):
        find_deformation_sequence(line)


def test_sequences_need_point_frame(running_deformation):
    with pytest.raises(InputError):
        find_deformation_sequence(running_deformation[0].window)


def test_deformation_operators(running_structure, running_sequence, running_ctx):
    u = deformation_operators(running_structure.N, running_sequence, running_ctx.T)
    identity = RingMatrix.identity(running_ctx, 2, (running_ctx.T,))
    assert u[1] == identity
    assert u[0] != identity
    assert u[0].at_zero() == RingMatrix.identity(running_ctx, 2)


def test_deformed_windows(running_deformation, running_ctx):
    N_def, M_def = running_deformation
    assert N_def.window.frame == Frame.SERIES
    assert N_def.truncation == running_ctx.T
    assert N_def.specializes() and M_def.specializes()
    assert verify_window(N_def.window).passed


def test_sufficient_deformation(running_structure, running_deformation):
    N_def, M_def = running_deformation
    report = check_suff(N_def, M_def, running_structure)
    assert report.passed
    assert report.drops == [0, 4]
    assert report.check("ordinary_degree").witness == {"degrees": [3]}
    assert report.special_slopes_N == SlopeMultiset.of(1, 1)
    assert report.special_slopes_M == SlopeMultiset.of(2, 2)
    assert report.generic_slopes_N == SlopeMultiset.of(0, 2)
    assert report.generic_slopes_M == SlopeMultiset.of(1, 3)
    assert report.certified_truncation == 2 * N_def.truncation


def test_uncertified_slopes(running_structure, running_deformation):
    N_def, M_def = running_deformation
    report = check_suff(N_def, M_def, running_structure, certify=False)
    assert report.certified_truncation is None
    assert report.check("generic_M").passed


def test_expected_generic_slopes(running_structure):
    assert expected_generic_slopes(running_structure) == SlopeMultiset.of(1, 3)


def test_truncation_override(running_structure, running_sequence):
    assert deform_N(running_structure.N, running_sequence, 5).truncation == 5


def test_drop_exponents(running_sequence, running_structure):
    assert drop_exponents(running_sequence, 3) == [4, 12, 36, 108, 82]
    assert drop_exponent(running_sequence, 3) == 4
    assert generic_truncations(running_sequence, running_structure) == (5, 5)


def test_generic_slopes_beyond_the_truncation_limit(running_structure, running_deformation):
    N_def, M_def = running_deformation
    report = check_suff(N_def, M_def, running_structure, max_truncation=4)
    check = report.check("generic_N")
    assert check.status == CheckStatus.PRECISION
    assert check.witness == {"required_truncation": 5, "limit": 4}
    assert report.generic_slopes_N is None
    assert report.calculate_status() == CheckStatus.PRECISION


LIMIT = 32


@pytest.mark.parametrize("p", [3, 5])
@pytest.mark.parametrize("r", [4, 5, 6, 7, 8])
def test_rank_one_generic_slopes(p, r):
    T = 6
    ctx = make_ring(RingParams(p=p, r=r, N=5, T=T, D=required_denominator_budget(p, T)))
    structure = build_sym(choose_parameters(SymSpec(b=[0], z=2, a=1, r=r)), ctx)
    sequence = find_deformation_sequence(structure.N)
    N_def, M_def = deform_N(structure.N, sequence), deform_M(structure, sequence)
    report = check_suff(N_def, M_def, structure, max_truncation=LIMIT)
    assert report.required_truncation == drop_exponent(sequence, p) + 1
    check = report.check("generic_N")
    if report.required_truncation > LIMIT:
        assert check.status == CheckStatus.PRECISION
    else:
        assert check.status in (CheckStatus.PASS, CheckStatus.PRECISION)
    if check.status == CheckStatus.PASS:
        assert report.generic_slopes_N == SlopeMultiset.of(0, 2)
    assert report.check("generic_M").status != CheckStatus.FAIL
