from fractions import Fraction

import pytest

from sym_workbench.arithmetic.series import RingMatrix
from sym_workbench.errors import DenominatorBudgetError, NotIsoclinalError
from sym_workbench.structures.connection import solve_connection
from sym_workbench.structures.dwork import (
    check_velf,
    cocycle_holds,
    dwork_theta,
    nontriviality_check,
    pi_theta,
    taylor_series,
    verify_dwork,
)
from sym_workbench.structures.sym_structure import build_sym
from sym_workbench.windows import CheckStatus

from conftest import RUNNING_SPEC, trivial_deformation


@pytest.fixture(scope="module")
def running_dwork(running_deformation, running_connections):
    (N_def, M_def), (C_N, C_M) = running_deformation, running_connections
    return dwork_theta(N_def, C_N), dwork_theta(M_def, C_M)


def test_taylor_series_divides_by_factorials(point_ctx):
    one = RingMatrix.scalar(point_ctx, 1)
    exp_t = taylor_series([one] * 4, 4)
    assert exp_t.denom == 1
    assert exp_t.coefficient((3,)).valuation() == -1
    assert exp_t.coefficient((2,)) * 2 == one


@pytest.mark.parametrize("index", [0, 1])
def test_verify_dwork(running_deformation, running_connections, running_dwork, index):
    report = verify_dwork(running_deformation[index], running_connections[index], running_dwork[index])
    assert report.passed
    assert report.check("horizontal").passed
    assert report.check("equivariant").passed
    assert report.denominator <= running_deformation[index].window.ctx.D


def test_theta_is_a_cocycle(running_dwork, running_ctx):
    assert cocycle_holds(running_dwork[0], running_ctx.N - running_ctx.D)


def test_descent_data_are_compatible(running_dwork, running_structure):
    theta_N, theta_M = running_dwork
    report = check_velf(theta_N, theta_M, running_structure)
    assert report.det_ok
    assert report.pi_theta_ok
    assert report.check("det_theta_N").passed and report.check("pi_theta").passed
    expected = CheckStatus.PASS if report.witnesses else CheckStatus.UNKNOWN
    assert report.check("theta_nontrivial").status == expected
    image = pi_theta(theta_N.theta, running_structure)
    assert image.rows == theta_M.theta.rows == 2


def test_budget_is_enforced(running_deformation, running_connections):
    with pytest.raises(DenominatorBudgetError):
        dwork_theta(running_deformation[0], running_connections[0], budget=1)


def test_trivial_deformation_has_trivial_theta(running_structure, running_ctx):
    deformed = trivial_deformation(running_structure.N)
    data = dwork_theta(deformed, solve_connection(deformed))
    T = running_ctx.T
    assert data.Theta == RingMatrix.identity(running_ctx, 2, (T,))
    assert data.theta == RingMatrix.identity(running_ctx, 2, (T, T))
    assert data.denominator == 0


def test_split_special_fibre_has_no_theta(running_ctx):
    structure = build_sym(RUNNING_SPEC.model_copy(update={"slope_pair": (Fraction(0), Fraction(2))}), running_ctx)
    deformed = trivial_deformation(structure.N)
    with pytest.raises(NotIsoclinalError):
        dwork_theta(deformed, solve_connection(deformed))


def test_dwork_json(running_dwork):
    payload = running_dwork[0].to_json()
    assert payload["degree"] == 0
    assert payload["skeleton"]["z"] == 1
    assert payload["theta"]["tshape"] == [9, 9]


def test_nontriviality_needs_a_witness():
    pair = {"first": [0, 1], "second": [1, 0], "valuation": 0}
    assert nontriviality_check(True, []).status == CheckStatus.SKIPPED
    unknown = nontriviality_check(False, [])
    assert unknown.status == CheckStatus.UNKNOWN
    assert "commute" in unknown.detail
    found = nontriviality_check(False, [pair])
    assert found.status == CheckStatus.PASS
    assert found.witness == {"pairs": [pair]}
