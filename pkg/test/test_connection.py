import numpy as np
import pytest

from sym_workbench.arithmetic.series import RingMatrix
from sym_workbench.errors import NonConvergenceError
from sym_workbench.structures.connection import (
    Connection,
    iteration_bound,
    residual,
    solve_connection,
    verify_connection,
)

from conftest import trivial_deformation


def test_connection_of_deformed_N(running_deformation, running_connections, running_ctx):
    N_def, _ = running_deformation
    C_N, _ = running_connections
    assert C_N.r == 5
    assert all(c.is_integral for c in C_N.matrices)
    for sigma in range(5):
        assert residual(N_def, C_N, sigma).is_zero(running_ctx.N)
    assert 1 <= C_N.iterations <= iteration_bound(N_def)


@pytest.mark.parametrize("index", [0, 1])
def test_verify_connection(running_deformation, running_connections, index):
    report = verify_connection(running_deformation[index], running_connections[index], np.random.default_rng(1))
    assert report.passed
    assert [c.name for c in report.checks] == ["compatibility", "integral", "nilpotent", "leibniz", "seed_independent"]


def test_connection_does_not_depend_on_seed(running_deformation, running_connections, running_ctx):
    N_def, _ = running_deformation
    seed = [RingMatrix.identity(running_ctx, 2, (running_ctx.T,)) * 7 for _ in range(5)]
    other = solve_connection(N_def, seed=seed)
    for a, b in zip(other.matrices, running_connections[0].matrices):
        assert a.congruent(b, running_ctx.N)


def test_iteration_cap(running_deformation):
    with pytest.raises(NonConvergenceError):
        solve_connection(running_deformation[0], max_iterations=1)


def test_trivial_deformation_has_zero_connection(running_structure, running_ctx):
    connection = solve_connection(trivial_deformation(running_structure.N))
    assert connection.iterations == 1
    assert all(c.is_zero() for c in connection.matrices)
    column = RingMatrix.random(running_ctx, 2, 1, np.random.default_rng(2), (running_ctx.T,))
    assert connection.apply(0, column) == column.derivative()


def test_connection_json(running_connections):
    payload = running_connections[0].to_json()
    assert len(payload["matrices"]) == 5
    assert payload["iterations"] == running_connections[0].iterations
    assert all(v is None or v >= 0 for v in payload["residual_valuations"])


def test_power_matrices_start_at_identity(running_connections, running_ctx):
    powers = running_connections[0].power_matrices(0, 3)
    assert len(powers) == 4
    assert powers[0] == RingMatrix.identity(running_ctx, 2, (running_ctx.T,))
    assert powers[1] == running_connections[0][0]
    assert isinstance(running_connections[0], Connection)
