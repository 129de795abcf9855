"""
Tensor, exterior, symmetric powers and duals of matrices and of graded
semilinear operators.

Basis orders:
    tensor: pairs (i, j) in lexicographic order, index i * n2 + j
    wedge:  k-subsets of range(n) in lexicographic order
    sym:    exponent vectors summing to k in descending lexicographic order,
            so that for rank 2 the monomial x'^b x''^(k-b) sits at index k - b
"""
import itertools
from functools import lru_cache
from typing import Sequence

import numpy as np

from sym_workbench.arithmetic import linalg
from sym_workbench.arithmetic.ring import RANK_CAP
from sym_workbench.arithmetic.series import RingMatrix
from sym_workbench.errors import InputError
from sym_workbench.semilinear.graded_module import SigmaLinearMap


@lru_cache(maxsize=None)
def wedge_basis(n: int, k: int) -> tuple[tuple[int, ...], ...]:
    return tuple(itertools.combinations(range(n), k))


@lru_cache(maxsize=None)
def sym_basis(n: int, k: int) -> tuple[tuple[int, ...], ...]:
    exponents = [e for e in itertools.product(range(k + 1), repeat=n) if sum(e) == k]
    return tuple(sorted(exponents, reverse=True))


def _check_cap(rank: int, cap: int, what: str) -> None:
    if rank > cap:
        raise InputError(f"{what} has rank {rank}, above the configured cap {cap}")


def _assemble(rows: Sequence[Sequence[RingMatrix]]) -> RingMatrix:
    return RingMatrix.vstack([RingMatrix.hstack(list(row)) for row in rows])


def _nonzero(a: RingMatrix) -> list[list[bool]]:
    return [[bool(np.any(a.data[i, j] != 0)) for j in range(a.cols)] for i in range(a.rows)]


def kron(a: RingMatrix, b: RingMatrix) -> RingMatrix:
    """Kronecker product: block (i, j) is a_ij * b."""
    return _assemble([[b.series_scale(a.entry(i, j)) for j in range(a.cols)] for i in range(a.rows)])


def wedge_matrix(a: RingMatrix, k: int) -> RingMatrix:
    """Matrix of the k-th exterior power: entry (I, J) is the minor det a[I, J]."""
    if k == 0:
        return RingMatrix.scalar(a.ctx, 1, a.tshape)
    rows = wedge_basis(a.rows, k)
    cols = wedge_basis(a.cols, k)
    if not rows or not cols:
        return RingMatrix.zeros(a.ctx, len(rows), len(cols), a.tshape)
    return _assemble([[linalg.determinant(a.take(I, J)) for J in cols] for I in rows])


def sym_matrix(a: RingMatrix, k: int) -> RingMatrix:
    """
    Matrix of the k-th symmetric power: column alpha holds the coefficients of
    prod_j (sum_i a_ij y_i)^alpha_j on the output monomials.
    """
    ctx = a.ctx
    if k == 0:
        return RingMatrix.scalar(ctx, 1, a.tshape)
    out_basis = sym_basis(a.rows, k)
    in_basis = sym_basis(a.cols, k)
    position = {e: index for index, e in enumerate(out_basis)}
    zero = RingMatrix.zeros(ctx, 1, 1, a.tshape)
    entries = [[a.entry(i, j) for j in range(a.cols)] for i in range(a.rows)]
    nonzero = _nonzero(a)
    columns = []
    for alpha in in_basis:
        poly: dict[tuple[int, ...], RingMatrix] = {(0,) * a.rows: RingMatrix.scalar(ctx, 1, a.tshape)}
        for j, power in enumerate(alpha):
            for _ in range(power):
                expanded: dict[tuple[int, ...], RingMatrix] = {}
                for exps, coeff in poly.items():
                    for i in range(a.rows):
                        if not nonzero[i][j]:
                            continue
                        key = exps[:i] + (exps[i] + 1,) + exps[i + 1:]
                        term = coeff @ entries[i][j]
                        expanded[key] = expanded[key] + term if key in expanded else term
                poly = expanded
        column = [zero] * len(out_basis)
        for exps, coeff in poly.items():
            column[position[exps]] = coeff
        columns.append(column)
    return _assemble([[columns[c][row] for c in range(len(in_basis))] for row in range(len(out_basis))])


def dual_matrix(a: RingMatrix) -> RingMatrix:
    """(a^{-1})^T, the matrix of the contragredient map."""
    return linalg.invert(a).T


def tensor(phi1: SigmaLinearMap, phi2: SigmaLinearMap, cap: int = RANK_CAP) -> SigmaLinearMap:
    for sigma in range(phi1.r):
        _check_cap(phi1.rank(sigma) * phi2.rank(sigma), cap, "tensor product")
    return SigmaLinearMap([kron(phi1[sigma], phi2[sigma]) for sigma in range(phi1.r)])


def wedge_power(phi: SigmaLinearMap, k: int, cap: int = RANK_CAP) -> SigmaLinearMap:
    if k < 0:
        raise InputError(f"exterior power index must be non-negative, got {k}")
    for sigma in range(phi.r):
        _check_cap(len(wedge_basis(phi.rank(sigma), k)), cap, f"exterior power {k}")
    return SigmaLinearMap([wedge_matrix(phi[sigma], k) for sigma in range(phi.r)])


def sym_power(phi: SigmaLinearMap, k: int, cap: int = RANK_CAP) -> SigmaLinearMap:
    if k < 0:
        raise InputError(f"symmetric power index must be non-negative, got {k}")
    for sigma in range(phi.r):
        _check_cap(len(sym_basis(phi.rank(sigma), k)), cap, f"symmetric power {k}")
    return SigmaLinearMap([sym_matrix(phi[sigma], k) for sigma in range(phi.r)])


def dual(phi: SigmaLinearMap) -> SigmaLinearMap:
    """
    Dual isocrystal: phi^v(f) = tau o f o phi^{-1}; entries acquire p-denominators.
    """
    return SigmaLinearMap([dual_matrix(phi[sigma]) for sigma in range(phi.r)])
