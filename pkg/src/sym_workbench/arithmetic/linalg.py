"""
Exact linear algebra over Z_q / p^prec and over truncated series rings.
"""
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from sym_workbench.arithmetic.ring import RingContext
from sym_workbench.arithmetic.series import RingMatrix
from sym_workbench.errors import InputError, SingularMatrixError


def _is_zero(coords: np.ndarray) -> bool:
    return not np.any(np.asarray(coords) != 0)


def _divide_coords(ctx: RingContext, coords: np.ndarray, k: int) -> np.ndarray:
    """Exact division of a Z_q element by p^k (the element must be divisible)."""
    return np.asarray(coords) // ctx.p ** k


def trace(a: RingMatrix) -> RingMatrix:
    if not a.is_square:
        raise InputError(f"trace of non-square {a.shape} matrix")
    total = RingMatrix.zeros(a.ctx, 1, 1, a.tshape)
    for i in range(a.rows):
        total = total + a.entry(i, i)
    return total


def point_inverse(a: RingMatrix) -> RingMatrix:
    """
    Gauss-Jordan inverse of a constant integral matrix that is invertible mod p.
    """
    ctx = a.ctx
    if a.nvars:
        raise InputError("point_inverse expects a constant matrix")
    if not a.is_square:
        raise InputError(f"cannot invert a {a.shape} matrix")
    q = ctx.modulus
    n = a.rows
    work = a.data.copy()
    inv = RingMatrix.identity(ctx, n).data.copy()
    for col in range(n):
        pivot = next((row for row in range(col, n) if ctx.is_unit(work[row, col])), None)
        if pivot is None:
            raise SingularMatrixError(f"matrix is not invertible mod p (column {col})")
        if pivot != col:
            work[[col, pivot]] = work[[pivot, col]]
            inv[[col, pivot]] = inv[[pivot, col]]
        scale = ctx.inverse(work[col, col])
        work[col] = ctx.mul(work[col], scale)
        inv[col] = ctx.mul(inv[col], scale)
        for row in range(n):
            if row == col or _is_zero(work[row, col]):
                continue
            factor = work[row, col].copy()
            work[row] = (work[row] - ctx.mul(factor, work[col])) % q
            inv[row] = (inv[row] - ctx.mul(factor, inv[col])) % q
    return RingMatrix(ctx, inv)


def inverse(a: RingMatrix) -> RingMatrix:
    """
    Inverse of a square matrix whose constant term is invertible mod p.

    Series matrices are inverted by Newton iteration X <- X(2 - AX) starting
    from the inverse of the constant term; the t-adic error order doubles each step.
    """
    integral = RingMatrix(a.ctx, a.data)
    inv = point_inverse(integral.at_zero())
    if a.nvars:
        inv = inv.lift(a.tshape)
        identity = RingMatrix.identity(a.ctx, a.rows, a.tshape)
        for _ in range(max(a.tshape).bit_length() + 2):
            inv = inv @ (identity * 2 - integral @ inv)
    return inv.p_power(a.denom)


def invert(a: RingMatrix) -> RingMatrix:
    """
    Inverse over the fraction field for constant matrices, over the series
    ring for matrices whose constant term is invertible.
    """
    if a.nvars:
        return inverse(a)
    return quasi_inverse(a)


def is_invertible(a: RingMatrix) -> bool:
    """Invertible over the (series) ring: integral with unit determinant mod p."""
    if a.denom or not a.is_square:
        return False
    return a.ctx.is_unit(determinant(a.at_zero()).data[0, 0])


def determinant(a: RingMatrix) -> RingMatrix:
    """
    Determinant by Laplace expansion along rows with memoised minors.
    """
    if not a.is_square:
        raise InputError(f"determinant of non-square {a.shape} matrix")
    ctx = a.ctx
    n = a.rows
    integral = RingMatrix(ctx, a.data)
    entries = [[integral.entry(i, j) for j in range(n)] for i in range(n)]
    nonzero = [[not _is_zero(integral.data[i, j]) for j in range(n)] for i in range(n)]
    one = RingMatrix.scalar(ctx, 1, a.tshape)
    zero = RingMatrix.zeros(ctx, 1, 1, a.tshape)
    memo: dict[tuple, RingMatrix] = {}

    def minor(row: int, columns: tuple) -> RingMatrix:
        if row == n:
            return one
        key = (row, columns)
        if key in memo:
            return memo[key]
        total = zero
        for position, col in enumerate(columns):
            if not nonzero[row][col]:
                continue
            rest = columns[:position] + columns[position + 1:]
            term = entries[row][col] @ minor(row + 1, rest)
            total = total + term if position % 2 == 0 else total - term
        memo[key] = total
        return total

    return minor(0, tuple(range(n))).p_power(-n * a.denom)


def charpoly(a: RingMatrix) -> list[RingMatrix]:
    """
    Characteristic polynomial det(X - A) by Faddeev-LeVerrier.

    Returns:
        coefficients c_0, ..., c_n as 1x1 matrices, c_n = 1
    """
    if not a.is_square:
        raise InputError(f"characteristic polynomial of non-square {a.shape} matrix")
    ctx = a.ctx
    n = a.rows
    identity = RingMatrix.identity(ctx, n, a.tshape)
    coeffs: list[Optional[RingMatrix]] = [None] * (n + 1)
    coeffs[n] = RingMatrix.scalar(ctx, 1, a.tshape)
    current = identity
    for k in range(1, n + 1):
        product = a @ current
        v = 0
        unit = k
        while unit % ctx.p == 0:
            unit //= ctx.p
            v += 1
        unit_inverse = pow(unit, -1, ctx.modulus)
        coeff = (-(trace(product) * unit_inverse)).p_power(-v)
        coeffs[n - k] = coeff
        current = product + identity.series_scale(coeff)
    return coeffs


@dataclass
class SmithForm:
    """
    left @ A @ right = diag(diagonal), with left, right invertible over Z_q.
    """
    left: RingMatrix
    right: RingMatrix
    diagonal: list[np.ndarray]
    valuations: list[float]

    def rank(self, threshold: int) -> int:
        return sum(1 for v in self.valuations if v < threshold)


def smith_form(a: RingMatrix) -> SmithForm:
    """
    Smith normal form of a constant integral matrix, pivoting on the entry of
    least valuation (lowest indices first among ties).
    """
    ctx = a.ctx
    if a.nvars or a.denom:
        raise InputError("smith_form expects a constant integral matrix")
    q = ctx.modulus
    m, n = a.shape
    work = a.data.copy()
    left = RingMatrix.identity(ctx, m).data.copy()
    right = RingMatrix.identity(ctx, n).data.copy()
    diagonal: list[np.ndarray] = []
    valuations: list[float] = []
    for k in range(min(m, n)):
        best, position = math.inf, None
        for i in range(k, m):
            for j in range(k, n):
                v = ctx.valuation_coords(work[i, j])
                if v < best:
                    best, position = v, (i, j)
        if position is None:
            for rest in range(k, min(m, n)):
                diagonal.append(ctx.zero_coords())
                valuations.append(math.inf)
            break
        i, j = position
        if i != k:
            work[[k, i]] = work[[i, k]]
            left[[k, i]] = left[[i, k]]
        if j != k:
            work[:, [k, j]] = work[:, [j, k]]
            right[:, [k, j]] = right[:, [j, k]]
        v = int(best)
        unit_inverse = ctx.inverse(_divide_coords(ctx, work[k, k], v))
        for row in range(k + 1, m):
            if _is_zero(work[row, k]):
                continue
            factor = ctx.mul(_divide_coords(ctx, work[row, k], v), unit_inverse)
            work[row] = (work[row] - ctx.mul(factor, work[k])) % q
            left[row] = (left[row] - ctx.mul(factor, left[k])) % q
        for col in range(k + 1, n):
            if _is_zero(work[k, col]):
                continue
            factor = ctx.mul(_divide_coords(ctx, work[k, col], v), unit_inverse)
            work[:, col] = (work[:, col] - ctx.mul(factor, work[:, k])) % q
            right[:, col] = (right[:, col] - ctx.mul(factor, right[:, k])) % q
        diagonal.append(work[k, k].copy())
        valuations.append(best)
    return SmithForm(RingMatrix(ctx, left), RingMatrix(ctx, right), diagonal, valuations)


def kernel_basis(a: RingMatrix, threshold: int) -> RingMatrix:
    """
    Columns spanning the solutions of A x = 0 where Smith entries of
    valuation >= threshold count as zero.
    """
    form = smith_form(a)
    m, n = a.shape
    free = [k for k, v in enumerate(form.valuations) if v >= threshold]
    free += list(range(min(m, n), n))
    return form.right.take(cols=free)


def quasi_inverse(a: RingMatrix) -> RingMatrix:
    """
    Inverse over Q_q of a constant square matrix, with a p-power denominator.
    """
    if not a.is_square:
        raise InputError(f"cannot invert a {a.shape} matrix")
    ctx = a.ctx
    integral = RingMatrix(ctx, a.data)
    form = smith_form(integral)
    if any(v >= ctx.prec for v in form.valuations):
        raise SingularMatrixError("matrix is singular at working precision")
    top = int(max(form.valuations, default=0))
    n = a.rows
    scaled = np.zeros((n, n, ctx.r), dtype=ctx.dtype)
    for k, (entry, v) in enumerate(zip(form.diagonal, form.valuations)):
        unit = _divide_coords(ctx, entry, int(v))
        scaled[k, k] = ctx.mul(ctx.inverse(unit), ctx.p ** (top - int(v)) * ctx.one_coords())
    middle = RingMatrix(ctx, scaled, top)
    return (form.right @ middle @ form.left).p_power(a.denom)


def row_echelon(a: RingMatrix) -> tuple[RingMatrix, list[int]]:
    """
    Reduced row echelon form using unit pivots, scanning columns left to
    right and rows top to bottom (lowest-index pivots). Over the residue
    field every non-zero entry is a unit.
    """
    ctx = a.ctx
    if a.nvars or a.denom:
        raise InputError("row_echelon expects a constant integral matrix")
    q = ctx.modulus
    m, n = a.shape
    work = a.data.copy()
    pivots: list[int] = []
    row = 0
    for col in range(n):
        if row == m:
            break
        pivot = next((i for i in range(row, m) if ctx.is_unit(work[i, col])), None)
        if pivot is None:
            continue
        if pivot != row:
            work[[row, pivot]] = work[[pivot, row]]
        work[row] = ctx.mul(work[row], ctx.inverse(work[row, col]))
        for i in range(m):
            if i != row and not _is_zero(work[i, col]):
                factor = work[i, col].copy()
                work[i] = (work[i] - ctx.mul(factor, work[row])) % q
        pivots.append(col)
        row += 1
    return RingMatrix(ctx, work), pivots


def kernel_mod_p(a: RingMatrix) -> RingMatrix:
    """
    Basis (as columns) of the kernel of the reduction of A over F_{p^r},
    one vector per free column of the row echelon form.
    """
    residue = a.mod_p()
    ctx = residue.ctx
    reduced, pivots = row_echelon(residue)
    n = a.cols
    free = [j for j in range(n) if j not in pivots]
    basis = np.zeros((n, len(free), ctx.r), dtype=ctx.dtype)
    for out, j in enumerate(free):
        basis[j, out] = ctx.one_coords()
        for i, col in enumerate(pivots):
            basis[col, out] = (-reduced.data[i, j]) % ctx.modulus
    return RingMatrix(ctx, basis)


def rank_mod_p(a: RingMatrix) -> int:
    _, pivots = row_echelon(a.mod_p())
    return len(pivots)
