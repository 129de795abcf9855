"""
Matrices over Z_q[[t_1, ..., t_m]] / (t_i^T) with one shared p-power denominator.

A RingMatrix stores its coefficients in a numpy array of shape
(rows, cols, *tshape, r): tshape is () for the point frame W(k), (T,) for the
series frame W(k)[[t]] and (T, T) or (T, T, T) for the bivariate and
trivariate rings used by descent data. The value represented is
p^(-denom) * data. The top `lost` p-adic digits of data are unknown: they
were shifted out when a common factor p was cancelled against the
denominator, and comparisons ignore them.
"""
import math
from typing import Iterable, Optional, Sequence

import numpy as np

from sym_workbench.arithmetic.ring import RingContext, UnramifiedElement, modular_tensordot
from sym_workbench.errors import DenominatorBudgetError, InputError, IntegralityError


def _as_residues(ctx: RingContext, data) -> np.ndarray:
    arr = np.asarray(data)
    if arr.dtype == object or ctx.dtype == object:
        return (arr.astype(object) % ctx.modulus).astype(ctx.dtype)
    return arr.astype(ctx.dtype) % ctx.modulus


def min_valuation(data: np.ndarray, p: int, cap: int) -> float:
    """Smallest p-adic valuation among the entries of an integer array (inf if all zero)."""
    if not np.any(data != 0):
        return math.inf
    q = p
    for k in range(cap):
        if np.any(data % q != 0):
            return k
        q *= p
    return cap


def _index(ndim: int, axis: int, key) -> tuple:
    index = [slice(None)] * ndim
    index[axis] = key
    return tuple(index)


class RingMatrix:
    """
    Matrix over a truncated power series ring with coefficients in Z_q.
    """
    __slots__ = ("ctx", "data", "denom", "lost")

    def __init__(self, ctx: RingContext, data: np.ndarray, denom: int = 0, lost: int = 0) -> None:
        self.ctx = ctx
        self.data = _as_residues(ctx, data)
        self.denom = int(denom)
        self.lost = int(lost)
        if self.data.ndim < 3 or self.data.shape[-1] != ctx.r:
            raise InputError(f"coefficient array of shape {self.data.shape} does not end in r={ctx.r}")
        self._normalize()

    def _normalize(self) -> None:
        p = self.ctx.p
        if not np.any(self.data != 0):
            self.denom = 0
            return
        while self.denom > 0 and not np.any(self.data % p != 0):
            self.data = self.data // p
            self.denom -= 1
            self.lost += 1
        if self.denom < 0:
            self.data = (self.data * (p ** (-self.denom) % self.ctx.modulus)) % self.ctx.modulus
            self.lost = max(0, self.lost + self.denom)
            self.denom = 0
        self.lost = min(self.lost, self.ctx.prec)

    @property
    def known_digits(self) -> int:
        """p-adic digits of data that are determined."""
        return self.ctx.prec - self.lost

    # constructors

    @classmethod
    def zeros(cls, ctx: RingContext, rows: int, cols: int, tshape: tuple = ()) -> "RingMatrix":
        return cls(ctx, np.zeros((rows, cols) + tuple(tshape) + (ctx.r,), dtype=ctx.dtype))

    @classmethod
    def identity(cls, ctx: RingContext, n: int, tshape: tuple = ()) -> "RingMatrix":
        data = np.zeros((n, n) + tuple(tshape) + (ctx.r,), dtype=ctx.dtype)
        origin = (0,) * len(tshape)
        for i in range(n):
            data[(i, i) + origin + (0,)] = 1
        return cls(ctx, data)

    @classmethod
    def from_ints(cls, ctx: RingContext, rows: Sequence[Sequence[int]], tshape: tuple = ()) -> "RingMatrix":
        """Matrix with constant integer entries."""
        rows = [list(row) for row in rows]
        n_rows = len(rows)
        n_cols = len(rows[0]) if rows else 0
        data = np.zeros((n_rows, n_cols) + tuple(tshape) + (ctx.r,), dtype=ctx.dtype)
        origin = (0,) * len(tshape)
        for i, row in enumerate(rows):
            if len(row) != n_cols:
                raise InputError("ragged matrix rows")
            for j, value in enumerate(row):
                data[(i, j) + origin + (0,)] = int(value) % ctx.modulus
        return cls(ctx, data)

    @classmethod
    def from_coords(cls, ctx: RingContext, coords: np.ndarray, tshape: tuple = ()) -> "RingMatrix":
        """Constant matrix from a (rows, cols, r) array of Z_q coordinates."""
        coords = np.asarray(coords, dtype=ctx.dtype)
        return cls(ctx, coords).lift(tuple(tshape))

    @classmethod
    def scalar(cls, ctx: RingContext, value: "int | UnramifiedElement", tshape: tuple = ()) -> "RingMatrix":
        if isinstance(value, UnramifiedElement):
            return cls.from_coords(ctx, value.coords.reshape(1, 1, ctx.r), tshape)
        return cls.from_ints(ctx, [[value]], tshape)

    @classmethod
    def random(cls, ctx: RingContext, rows: int, cols: int, rng: np.random.Generator,
               tshape: tuple = ()) -> "RingMatrix":
        return cls(ctx, ctx.random_coords(rng, (rows, cols) + tuple(tshape)))

    @classmethod
    def block_diag(cls, blocks: Sequence["RingMatrix"]) -> "RingMatrix":
        blocks = list(blocks)
        ctx = blocks[0].ctx
        tshape = _common_tshape(blocks)
        denom = max(b.denom for b in blocks)
        rows = sum(b.rows for b in blocks)
        cols = sum(b.cols for b in blocks)
        data = np.zeros((rows, cols) + tshape + (ctx.r,), dtype=ctx.dtype)
        i = j = 0
        for block in blocks:
            lifted = block.lift(tshape)
            data[i:i + block.rows, j:j + block.cols] = lifted.data * (ctx.p ** (denom - block.denom) % ctx.modulus)
            i += block.rows
            j += block.cols
        return cls(ctx, data, denom, max(b.lost for b in blocks))

    @classmethod
    def hstack(cls, blocks: Sequence["RingMatrix"]) -> "RingMatrix":
        return cls._stack(blocks, axis=1)

    @classmethod
    def vstack(cls, blocks: Sequence["RingMatrix"]) -> "RingMatrix":
        return cls._stack(blocks, axis=0)

    @classmethod
    def _stack(cls, blocks: Sequence["RingMatrix"], axis: int) -> "RingMatrix":
        blocks = list(blocks)
        ctx = blocks[0].ctx
        tshape = _common_tshape(blocks)
        denom = max(b.denom for b in blocks)
        parts = [b.lift(tshape).data * (ctx.p ** (denom - b.denom) % ctx.modulus) for b in blocks]
        return cls(ctx, np.concatenate(parts, axis=axis), denom, max(b.lost for b in blocks))

    # shape

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape[0], self.data.shape[1]

    @property
    def tshape(self) -> tuple:
        return tuple(self.data.shape[2:-1])

    @property
    def nvars(self) -> int:
        return len(self.tshape)

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    @property
    def is_integral(self) -> bool:
        return self.denom == 0

    def lift(self, tshape: tuple) -> "RingMatrix":
        """Re-embed into a ring with the given truncation shape."""
        tshape = tuple(tshape)
        if tshape == self.tshape:
            return self
        if self.nvars == 0:
            data = np.zeros(self.shape + tshape + (self.ctx.r,), dtype=self.ctx.dtype)
            data[(slice(None), slice(None)) + (0,) * len(tshape)] = self.data
            return RingMatrix(self.ctx, data, self.denom, self.lost)
        if len(tshape) != self.nvars:
            raise InputError(f"cannot move a {self.nvars}-variable matrix into shape {tshape}")
        data = self.data
        for offset, order in enumerate(tshape):
            axis = 2 + offset
            current = data.shape[axis]
            if order < current:
                data = data[_index(data.ndim, axis, slice(0, order))]
            elif order > current:
                pad = [(0, 0)] * data.ndim
                pad[axis] = (0, order - current)
                data = np.pad(data, pad)
        return RingMatrix(self.ctx, data, self.denom, self.lost)

    def truncate(self, T: int) -> "RingMatrix":
        return self.lift((T,) * self.nvars)

    def with_context(self, ctx: RingContext) -> "RingMatrix":
        """Reinterpret the integer representatives in another precision."""
        return RingMatrix(ctx, np.asarray(self.data, dtype=object), self.denom, self.lost)

    # arithmetic

    def _aligned(self, other: "RingMatrix") -> tuple[np.ndarray, np.ndarray, int, tuple]:
        tshape = _common_tshape([self, other])
        a = self.lift(tshape)
        b = other.lift(tshape)
        denom = max(a.denom, b.denom)
        p = self.ctx.p
        q = self.ctx.modulus
        return a.data * (p ** (denom - a.denom) % q), b.data * (p ** (denom - b.denom) % q), denom, tshape

    def __add__(self, other: "RingMatrix") -> "RingMatrix":
        a, b, denom, _ = self._aligned(other)
        return RingMatrix(self.ctx, a + b, denom, max(self.lost, other.lost))

    def __sub__(self, other: "RingMatrix") -> "RingMatrix":
        a, b, denom, _ = self._aligned(other)
        return RingMatrix(self.ctx, a - b, denom, max(self.lost, other.lost))

    def __neg__(self) -> "RingMatrix":
        return RingMatrix(self.ctx, -self.data, self.denom, self.lost)

    def __mul__(self, scalar: "int | UnramifiedElement") -> "RingMatrix":
        if isinstance(scalar, UnramifiedElement):
            return RingMatrix(self.ctx, self.ctx.mul(self.data, scalar.coords), self.denom, self.lost)
        value = int(scalar) % self.ctx.modulus
        if value == 0:
            return RingMatrix(self.ctx, np.zeros_like(self.data))
        v = 0
        while value % self.ctx.p == 0:
            value //= self.ctx.p
            v += 1
        return RingMatrix(self.ctx, self.data * value, self.denom, self.lost).p_power(v)

    __rmul__ = __mul__

    def __matmul__(self, other: "RingMatrix") -> "RingMatrix":
        if self.cols != other.rows:
            raise InputError(f"shape mismatch {self.shape} @ {other.shape}")
        tshape = _common_tshape([self, other])
        a = self.lift(tshape)
        b = other.lift(tshape)
        return RingMatrix(self.ctx, _product_data(self.ctx, a.data, b.data), a.denom + b.denom, max(a.lost, b.lost))

    def series_scale(self, scalar: "RingMatrix") -> "RingMatrix":
        """Multiply every entry by a 1x1 series."""
        flat = RingMatrix(self.ctx, self.data.reshape((1, self.rows * self.cols) + self.data.shape[2:]),
                          self.denom, self.lost)
        product = scalar @ flat
        return RingMatrix(self.ctx, product.data.reshape(self.shape + product.data.shape[2:]),
                          product.denom, product.lost)

    def p_power(self, k: int) -> "RingMatrix":
        """
        Multiply by p^k (k may be negative; the denominator absorbs it).
        A positive k first cancels against the denominator, which keeps every digit.
        """
        if k >= 0:
            cancelled = min(k, self.denom)
            scale = self.ctx.p ** (k - cancelled) % self.ctx.modulus
            return RingMatrix(self.ctx, self.data * scale, self.denom - cancelled, self.lost)
        return RingMatrix(self.ctx, self.data, self.denom - k, self.lost)

    def divide_by_p(self, k: int = 1, what: str = "matrix") -> "RingMatrix":
        """Exact division of an integral matrix by p^k, staying integral."""
        if self.denom:
            raise IntegralityError(f"{what} carries a denominator p^{self.denom}")
        q = self.ctx.p ** k
        if np.any(self.data % q != 0):
            raise IntegralityError(f"{what} is not divisible by p^{k}")
        return RingMatrix(self.ctx, self.data // q, 0, self.lost + k)

    def frobenius(self, power: int = 1) -> "RingMatrix":
        """tau on coefficients and t -> t^(p^power) in every series variable."""
        data = self.ctx.frobenius_coords(self.data, power)
        step = self.ctx.p ** power
        for axis in range(2, 2 + self.nvars):
            order = data.shape[axis]
            count = (order - 1) // step + 1
            out = np.zeros_like(data)
            out[_index(data.ndim, axis, slice(0, order, step))] = data[_index(data.ndim, axis, slice(0, count))]
            data = out
        return RingMatrix(self.ctx, data, self.denom, self.lost)

    def derivative(self, var: int = 0) -> "RingMatrix":
        axis = 2 + var
        order = self.data.shape[axis]
        out = np.zeros_like(self.data)
        if order > 1:
            weights = np.arange(1, order, dtype=object).astype(self.ctx.dtype)
            shape = [1] * self.data.ndim
            shape[axis] = order - 1
            upper = self.data[_index(self.data.ndim, axis, slice(1, order))]
            out[_index(self.data.ndim, axis, slice(0, order - 1))] = upper * weights.reshape(shape)
        return RingMatrix(self.ctx, out, self.denom, self.lost)

    def shift(self, k: int, var: int = 0) -> "RingMatrix":
        """Multiply by t_var^k."""
        axis = 2 + var
        order = self.data.shape[axis]
        out = np.zeros_like(self.data)
        if k < order:
            out[_index(self.data.ndim, axis, slice(k, order))] = self.data[_index(self.data.ndim, axis, slice(0, order - k))]
        return RingMatrix(self.ctx, out, self.denom, self.lost)

    def at_zero(self) -> "RingMatrix":
        """Set every series variable to zero."""
        return RingMatrix(self.ctx, self.data[(slice(None), slice(None)) + (0,) * self.nvars], self.denom, self.lost)

    def coefficient(self, index: Sequence[int]) -> "RingMatrix":
        """Constant matrix of the coefficient of t^index."""
        return RingMatrix(self.ctx, self.data[(slice(None), slice(None)) + tuple(index)], self.denom, self.lost)

    def embed(self, nvars: int, var: int) -> "RingMatrix":
        """Regard a univariate matrix as a matrix in variable `var` of an nvars-variable ring."""
        if self.nvars != 1:
            raise InputError("only univariate matrices can be embedded")
        order = self.tshape[0]
        data = np.zeros(self.shape + (order,) * nvars + (self.ctx.r,), dtype=self.ctx.dtype)
        index = [slice(None), slice(None)] + [0] * nvars
        index[2 + var] = slice(None)
        data[tuple(index)] = self.data
        return RingMatrix(self.ctx, data, self.denom, self.lost)

    def diagonal(self) -> "RingMatrix":
        """Restrict a bivariate matrix to t_1 = t_2 = t."""
        if self.nvars != 2:
            raise InputError("diagonal restriction needs two variables")
        order = self.tshape[0]
        out = np.zeros(self.shape + (order, self.ctx.r), dtype=self.ctx.dtype)
        for i in range(order):
            for j in range(order - i):
                out[:, :, i + j] += self.data[:, :, i, j]
        return RingMatrix(self.ctx, out, self.denom, self.lost)

    @property
    def T(self) -> "RingMatrix":
        return RingMatrix(self.ctx, np.swapaxes(self.data, 0, 1), self.denom, self.lost)

    def take(self, rows: Optional[Iterable[int]] = None, cols: Optional[Iterable[int]] = None) -> "RingMatrix":
        data = self.data
        if rows is not None:
            data = data[list(rows)]
        if cols is not None:
            data = data[:, list(cols)]
        return RingMatrix(self.ctx, data, self.denom, self.lost)

    def entry(self, i: int, j: int) -> "RingMatrix":
        return self.take([i], [j])

    def set_entry(self, i: int, j: int, value: "RingMatrix") -> "RingMatrix":
        base, other, denom, tshape = self._aligned(value)
        base = base.copy()
        base[i, j] = other[0, 0]
        return RingMatrix(self.ctx, base, denom, max(self.lost, value.lost))

    def mod_p(self) -> "RingMatrix":
        """Reduction to the residue field (integral matrices only)."""
        if self.denom:
            raise IntegralityError("cannot reduce a matrix with denominators mod p")
        return RingMatrix(self.ctx.residue_context(), self.data % self.ctx.p)

    # comparisons

    def valuation(self, t_order: Optional[int] = None) -> float:
        """Gauss valuation: min p-adic valuation over stored coefficients, minus the denominator."""
        data = self.data
        if t_order is not None:
            for axis in range(2, 2 + self.nvars):
                data = data[_index(data.ndim, axis, slice(0, t_order))]
        return min_valuation(data, self.ctx.p, self.ctx.prec) - self.denom

    def is_zero(self, exponent: Optional[int] = None, t_order: Optional[int] = None) -> bool:
        """Congruent to zero mod (p^exponent, t^t_order); exact in the known digits by default."""
        if exponent is None:
            exponent = self.known_digits - self.denom
        return self.valuation(t_order) >= exponent

    def congruent(self, other: "RingMatrix", exponent: Optional[int] = None, t_order: Optional[int] = None) -> bool:
        if self.shape != other.shape:
            return False
        return (self - other).is_zero(exponent, t_order)

    def residual_valuation(self, other: "RingMatrix", t_order: Optional[int] = None) -> float:
        return (self - other).valuation(t_order)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RingMatrix):
            return NotImplemented
        if self.shape != other.shape:
            return False
        a, b, _, _ = self._aligned(other)
        known = self.ctx.p ** max(0, min(self.known_digits, other.known_digits))
        return not np.any((a - b) % known != 0)

    def __hash__(self) -> int:
        return hash((self.shape, self.tshape, self.denom))

    def check_budget(self, limit: int, what: str = "value") -> "RingMatrix":
        if self.denom > limit:
            raise DenominatorBudgetError(f"{what} needs p^{self.denom} in its denominator, budget is p^{limit}")
        return self

    def is_unit_constant(self) -> bool:
        """For 1x1 matrices: constant term is a p-adic unit and there is no denominator."""
        return self.denom == 0 and self.ctx.is_unit(self.at_zero().data[0, 0])

    def to_ints(self) -> list:
        """Constant integral matrix as nested lists of coordinate lists (r=1 gives plain ints)."""
        constant = self.at_zero()
        rows = []
        for i in range(self.rows):
            row = []
            for j in range(self.cols):
                coords = [int(c) for c in constant.data[i, j]]
                row.append(coords[0] if self.ctx.r == 1 else coords)
            rows.append(row)
        return rows

    def to_json(self) -> dict:
        entries = []
        for i in range(self.rows):
            row = []
            for j in range(self.cols):
                terms = self.data[i, j].reshape(-1, self.ctx.r)
                row.append([[int(c) for c in term] for term in terms])
            entries.append(row)
        return {"denom_exp": self.denom, "tshape": list(self.tshape), "entries": entries}

    @classmethod
    def from_json(cls, ctx: RingContext, payload: dict) -> "RingMatrix":
        tshape = tuple(payload.get("tshape", []))
        entries = payload["entries"]
        rows = len(entries)
        cols = len(entries[0]) if rows else 0
        data = np.zeros((rows, cols) + tshape + (ctx.r,), dtype=ctx.dtype)
        for i, row in enumerate(entries):
            for j, terms in enumerate(row):
                block = np.asarray([[int(c) for c in term] for term in terms], dtype=object)
                if block.shape != (int(np.prod(tshape, dtype=int)), ctx.r):
                    raise InputError(f"entry ({i},{j}) has {block.shape[0]} terms, expected shape {tshape}")
                data[i, j] = block.reshape(tshape + (ctx.r,)).astype(ctx.dtype)
        return cls(ctx, data, int(payload.get("denom_exp", 0)))

    def __repr__(self) -> str:
        return f"RingMatrix(shape={self.shape}, tshape={self.tshape}, denom={self.denom})"


def _common_tshape(matrices: Sequence[RingMatrix]) -> tuple:
    shapes = {m.tshape for m in matrices if m.nvars}
    if not shapes:
        return ()
    if len(shapes) > 1:
        raise InputError(f"incompatible series truncations {sorted(shapes)}")
    return shapes.pop()


def _product_data(ctx: RingContext, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """
    Truncated matrix product: a (m,k,*ts,r) times b (k,n,*ts,r).

    Loops over the nonzero t-monomials of the left factor; for each one the
    right factor is shifted and contracted against the multiplication tensor.
    """
    q = ctx.modulus
    tshape = a.shape[2:-1]
    out = np.zeros((a.shape[0], b.shape[1]) + tuple(tshape) + (ctx.r,), dtype=ctx.dtype)
    if tshape:
        support = np.any(a != 0, axis=(0, 1, a.ndim - 1))
        monomials = [tuple(int(i) for i in idx) for idx in np.argwhere(support)]
    else:
        monomials = [()]
    for idx in monomials:
        block = modular_tensordot(a[(slice(None), slice(None)) + idx], ctx.mult_table, ([2], [0]), q)
        src = (slice(None), slice(None)) + tuple(slice(0, order - i) for i, order in zip(idx, tshape))
        dst = (slice(None), slice(None)) + tuple(slice(i, None) for i in idx)
        part = b[src]
        contrib = modular_tensordot(block, part, ([1, 2], [0, part.ndim - 1]), q)
        out[dst] = (out[dst] + np.moveaxis(contrib, 1, -1)) % q
    return out


class TruncatedSeries:
    """
    Element of Z_q[[t]]/t^T, possibly divided by a power of p.
    """
    __slots__ = ("matrix",)

    def __init__(self, matrix: RingMatrix) -> None:
        if matrix.shape != (1, 1) or matrix.nvars != 1:
            raise InputError("a truncated series is a 1x1 univariate matrix")
        self.matrix = matrix

    @classmethod
    def from_terms(cls, ctx: RingContext, terms: Sequence, denom: int = 0, T: Optional[int] = None) -> "TruncatedSeries":
        """
        Args:
            terms: coefficients of t^0, t^1, ...; each an int, an UnramifiedElement or r coordinates
            denom: p-power denominator
            T: truncation order, defaults to the context's T
        """
        order = T or ctx.T
        data = np.zeros((1, 1, order, ctx.r), dtype=ctx.dtype)
        for i, term in enumerate(list(terms)[:order]):
            if isinstance(term, UnramifiedElement):
                data[0, 0, i] = term.coords
            elif isinstance(term, (int, np.integer)):
                data[0, 0, i, 0] = int(term) % ctx.modulus
            else:
                data[0, 0, i] = ctx.reduce([int(c) for c in term])
        return cls(RingMatrix(ctx, data, denom))

    @classmethod
    def monomial(cls, ctx: RingContext, coefficient: "int | UnramifiedElement", degree: int,
                 T: Optional[int] = None) -> "TruncatedSeries":
        return cls.from_terms(ctx, [0] * degree + [coefficient], T=T)

    @property
    def ctx(self) -> RingContext:
        return self.matrix.ctx

    @property
    def denom_exp(self) -> int:
        return self.matrix.denom

    @property
    def order(self) -> int:
        return self.matrix.tshape[0]

    def term(self, i: int) -> UnramifiedElement:
        return UnramifiedElement(self.ctx, self.matrix.data[0, 0, i])

    def __add__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        return TruncatedSeries(self.matrix + other.matrix)

    def __sub__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        return TruncatedSeries(self.matrix - other.matrix)

    def __neg__(self) -> "TruncatedSeries":
        return TruncatedSeries(-self.matrix)

    def __mul__(self, other: "TruncatedSeries | UnramifiedElement | int") -> "TruncatedSeries":
        if isinstance(other, TruncatedSeries):
            return TruncatedSeries(self.matrix @ other.matrix)
        return TruncatedSeries(self.matrix * other)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return self.matrix == other.matrix

    def __hash__(self) -> int:
        return hash(self.matrix)

    def derivative(self) -> "TruncatedSeries":
        return TruncatedSeries(self.matrix.derivative())

    def frobenius(self, power: int = 1) -> "TruncatedSeries":
        return TruncatedSeries(self.matrix.frobenius(power))

    def truncate(self, T: int) -> "TruncatedSeries":
        return TruncatedSeries(self.matrix.truncate(T))

    def gauss_valuation(self) -> float:
        return self.matrix.valuation()

    def to_json(self) -> dict:
        terms = self.matrix.data[0, 0]
        return {"denom_exp": self.denom_exp, "terms": [[int(c) for c in term] for term in terms]}

    def __repr__(self) -> str:
        return f"TruncatedSeries(T={self.order}, denom={self.denom_exp})"


def frobenius_series(f: TruncatedSeries) -> TruncatedSeries:
    return f.frobenius()


def gauss_valuation(f: TruncatedSeries) -> float:
    return f.gauss_valuation()
