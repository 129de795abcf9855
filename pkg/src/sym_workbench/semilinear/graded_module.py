"""
Z/rZ-graded free modules with a degree +1 tau-semilinear operator.

A SigmaLinearMap stores one matrix A_sigma per degree; an element x of M_sigma
(a column of coordinates) is sent to A_sigma * tau(x) in M_{sigma+1}.
"""
import logging
from typing import Optional, Sequence

from pydantic import BaseModel, Field, field_validator, model_validator

from sym_workbench.arithmetic import linalg
from sym_workbench.arithmetic.ring import RingContext
from sym_workbench.arithmetic.series import RingMatrix
from sym_workbench.errors import InputError

logger = logging.getLogger(__name__)


class GradedSigmaModule(BaseModel):
    """
    Ranks n_sigma of a graded free module M = sum of M_sigma, sigma in Z/rZ.
    """
    ranks: list[int] = Field(min_length=1)
    labels: Optional[list[list[str]]] = None

    @field_validator("ranks")
    @classmethod
    def _non_negative(cls, value: list[int]) -> list[int]:
        if any(n < 0 for n in value):
            raise ValueError(f"ranks must be non-negative, got {value}")
        return value

    @model_validator(mode="after")
    def _labels_match(self) -> "GradedSigmaModule":
        if self.labels is not None:
            if [len(row) for row in self.labels] != self.ranks:
                raise ValueError("basis labels do not match the ranks")
        return self

    @property
    def r(self) -> int:
        return len(self.ranks)

    @property
    def total_rank(self) -> int:
        return sum(self.ranks)

    def rank(self, sigma: int) -> int:
        return self.ranks[sigma % self.r]

    def basis_labels(self, sigma: int) -> list[str]:
        sigma %= self.r
        if self.labels is not None:
            return self.labels[sigma]
        return [f"e{sigma}_{i}" for i in range(self.ranks[sigma])]


class SigmaLinearMap:
    """
    Degree +1 tau-semilinear operator phi on a graded free module, given by
    its per-degree matrices over the point frame W(k) or the series frame W(k)[[t]].
    """
    __slots__ = ("matrices",)

    def __init__(self, matrices: Sequence[RingMatrix]) -> None:
        matrices = list(matrices)
        if not matrices:
            raise InputError("a graded operator needs at least one degree")
        ctx = matrices[0].ctx
        if len(matrices) != ctx.r:
            raise InputError(f"expected {ctx.r} matrices (one per degree), got {len(matrices)}")
        tshapes = {m.tshape for m in matrices}
        if len(tshapes) > 1:
            raise InputError(f"per-degree matrices live over different frames {sorted(tshapes)}")
        r = len(matrices)
        for sigma, matrix in enumerate(matrices):
            following = matrices[(sigma + 1) % r]
            if matrix.rows != following.cols:
                raise InputError(
                    f"degree {sigma}: A has {matrix.rows} rows but M_{(sigma + 1) % r} has rank {following.cols}"
                )
        self.matrices = matrices

    @classmethod
    def from_ints(cls, ctx: RingContext, matrices: Sequence[Sequence[Sequence[int]]],
                  tshape: tuple = ()) -> "SigmaLinearMap":
        return cls([RingMatrix.from_ints(ctx, m, tshape) for m in matrices])

    @classmethod
    def identity(cls, ctx: RingContext, rank: int, tshape: tuple = ()) -> "SigmaLinearMap":
        return cls([RingMatrix.identity(ctx, rank, tshape) for _ in range(ctx.r)])

    @property
    def ctx(self) -> RingContext:
        return self.matrices[0].ctx

    @property
    def r(self) -> int:
        return len(self.matrices)

    @property
    def tshape(self) -> tuple:
        return self.matrices[0].tshape

    @property
    def module(self) -> GradedSigmaModule:
        return GradedSigmaModule(ranks=[m.cols for m in self.matrices])

    @property
    def quasi(self) -> bool:
        """True when some entry carries a denominator (phi is only a quasi-isogeny)."""
        return any(m.denom for m in self.matrices)

    def rank(self, sigma: int) -> int:
        return self[sigma].cols

    def __getitem__(self, sigma: int) -> RingMatrix:
        return self.matrices[sigma % self.r]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SigmaLinearMap):
            return NotImplemented
        return self.r == other.r and all(a == b for a, b in zip(self.matrices, other.matrices))

    def __hash__(self) -> int:
        return hash(tuple(self.module.ranks))

    def __repr__(self) -> str:
        return f"SigmaLinearMap(ranks={self.module.ranks}, tshape={self.tshape}, quasi={self.quasi})"

    def apply(self, sigma: int, x: RingMatrix) -> RingMatrix:
        """phi(x) for a column (or block of columns) x in M_sigma."""
        return self[sigma] @ x.frobenius()

    def iterate(self, start: int, steps: int) -> RingMatrix:
        """
        Matrix P of phi^steps on M_start, meaning phi^steps(x) = P * tau^steps(x).
        """
        result = RingMatrix.identity(self.ctx, self.rank(start), self.tshape)
        for k in range(steps):
            result = self[start + k] @ result.frobenius()
        return result

    def conjugate(self, change: Sequence[RingMatrix]) -> "SigmaLinearMap":
        """
        Operator in the new bases given by the columns of change[sigma]:
        A'_sigma = g_{sigma+1}^{-1} A_sigma tau(g_sigma).
        """
        change = list(change)
        inverses = [linalg.invert(g) for g in change]
        return SigmaLinearMap([
            inverses[(sigma + 1) % self.r] @ self[sigma] @ change[sigma].frobenius()
            for sigma in range(self.r)
        ])

    def at_zero(self) -> "SigmaLinearMap":
        return SigmaLinearMap([m.at_zero() for m in self.matrices])

    def lift(self, tshape: tuple) -> "SigmaLinearMap":
        return SigmaLinearMap([m.lift(tshape) for m in self.matrices])

    def truncate(self, T: int) -> "SigmaLinearMap":
        return SigmaLinearMap([m.truncate(T) for m in self.matrices])

    def frobenius_twist(self) -> "SigmaLinearMap":
        return SigmaLinearMap([m.frobenius() for m in self.matrices])

    def scaled(self, factors: Sequence[RingMatrix]) -> "SigmaLinearMap":
        """Multiply the degree-sigma matrix by the 1x1 series factors[sigma]."""
        return SigmaLinearMap([m.series_scale(f) for m, f in zip(self.matrices, factors)])

    @classmethod
    def direct_sum(cls, maps: Sequence["SigmaLinearMap"]) -> "SigmaLinearMap":
        maps = list(maps)
        return cls([RingMatrix.block_diag([m[sigma] for m in maps]) for sigma in range(maps[0].r)])

    def to_json(self) -> dict:
        return {
            "ranks": self.module.ranks,
            "matrices": [m.to_json() for m in self.matrices],
            "quasi": self.quasi,
        }

    @classmethod
    def from_json(cls, ctx: RingContext, payload: dict) -> "SigmaLinearMap":
        phi = cls([RingMatrix.from_json(ctx, m) for m in payload["matrices"]])
        if "ranks" in payload and phi.module.ranks != list(payload["ranks"]):
            raise InputError(f"declared ranks {payload['ranks']} do not match the matrices {phi.module.ranks}")
        return phi


def compose_cycle(phi: SigmaLinearMap, degree: int = 0) -> RingMatrix:
    """
    phi^r on M_degree: A_{r-1} tau(A_{r-2}) ... tau^{r-1}(A_0) for degree 0.
    """
    composite = phi.iterate(degree, phi.r)
    if not composite.is_square:
        raise InputError(f"phi^r on M_{degree} is not square: {composite.shape}")
    return composite


def total_operator(phi: SigmaLinearMap) -> RingMatrix:
    """The ungraded operator on the sum of all M_sigma as one block matrix."""
    ranks = phi.module.ranks
    offsets = [sum(ranks[:sigma]) for sigma in range(phi.r)]
    total = RingMatrix.zeros(phi.ctx, sum(ranks), sum(ranks), phi.tshape)
    data = total.data.copy()
    denom = max(m.denom for m in phi.matrices)
    q = phi.ctx.modulus
    for sigma in range(phi.r):
        target = (sigma + 1) % phi.r
        block = phi[sigma]
        rows = slice(offsets[target], offsets[target] + ranks[target])
        cols = slice(offsets[sigma], offsets[sigma] + ranks[sigma])
        data[rows, cols] = block.data * (phi.ctx.p ** (denom - block.denom) % q) % q
    return RingMatrix(phi.ctx, data, denom)
