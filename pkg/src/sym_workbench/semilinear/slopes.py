"""
Newton polygons and graded slopes of semilinear operators.
"""
import logging
import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from pydantic import BaseModel, ConfigDict, field_serializer, field_validator

from sym_workbench.arithmetic import linalg
from sym_workbench.arithmetic.series import RingMatrix
from sym_workbench.errors import (
    MissingSkeletonError,
    NotIsoclinalError,
    PrecisionError,
    TruncationError,
)
from sym_workbench.semilinear.graded_module import SigmaLinearMap, compose_cycle, total_operator

logger = logging.getLogger(__name__)

# vertices closer than this to the known digits are not certified
POLYGON_GUARD = 2


class SlopeMultiset(BaseModel):
    """
    Sorted multiset of rational slopes.
    """
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    values: tuple[Fraction, ...] = ()

    @field_validator("values", mode="before")
    @classmethod
    def _sorted_fractions(cls, value) -> tuple[Fraction, ...]:
        return tuple(sorted(Fraction(v) for v in value))

    @field_serializer("values")
    def _as_strings(self, values: tuple[Fraction, ...]) -> list[str]:
        return [str(v) for v in values]

    @classmethod
    def of(cls, *values) -> "SlopeMultiset":
        return cls(values=values)

    def __len__(self) -> int:
        return len(self.values)

    def multiplicities(self) -> dict[Fraction, int]:
        return dict(sorted(Counter(self.values).items()))

    def total(self) -> Fraction:
        return sum(self.values, Fraction(0))

    def is_isoclinal(self) -> bool:
        return len(set(self.values)) <= 1

    def scaled(self, factor: Fraction) -> "SlopeMultiset":
        return SlopeMultiset(values=[v * factor for v in self.values])

    def shifted(self, amount: Fraction) -> "SlopeMultiset":
        return SlopeMultiset(values=[v + amount for v in self.values])

    def __str__(self) -> str:
        return "{" + ", ".join(str(v) for v in self.values) + "}"


class NewtonPolygon(BaseModel):
    """
    Lower convex hull of the points (i, v(c_i)) of a monic polynomial sum c_i X^i.
    """
    vertices: list[tuple[int, int]]
    degree: int

    def segments(self) -> list[tuple[tuple[int, int], tuple[int, int]]]:
        return list(zip(self.vertices, self.vertices[1:]))

    def slopes(self) -> SlopeMultiset:
        """Valuations of the roots: each segment of length l and drop d gives d/l, l times."""
        values = []
        for (i1, v1), (i2, v2) in self.segments():
            values += [Fraction(v1 - v2, i2 - i1)] * (i2 - i1)
        return SlopeMultiset(values=values)

    def height(self, index: int) -> Fraction:
        for (i1, v1), (i2, v2) in self.segments():
            if i1 <= index <= i2:
                return Fraction(v1) + Fraction(v2 - v1, i2 - i1) * (index - i1)
        raise ValueError(f"index {index} outside the polygon")

    def area(self) -> Fraction:
        return sum((self.height(i) for i in range(self.degree + 1)), Fraction(0))


def newton_polygon(valuations: Sequence[float]) -> NewtonPolygon:
    """
    Lower convex hull (monotone chain) of the finite points (i, valuations[i]).
    """
    points = [(i, int(v)) for i, v in enumerate(valuations) if v != math.inf]
    if not points:
        raise PrecisionError("all coefficients vanish at working precision")
    hull: list[tuple[int, int]] = []
    for point in points:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            # drop the middle point unless it lies strictly below the chord
            if (y2 - y1) * (point[0] - x1) >= (point[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(point)
    return NewtonPolygon(vertices=hull, degree=len(valuations) - 1)


def _coefficient_valuations(coeffs: list[RingMatrix], t_order: Optional[int] = None) -> list[float]:
    return [c.valuation(t_order) for c in coeffs]


def charpoly_polygon(matrix: RingMatrix, certify: bool = True) -> NewtonPolygon:
    """
    Newton polygon of det(X - matrix), using Gauss valuations for series entries.

    Raises:
        PrecisionError: a vertex is too close to the known digits, or the
            constant coefficient vanished
    """
    coeffs = linalg.charpoly(matrix)
    valuations = _coefficient_valuations(coeffs)
    if valuations[0] == math.inf:
        raise PrecisionError("constant coefficient of the characteristic polynomial vanishes at working precision")
    polygon = newton_polygon(valuations)
    if certify:
        ctx = matrix.ctx
        for index, value in polygon.vertices:
            known = ctx.prec - coeffs[index].denom
            if value > known - POLYGON_GUARD:
                raise PrecisionError(
                    f"coefficient c_{index} has valuation {value}, only {known} digits are known"
                )
    return polygon


def graded_polygon(phi: SigmaLinearMap, degree: int = 0) -> NewtonPolygon:
    return charpoly_polygon(compose_cycle(phi, degree))


def graded_slopes(phi: SigmaLinearMap, degree: int = 0) -> SlopeMultiset:
    """
    Graded slopes: valuations of the eigenvalues of phi^r on M_degree.
    """
    slopes = graded_polygon(phi, degree).slopes()
    logger.debug("graded slopes at degree %d: %s", degree, slopes)
    return slopes


def ungraded_slopes(phi: SigmaLinearMap) -> SlopeMultiset:
    """
    Slopes of the total isocrystal: slopes of F^r on the sum of all M_sigma, divided by r.
    """
    total = total_operator(phi)
    composite = RingMatrix.identity(phi.ctx, total.rows, phi.tshape)
    for _ in range(phi.r):
        composite = total @ composite.frobenius()
    return charpoly_polygon(composite).slopes().scaled(Fraction(1, phi.r))


@dataclass
class GenericSlopes:
    slopes: SlopeMultiset
    degree: int
    polygon: NewtonPolygon
    truncation: int
    certified_truncation: Optional[int] = None


def _lowest_polygon(phi: SigmaLinearMap, degrees: Optional[list[int]] = None) -> tuple[int, NewtonPolygon]:
    best: Optional[tuple[Fraction, int, NewtonPolygon]] = None
    ranks = phi.module.ranks
    full = [degree for degree in range(phi.r) if ranks[degree] == max(ranks)]
    for degree in [d for d in degrees or [] if d in full] or full:
        polygon = charpoly_polygon(compose_cycle(phi, degree), certify=False)
        key = polygon.area()
        if best is None or key < best[0]:
            best = (key, degree, polygon)
    assert best is not None
    return best[1], best[2]


def generic_slopes(phi: SigmaLinearMap, doubled: Optional[SigmaLinearMap] = None,
                   degree: Optional[int] = None) -> GenericSlopes:
    """
    Slopes of a series-frame operator on the generic fibre, where t is a unit
    and the valuation is the Gauss valuation. Truncation can only raise the
    polygon, so the lowest polygon over all degrees is reported.

    Args:
        phi: operator over W(k)[[t]]/t^T
        doubled: the same operator built at truncation 2T, used to certify
        degree: read the polygon at this degree only
    Raises:
        TruncationError: the slopes at 2T differ from those at T
    """
    if not phi.tshape:
        raise ValueError("generic slopes need a series-frame operator")
    degrees = None if degree is None else [degree]
    degree, polygon = _lowest_polygon(phi, degrees)
    result = GenericSlopes(polygon.slopes(), degree, polygon, phi.tshape[0])
    if doubled is not None:
        _, check = _lowest_polygon(doubled, degrees)
        if check.slopes() != result.slopes:
            raise TruncationError(
                f"generic slopes {result.slopes} at T={phi.tshape[0]} differ from "
                f"{check.slopes()} at T={doubled.tshape[0]}"
            )
        result.certified_truncation = doubled.tshape[0]
    return result


@dataclass
class Skeleton:
    """
    Basis (columns, primitive in M_0) of {x : phi^r x = p^z x}.
    """
    basis: RingMatrix
    z: int
    rank: int
    expected_rank: int

    @property
    def partial(self) -> bool:
        return self.rank < self.expected_rank

    def require_complete(self, what: str = "module") -> "Skeleton":
        if self.partial:
            raise MissingSkeletonError(
                f"skeleton of the {what} has rank {self.rank} < {self.expected_rank}; "
                f"the residue field is too small to split it"
            )
        return self


def skeleton(phi: SigmaLinearMap, z: int, degree: int = 0) -> Skeleton:
    """
    Solve phi^r x = p^z x on M_degree through the Smith form of phi^r - p^z.

    Raises:
        NotIsoclinalError: some graded slope differs from z
    """
    if phi.tshape:
        raise ValueError("skeletons are computed on the point frame")
    slopes = graded_slopes(phi, degree)
    if any(s != z for s in slopes.values):
        raise NotIsoclinalError(f"not isoclinal at z={z}: graded slopes are {slopes}")
    composite = compose_cycle(phi, degree)
    if composite.denom:
        raise ValueError("skeleton needs an integral phi^r")
    ctx = phi.ctx
    shifted = composite - RingMatrix.identity(ctx, composite.rows) * (ctx.p ** z)
    basis = linalg.kernel_basis(shifted, ctx.prec - z)
    result = Skeleton(basis=basis, z=z, rank=basis.cols, expected_rank=composite.rows)
    if result.partial:
        logger.info("skeleton at z=%d is partial: rank %d of %d", z, result.rank, result.expected_rank)
    return result
