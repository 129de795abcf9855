"""
Normalized exterior powers of graded windows whose L_sigma have rank at most one,
and their functoriality in window morphisms.

With rank L_sigma <= 1 the operator of the k-th power is the k-th exterior power
of phi: in the decomposition basis phi = U diag(p on L, 1 on T), and a wedge of
k basis vectors contains at most one vector of L. The normal decomposition is
the wedge of B_sigma, whose lexicographic basis lists the subsets containing the
L vector first, so L^(k) = L (x) wedge^(k-1) T and T^(k) = wedge^k T.
"""
import logging
from math import comb
from typing import Optional, Sequence

import numpy as np

from sym_workbench.arithmetic import linalg
from sym_workbench.arithmetic.series import RingMatrix
from sym_workbench.errors import ConsistencyError, InputError
from sym_workbench.semilinear.graded_module import SigmaLinearMap
from sym_workbench.semilinear.multilinear import wedge_matrix, wedge_power
from sym_workbench.windows.base_verifier import CheckResult, VerificationReport
from sym_workbench.windows.window import NormalDecomposition, Window, random_decomposition

logger = logging.getLogger(__name__)


def _unit_power(u: RingMatrix, exponent: int) -> RingMatrix:
    base = u if exponent >= 0 else linalg.inverse(u)
    result = RingMatrix.scalar(u.ctx, 1, u.tshape)
    for _ in range(abs(exponent)):
        result = result @ base
    return result


class MultiplicativeTwist:
    """
    Rank-one graded module with unit operators F_sigma and L = 0.
    """
    __slots__ = ("units",)

    def __init__(self, units: Sequence[RingMatrix]) -> None:
        units = list(units)
        for sigma, u in enumerate(units):
            if u.shape != (1, 1):
                raise InputError(f"twist operator at degree {sigma} is not 1x1")
            if not u.is_unit_constant():
                raise InputError(f"twist operator at degree {sigma} is not a unit")
        self.units = units

    @classmethod
    def trivial(cls, ctx, tshape: tuple = ()) -> "MultiplicativeTwist":
        return cls([RingMatrix.scalar(ctx, 1, tshape) for _ in range(ctx.r)])

    @property
    def r(self) -> int:
        return len(self.units)

    def lift(self, tshape: tuple) -> "MultiplicativeTwist":
        return MultiplicativeTwist([u.lift(tshape) for u in self.units])

    def power(self, exponent: int) -> list[RingMatrix]:
        return [_unit_power(u, exponent) for u in self.units]

    def as_window(self) -> Window:
        ctx = self.units[0].ctx
        tshape = self.units[0].tshape
        decomposition = NormalDecomposition(
            tuple(RingMatrix.identity(ctx, 1, tshape) for _ in range(self.r)), (0,) * self.r
        )
        return Window(SigmaLinearMap(self.units), decomposition)


def _check_preconditions(window: Window, k: int) -> None:
    if any(l > 1 for l in window.l_ranks):
        raise InputError(f"exterior powers need rank L_sigma <= 1, got {window.l_ranks}")
    if not 0 <= k <= min(window.ranks):
        raise InputError(f"k={k} is out of range for ranks {window.ranks}")


def expected_l_rank(n: int, l: int, k: int) -> int:
    """Rank of L^(k) = L (x) wedge^(k-1) T."""
    return comb(n - 1, k - 1) if l == 1 and k >= 1 else 0


def _wedge_decomposition(window: Window, k: int) -> NormalDecomposition:
    bases, l_ranks = [], []
    for sigma in range(window.r):
        n = window.phi.rank(sigma)
        bases.append(wedge_matrix(window.decomposition.basis(sigma), k))
        l = window.decomposition.l_rank(sigma)
        l_ranks.append(expected_l_rank(n, l, k))
    return NormalDecomposition(tuple(bases), tuple(l_ranks))


def exterior_power(window: Window, k: int, twist: Optional[MultiplicativeTwist] = None) -> Window:
    """
    The normalized k-th exterior power: wedge^k of the window tensored with twist^(1-k).

    Raises:
        InputError: some L_sigma has rank > 1 or k is out of range
    """
    _check_preconditions(window, k)
    if twist is None:
        twist = MultiplicativeTwist.trivial(window.ctx, window.phi.tshape)
    elif twist.units[0].tshape != window.phi.tshape:
        twist = twist.lift(window.phi.tshape)
    if twist.r != window.r:
        raise InputError(f"twist has {twist.r} degrees, window has {window.r}")
    phi = wedge_power(window.phi, k).scaled(twist.power(1 - k))
    logger.debug("exterior power k=%d ranks %s", k, phi.module.ranks)
    return Window(phi, _wedge_decomposition(window, k))


def independence_check(window: Window, k: int, twist: Optional[MultiplicativeTwist] = None,
                       rng: Optional[np.random.Generator] = None, trials: int = 1,
                       decompositions: Optional[Sequence[NormalDecomposition]] = None) -> VerificationReport:
    """
    Rebuild the exterior power from other normal decompositions of the same window
    and compare the results as windows.

    Raises:
        InputError: a supplied decomposition does not lift M_1
    """
    rng = rng if rng is not None else np.random.default_rng(0)
    report = VerificationReport(title=f"Exterior power independence (k={k})")
    reference = exterior_power(window, k, twist)
    others = list(decompositions) if decompositions is not None else [
        random_decomposition(window, rng) for _ in range(trials)
    ]
    for index, decomposition in enumerate(others):
        candidate = exterior_power(window.with_decomposition(decomposition), k, twist)
        same = candidate == reference
        report.add(CheckResult.from_bool(
            "independent_of_decomposition", same, witness=None if same else {"trial": index},
        ))
    return report


class WindowMorphism:
    """
    Graded morphism alpha: source -> target, one matrix M_sigma(source) -> M_sigma(target) per degree.
    """
    __slots__ = ("source", "target", "matrices")

    def __init__(self, source: Window, target: Window, matrices: Sequence[RingMatrix]) -> None:
        matrices = list(matrices)
        if len(matrices) != source.r or target.r != source.r:
            raise InputError("a morphism needs one matrix per degree of matching windows")
        for sigma, alpha in enumerate(matrices):
            if alpha.shape != (target.phi.rank(sigma), source.phi.rank(sigma)):
                raise InputError(f"degree {sigma}: morphism matrix has shape {alpha.shape}")
        self.source = source
        self.target = target
        self.matrices = [m.lift(source.phi.tshape) for m in matrices]

    @classmethod
    def identity(cls, window: Window) -> "WindowMorphism":
        return cls(window, window, [
            RingMatrix.identity(window.ctx, window.phi.rank(sigma), window.phi.tshape)
            for sigma in range(window.r)
        ])

    def __getitem__(self, sigma: int) -> RingMatrix:
        return self.matrices[sigma % len(self.matrices)]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, WindowMorphism):
            return NotImplemented
        return all(a == b for a, b in zip(self.matrices, other.matrices))

    def __hash__(self) -> int:
        return hash(tuple(m.shape for m in self.matrices))

    def compose(self, other: "WindowMorphism") -> "WindowMorphism":
        """self o other."""
        return WindowMorphism(other.source, self.target, [a @ b for a, b in zip(self.matrices, other.matrices)])

    def verify(self) -> VerificationReport:
        """
        alpha_{sigma+1} phi = phi tau(alpha_sigma), and alpha(M_1) in M_1.
        """
        report = VerificationReport(title="Window morphism")
        src, tgt = self.source, self.target
        commutes = None
        for sigma in range(src.r):
            left = self[sigma + 1] @ src.phi[sigma]
            right = tgt.phi[sigma] @ self[sigma].frobenius()
            if not left.congruent(right, src.ctx.N):
                commutes = sigma
                break
        report.add(CheckResult.from_bool("commutes_with_phi", commutes is None, degree=commutes))
        filtration = None
        for sigma in range(src.r):
            l_src = src.decomposition.l_rank(sigma)
            l_tgt = tgt.decomposition.l_rank(sigma)
            if l_src == 0 or l_tgt == tgt.phi.rank(sigma):
                continue
            image = linalg.inverse(tgt.decomposition.basis(sigma)) @ self[sigma] @ src.decomposition.L(sigma)
            block = image.take(rows=range(l_tgt, image.rows))
            if not block.is_zero(1):
                filtration = sigma
                break
        report.add(CheckResult.from_bool("preserves_m1", filtration is None, degree=filtration))
        report.calculate_status()
        return report


def functorial_power(alpha: WindowMorphism, k: int, twist: Optional[MultiplicativeTwist] = None,
                     twist_map: Optional[Sequence[RingMatrix]] = None) -> WindowMorphism:
    """
    alpha^(k)(x_1 ^ ... ^ x_k) = alpha(x_1) ^ ... ^ alpha(x_k), tensored with twist_map^(1-k).

    Raises:
        InputError: alpha is not a morphism of windows
        ConsistencyError: the induced map fails to be a morphism
    """
    if not alpha.verify().passed:
        raise InputError("alpha is not a morphism of windows")
    ctx = alpha.source.ctx
    tshape = alpha.source.phi.tshape
    if twist_map is None:
        scales = [RingMatrix.scalar(ctx, 1, tshape) for _ in range(alpha.source.r)]
    else:
        scales = [_unit_power(c.lift(tshape), 1 - k) for c in twist_map]
    induced = WindowMorphism(
        exterior_power(alpha.source, k, twist),
        exterior_power(alpha.target, k, twist),
        [wedge_matrix(a, k).series_scale(c) for a, c in zip(alpha.matrices, scales)],
    )
    report = induced.verify()
    if not report.passed:
        failed = [c.name for c in report.failures()]
        raise ConsistencyError(f"the induced map on wedge^{k} is not a morphism: {failed}")
    return induced


__all__ = [
    "MultiplicativeTwist",
    "WindowMorphism",
    "exterior_power",
    "functorial_power",
    "independence_check",
]
