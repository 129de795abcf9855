"""
Graded windows over the frames W(k) and W(k)[[t]].

A window is a graded operator phi together with a normal decomposition
M_sigma = L_sigma + T_sigma, stored as an invertible matrix B_sigma whose
first l_sigma columns span L_sigma and whose remaining columns span T_sigma.
The filtration is M_{sigma,1} = L_sigma + p T_sigma.
"""
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from sym_workbench.arithmetic import linalg
from sym_workbench.arithmetic.series import RingMatrix
from sym_workbench.errors import InputError, IntegralityError, SingularMatrixError
from sym_workbench.semilinear.graded_module import SigmaLinearMap

logger = logging.getLogger(__name__)


class Frame(str, Enum):
    POINT = "point"
    SERIES = "series"


@dataclass(frozen=True)
class NormalDecomposition:
    bases: tuple[RingMatrix, ...]
    l_ranks: tuple[int, ...]

    @property
    def r(self) -> int:
        return len(self.bases)

    def basis(self, sigma: int) -> RingMatrix:
        return self.bases[sigma % self.r]

    def l_rank(self, sigma: int) -> int:
        return self.l_ranks[sigma % self.r]

    def L(self, sigma: int) -> RingMatrix:
        return self.basis(sigma).take(cols=range(self.l_rank(sigma)))

    def T(self, sigma: int) -> RingMatrix:
        basis = self.basis(sigma)
        return basis.take(cols=range(self.l_rank(sigma), basis.cols))

    def m1_basis(self, sigma: int) -> RingMatrix:
        """Columns spanning M_{sigma,1} = L + pT."""
        basis = self.basis(sigma)
        l = self.l_rank(sigma)
        data = basis.data.copy()
        data[:, l:] = data[:, l:] * basis.ctx.p % basis.ctx.modulus
        return RingMatrix(basis.ctx, data)

    def lift(self, tshape: tuple) -> "NormalDecomposition":
        return NormalDecomposition(tuple(b.lift(tshape) for b in self.bases), self.l_ranks)

    def at_zero(self) -> "NormalDecomposition":
        return NormalDecomposition(tuple(b.at_zero() for b in self.bases), self.l_ranks)

    def frobenius_twist(self) -> "NormalDecomposition":
        return NormalDecomposition(tuple(b.frobenius() for b in self.bases), self.l_ranks)

    def to_json(self) -> dict:
        return {"bases": [b.to_json() for b in self.bases], "l_ranks": list(self.l_ranks)}


class Window:
    """
    Graded window (M, M_1, phi) with a chosen normal decomposition.
    """
    __slots__ = ("phi", "decomposition", "_psi")

    def __init__(self, phi: SigmaLinearMap, decomposition: NormalDecomposition) -> None:
        if decomposition.r != phi.r:
            raise InputError(f"decomposition has {decomposition.r} degrees, phi has {phi.r}")
        for sigma in range(phi.r):
            basis = decomposition.basis(sigma)
            if basis.shape != (phi.rank(sigma), phi.rank(sigma)):
                raise InputError(f"degree {sigma}: decomposition basis has shape {basis.shape}")
            if not 0 <= decomposition.l_rank(sigma) <= basis.cols:
                raise InputError(f"degree {sigma}: L has impossible rank {decomposition.l_rank(sigma)}")
            if not linalg.is_invertible(basis.at_zero()):
                raise InputError(f"degree {sigma}: L and T do not span M_{sigma}")
        if decomposition.bases and decomposition.bases[0].tshape != phi.tshape:
            decomposition = decomposition.lift(phi.tshape)
        self.phi = phi
        self.decomposition = decomposition
        self._psi: Optional["PsiOperator"] = None

    @property
    def ctx(self):
        return self.phi.ctx

    @property
    def r(self) -> int:
        return self.phi.r

    @property
    def frame(self) -> Frame:
        return Frame.SERIES if self.phi.tshape else Frame.POINT

    @property
    def ranks(self) -> list[int]:
        return self.phi.module.ranks

    @property
    def l_ranks(self) -> list[int]:
        return list(self.decomposition.l_ranks)

    def quotient_dims(self) -> list[int]:
        """dim M_sigma / M_{sigma,1} (the rank of T_sigma)."""
        return [n - l for n, l in zip(self.ranks, self.l_ranks)]

    def same_filtration(self, other: "Window") -> bool:
        """
        Whether both decompositions lift the same M_1: the T-rows of
        B_1^{-1} B_2 on the L-columns vanish mod p.
        """
        for sigma in range(self.r):
            if self.decomposition.l_rank(sigma) != other.decomposition.l_rank(sigma):
                return False
            l = self.decomposition.l_rank(sigma)
            if l == 0 or l == self.phi.rank(sigma):
                continue
            relative = linalg.inverse(self.decomposition.basis(sigma)) @ other.decomposition.basis(sigma)
            block = relative.take(rows=range(l, relative.rows), cols=range(l))
            if not block.is_zero(1):
                return False
        return True

    def with_decomposition(self, decomposition: NormalDecomposition) -> "Window":
        """
        The same window with another normal decomposition, which must lift the same M_1.
        """
        candidate = Window(self.phi, decomposition)
        if not self.same_filtration(candidate):
            raise InputError("the decomposition does not lift M_1 of this window")
        return candidate

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Window):
            return NotImplemented
        return self.phi == other.phi and self.same_filtration(other)

    def __hash__(self) -> int:
        return hash((self.frame, tuple(self.ranks), tuple(self.l_ranks)))

    def __repr__(self) -> str:
        return f"Window(frame={self.frame.value}, ranks={self.ranks}, l_ranks={self.l_ranks})"

    def to_json(self) -> dict:
        return {
            "frame": self.frame.value,
            "phi": self.phi.to_json(),
            "decomposition": self.decomposition.to_json(),
        }

    @classmethod
    def from_json(cls, ctx, payload: dict) -> "Window":
        phi = SigmaLinearMap.from_json(ctx, payload["phi"])
        decomposition = payload["decomposition"]
        return cls(phi, NormalDecomposition(
            tuple(RingMatrix.from_json(ctx, b) for b in decomposition["bases"]),
            tuple(int(l) for l in decomposition["l_ranks"]),
        ))


def _decompose_degree(a: RingMatrix) -> tuple[RingMatrix, int]:
    """
    Normal decomposition at one degree from the mod p kernel of A tau(.).
    L is the lift of the reduced row echelon basis of tau^{-1}(ker A mod p),
    T the standard vectors at the non-pivot columns.
    """
    ctx = a.ctx
    n = a.cols
    kernel = linalg.kernel_mod_p(a)
    if kernel.cols == 0:
        return RingMatrix.identity(ctx, n), 0
    untwisted = kernel.frobenius(ctx.r - 1)
    reduced, pivots = linalg.row_echelon(untwisted.T)
    lifted = reduced.take(rows=range(len(pivots))).with_context(ctx).T
    free = [j for j in range(n) if j not in pivots]
    complement = RingMatrix.identity(ctx, n).take(cols=free)
    return RingMatrix.hstack([lifted, complement]), len(pivots)


def normal_decomposition(phi: SigmaLinearMap) -> NormalDecomposition:
    """
    Deterministic normal decomposition (lowest-index pivots). Series operators
    are decomposed on their special fibre and the bases are lifted as constants.
    """
    point = phi.at_zero() if phi.tshape else phi
    if point.quasi:
        raise IntegralityError("M_1 is only defined for an integral phi")
    bases, l_ranks = [], []
    for sigma in range(point.r):
        basis, l = _decompose_degree(point[sigma])
        bases.append(basis.lift(phi.tshape))
        l_ranks.append(l)
    return NormalDecomposition(tuple(bases), tuple(l_ranks))


def m1_submodule(phi: SigmaLinearMap) -> list[RingMatrix]:
    """
    Per-degree bases of M_{sigma,1} = {x in M_sigma : phi(x) in p M_{sigma+1}}.
    """
    decomposition = normal_decomposition(phi)
    return [decomposition.m1_basis(sigma) for sigma in range(phi.r)]


def structure_operator(window: Window) -> list[RingMatrix]:
    """
    Matrices of U_sigma: p^{-1} phi on L and phi on T, i.e. A tau(B) diag(1/p, 1).
    Invertibility of every U_sigma is axiom (W.3).
    """
    operators = []
    for sigma in range(window.r):
        d = window.decomposition
        image_l = window.phi[sigma] @ d.L(sigma).frobenius()
        image_t = window.phi[sigma] @ d.T(sigma).frobenius()
        scaled_l = image_l.divide_by_p(1, what=f"phi(L_{sigma})")
        operators.append(RingMatrix.hstack([scaled_l, image_t]))
    return operators


@dataclass
class PsiOperator:
    """
    psi#_sigma : M_{sigma+1} -> A (x)_tau M_sigma, one matrix per degree.
    """
    matrices: list[RingMatrix]

    def __getitem__(self, sigma: int) -> RingMatrix:
        return self.matrices[sigma % len(self.matrices)]

    def iterate_mod_p(self, start: int, steps: int) -> RingMatrix:
        """
        Linearised psi^steps starting from M_start, reduced mod p:
        tau^{k-1}(psi_{start-k}) ... tau(psi_{start-2}) psi_{start-1}.
        """
        result = self[start - 1]
        for k in range(2, steps + 1):
            result = self[start - k].frobenius(k - 1) @ result
        return RingMatrix(result.ctx, result.data % result.ctx.p, result.denom)

    def nilpotence_index(self, bound: int) -> Optional[int]:
        """
        Smallest k <= bound with psi^k = 0 mod p from every degree, or None.
        """
        r = len(self.matrices)
        worst = 0
        for start in range(r):
            result = self[start - 1]
            found = 1 if result.is_zero(1) else None
            k = 1
            while found is None and k < bound:
                k += 1
                result = self[start - k].frobenius(k - 1) @ result
                if result.is_zero(1):
                    found = k
            if found is None:
                return None
            worst = max(worst, found)
        return worst


def psi_sharp(window: Window) -> PsiOperator:
    """
    psi#_sigma = tau(B_sigma) diag(1_L, p_T) U_sigma^{-1}; it satisfies
    psi# phi# = phi# psi# = p and does not depend on the decomposition.
    Computed once per window.

    Raises:
        SingularMatrixError: some U_sigma is not invertible ((W.3) fails)
    """
    if window._psi is not None:
        return window._psi
    matrices = []
    for sigma, operator in enumerate(structure_operator(window)):
        try:
            inverse = linalg.inverse(operator)
        except SingularMatrixError as exc:
            raise SingularMatrixError(f"U_{sigma} is not invertible: (W.3) fails at degree {sigma}") from exc
        l = window.decomposition.l_rank(sigma)
        scaled = RingMatrix.vstack([
            inverse.take(rows=range(l)),
            inverse.take(rows=range(l, inverse.rows)) * window.ctx.p,
        ]) if l < inverse.rows else inverse
        matrices.append(window.decomposition.basis(sigma).frobenius() @ scaled)
    window._psi = PsiOperator(matrices)
    return window._psi


def window_from_dieudonne(phi: SigmaLinearMap) -> Window:
    """
    Window over W(k) of a Dieudonne module (pM in phi M in M).

    Raises:
        InputError: phi is not integral, or pM is not contained in phi M
    """
    if phi.tshape:
        raise InputError("Dieudonne modules live over the point frame")
    for sigma in range(phi.r):
        a = phi[sigma]
        if a.denom:
            raise InputError(f"phi is not integral at degree {sigma}")
        try:
            inverse = linalg.quasi_inverse(a)
        except SingularMatrixError as exc:
            raise InputError(f"phi is not bijective at degree {sigma}") from exc
        if not (inverse * a.ctx.p).is_integral:
            raise InputError(f"pM is not contained in phi M at degree {sigma}")
    return Window(phi, normal_decomposition(phi))


def dieudonne_from_window(window: Window) -> SigmaLinearMap:
    if window.frame != Frame.POINT:
        raise InputError("only point-frame windows are Dieudonne modules")
    return window.phi


def special_fibre(window: Window) -> Window:
    """Evaluate a series-frame window at t = 0."""
    if window.frame == Frame.POINT:
        return window
    return Window(window.phi.at_zero(), window.decomposition.at_zero())


def frobenius_base_change(window: Window) -> Window:
    """Base change along the Frobenius of the frame: every matrix is twisted by tau."""
    return Window(window.phi.frobenius_twist(), window.decomposition.frobenius_twist())


def random_decomposition(window: Window, rng: np.random.Generator, attempts: int = 64) -> NormalDecomposition:
    """
    Random normal decomposition lifting the same M_1: B G with
    G = [[G_LL, G_LT], [p G_TL, G_TT]] and G_LL, G_TT invertible.
    """
    ctx = window.ctx
    bases = []
    for sigma in range(window.r):
        n = window.phi.rank(sigma)
        l = window.decomposition.l_rank(sigma)
        for _ in range(attempts):
            g = RingMatrix.random(ctx, n, n, rng)
            data = g.data.copy()
            data[l:, :l] = data[l:, :l] * ctx.p % ctx.modulus
            g = RingMatrix(ctx, data)
            if linalg.is_invertible(g):
                break
        else:
            raise InputError(f"no invertible change of decomposition found at degree {sigma}")
        bases.append(window.decomposition.basis(sigma).at_zero() @ g)
    return NormalDecomposition(tuple(b.lift(window.phi.tshape) for b in bases), window.decomposition.l_ranks)
