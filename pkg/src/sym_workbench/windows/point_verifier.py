import logging
from typing import Optional

import numpy as np

from sym_workbench.arithmetic import linalg
from sym_workbench.arithmetic.series import RingMatrix
from sym_workbench.errors import IntegralityError, SingularMatrixError
from sym_workbench.windows.base_verifier import BaseVerifier, CheckResult, CheckStatus, WindowReport
from sym_workbench.windows.window import Frame, PsiOperator, Window, psi_sharp, structure_operator

logger = logging.getLogger(__name__)


def first_nonzero_mod_p(matrix: RingMatrix) -> Optional[dict]:
    """Position of the first entry (and t-power) that does not vanish mod p."""
    hits = np.argwhere(matrix.data % matrix.ctx.p != 0)
    if hits.size == 0:
        return None
    hit = [int(x) for x in hits[0]]
    witness = {"row": hit[0], "col": hit[1]}
    if matrix.nvars:
        witness["t_power"] = hit[2:2 + matrix.nvars]
    return witness


class PointWindowVerifier(BaseVerifier):
    """
    Checks the window axioms (W.1)-(W.4) over the point frame W(k).
    """
    data: Optional[Window]
    report: Optional[WindowReport]

    def __init__(self, nilpotence_bound: Optional[int] = None) -> None:
        super().__init__()
        self._bound = nilpotence_bound
        self.psi: Optional[PsiOperator] = None

    def _expected_frame(self) -> Frame:
        return Frame.POINT

    def _load_data(self, window: Window) -> Window:
        if window.frame != self._expected_frame():
            raise ValueError(f"{type(self).__name__} expects a {self._expected_frame().value}-frame window")
        self.data = window
        self.psi = None
        self.report = WindowReport(
            title=f"Window ({window.frame.value} frame)",
            frame=window.frame.value,
            ranks=window.ranks,
            l_ranks=window.l_ranks,
            quotient_dims=window.quotient_dims(),
        )
        return window

    def nilpotence_bound(self) -> int:
        if self._bound is not None:
            return self._bound
        return self.data.r * sum(self.data.ranks)

    def check_freeness(self) -> CheckResult:
        """
        (W.1): M_sigma free with M_{sigma,1} = L + pT, i.e. every B_sigma is invertible
        and M/M_1 has rank n_sigma - l_sigma.
        """
        window = self.data
        for sigma in range(window.r):
            if not linalg.is_invertible(window.decomposition.basis(sigma).at_zero()):
                return self.report.add(CheckResult(
                    name="W.1", status=CheckStatus.FAIL, degree=sigma,
                    detail="decomposition basis is not invertible",
                ))
        return self.report.add(CheckResult(
            name="W.1", status=CheckStatus.PASS, precision=window.ctx.N,
            detail=f"dim M/M1 = {window.quotient_dims()}",
        ))

    def check_filtration(self) -> CheckResult:
        """
        (W.2): phi(M_{sigma,1}) in p M_{sigma+1}; it suffices that phi(L) vanishes mod p.
        """
        window = self.data
        for sigma in range(window.r):
            a = window.phi[sigma]
            if a.denom:
                return self.report.add(CheckResult(
                    name="W.2", status=CheckStatus.FAIL, degree=sigma,
                    witness={"denominator": a.denom}, detail="phi is not integral",
                ))
            image = a @ window.decomposition.L(sigma).frobenius()
            witness = first_nonzero_mod_p(image)
            if witness is not None:
                return self.report.add(CheckResult(
                    name="W.2", status=CheckStatus.FAIL, degree=sigma, witness=witness,
                    detail="phi(L) is not divisible by p",
                ))
        return self.report.add(CheckResult(name="W.2", status=CheckStatus.PASS, precision=window.ctx.N))

    def check_structure_operator(self) -> CheckResult:
        """
        (W.3): U_sigma = A tau(B) diag(1/p, 1) is invertible, i.e. phi_1(M_1) spans M.
        """
        try:
            self.psi = psi_sharp(self.data)
        except IntegralityError as exc:
            return self.report.add(CheckResult(name="W.3", status=CheckStatus.SKIPPED, detail=str(exc)))
        except SingularMatrixError as exc:
            degree = next(
                (sigma for sigma in range(self.data.r) if not self._operator_invertible(sigma)), None
            )
            return self.report.add(CheckResult(
                name="W.3", status=CheckStatus.FAIL, degree=degree, detail=str(exc),
            ))
        return self.report.add(CheckResult(name="W.3", status=CheckStatus.PASS, precision=self.data.ctx.N))

    def _operator_invertible(self, sigma: int) -> bool:
        return linalg.is_invertible(structure_operator(self.data)[sigma])

    def check_psi_identity(self) -> CheckResult:
        """
        psi# phi# = p on A (x)_tau M_sigma and phi# psi# = p on M_{sigma+1}.
        """
        if self.psi is None:
            return self.report.add(CheckResult(name="psi_phi", status=CheckStatus.SKIPPED, detail="no psi#"))
        window = self.data
        p = window.ctx.p
        for sigma in range(window.r):
            a = window.phi[sigma]
            psi = self.psi[sigma]
            left = psi @ a
            right = a @ psi
            if not left.congruent(RingMatrix.identity(window.ctx, left.rows, left.tshape) * p, window.ctx.N):
                return self.report.add(CheckResult(
                    name="psi_phi", status=CheckStatus.FAIL, degree=sigma, detail="psi# phi# != p",
                ))
            if not right.congruent(RingMatrix.identity(window.ctx, right.rows, right.tshape) * p, window.ctx.N):
                return self.report.add(CheckResult(
                    name="psi_phi", status=CheckStatus.FAIL, degree=sigma, detail="phi# psi# != p",
                ))
        return self.report.add(CheckResult(name="psi_phi", status=CheckStatus.PASS, precision=window.ctx.N))

    def check_nilpotence(self) -> CheckResult:
        """
        (W.4): psi# is nilpotent mod p (mod (p, t^T) over the series frame).
        """
        bound = self.nilpotence_bound()
        self.report.nilpotence_bound = bound
        if self.psi is None:
            return self.report.add(CheckResult(name="W.4", status=CheckStatus.SKIPPED, detail="no psi#"))
        index = self.psi.nilpotence_index(bound)
        logger.debug("psi# nilpotence index %s (bound %d)", index, bound)
        self.report.nilpotence_index = index
        if index is None:
            return self.report.add(CheckResult(
                name="W.4", status=CheckStatus.FAIL, witness={"bound": bound},
                detail=f"psi# is not nilpotent mod p within {bound} steps",
            ))
        return self.report.add(CheckResult(
            name="W.4", status=CheckStatus.PASS, detail=f"psi#^{index} = 0 mod p",
        ))

    def run_checks(self) -> None:
        self.check_freeness()
        self.check_filtration()
        self.check_structure_operator()
        self.check_psi_identity()
        self.check_nilpotence()

    def verify(self, window: Window) -> WindowReport:
        self._load_data(window)
        self.run_checks()
        self.report.calculate_status()
        return self.report
