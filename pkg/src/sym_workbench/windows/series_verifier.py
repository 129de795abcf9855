import logging
from typing import Optional

from sym_workbench.windows.base_verifier import CheckResult, CheckStatus, WindowReport
from sym_workbench.windows.point_verifier import PointWindowVerifier
from sym_workbench.windows.window import Frame, Window, special_fibre

logger = logging.getLogger(__name__)


class SeriesWindowVerifier(PointWindowVerifier):
    """
    Checks the window axioms over the series frame W(k)[[t]] / t^T.
    (W.4) is tested mod (p, t^T); the special fibre at t = 0 is verified as
    a point-frame window and must carry the same Hodge data.
    """
    data: Optional[Window]
    report: Optional[WindowReport]

    def _expected_frame(self) -> Frame:
        return Frame.SERIES

    def nilpotence_bound(self) -> int:
        if self._bound is not None:
            return self._bound
        truncation = self.data.phi.tshape[0]
        return self.data.r * sum(self.data.ranks) * (1 + truncation.bit_length())

    def check_special_fibre(self) -> CheckResult:
        fibre = special_fibre(self.data)
        report = PointWindowVerifier().verify(fibre)
        if not report.passed:
            failed = [c.name for c in report.failures()]
            return self.report.add(CheckResult(
                name="special_fibre", status=CheckStatus.FAIL, witness={"failed": failed},
                detail="the window at t = 0 violates the axioms",
            ))
        if fibre.l_ranks != self.data.l_ranks:
            return self.report.add(CheckResult(
                name="special_fibre", status=CheckStatus.FAIL,
                witness={"series": self.data.l_ranks, "point": fibre.l_ranks},
                detail="Hodge data changes at t = 0",
            ))
        return self.report.add(CheckResult(name="special_fibre", status=CheckStatus.PASS))

    def run_checks(self) -> None:
        super().run_checks()
        self.check_special_fibre()
