from enum import Enum
from pydantic import BaseModel, Field
from abc import ABC, abstractmethod
from typing import Optional, Any


class CheckStatus(str, Enum):
    """
    Enum for the outcome of a single verification check.
    """
    PASS = "pass"
    FAIL = "fail"
    PRECISION = "precision"
    SKIPPED = "skipped"
    UNKNOWN = "unknown"


_SEVERITY = {
    CheckStatus.PASS: 0,
    CheckStatus.UNKNOWN: 1,
    CheckStatus.PRECISION: 2,
    CheckStatus.FAIL: 3,
}


def worst_status(statuses: list[CheckStatus]) -> CheckStatus:
    """
    Aggregate statuses: fail > precision > unknown > pass, skipped checks are ignored.
    """
    counted = [s for s in statuses if s != CheckStatus.SKIPPED]
    if not counted:
        return CheckStatus.SKIPPED if statuses else CheckStatus.UNKNOWN
    return max(counted, key=lambda s: _SEVERITY[s])


class CheckResult(BaseModel):
    """
    One verified property, with a witness pinpointing the failure when there is one.
    """
    name: str
    status: CheckStatus
    degree: Optional[int] = None
    precision: Optional[int] = None
    witness: Optional[Any] = None
    detail: str = ""

    @classmethod
    def from_bool(cls, name: str, ok: bool, **kwargs) -> "CheckResult":
        return cls(name=name, status=CheckStatus.PASS if ok else CheckStatus.FAIL, **kwargs)

    @property
    def passed(self) -> bool:
        return self.status == CheckStatus.PASS


class VerificationReport(BaseModel):
    """
    Base model for verification reports.
    Specific reports extend it with the data they verified.
    """
    title: str = "Verification"
    checks: list[CheckResult] = Field(default_factory=list)
    provenance: dict[str, Any] = Field(default_factory=dict)
    status: Optional[CheckStatus] = None

    def add(self, check: CheckResult) -> CheckResult:
        self.checks.append(check)
        self.status = None
        return check

    def extend(self, checks: list[CheckResult]) -> None:
        for check in checks:
            self.add(check)

    def check(self, name: str) -> Optional[CheckResult]:
        return next((c for c in self.checks if c.name == name), None)

    def calculate_status(self) -> CheckStatus:
        """
        Overall status is the worst status among the checks.
        """
        self.status = worst_status([c.status for c in self.checks])
        return self.status

    @property
    def passed(self) -> bool:
        return self.calculate_status() in (CheckStatus.PASS, CheckStatus.SKIPPED)

    def failures(self) -> list[CheckResult]:
        return [c for c in self.checks if c.status in (CheckStatus.FAIL, CheckStatus.PRECISION)]

    def print_results(self) -> None:
        """
        Print a formatted summary of the checks.
        """
        status = self.calculate_status()

        print(f"\n{self.title} Results:")
        print("-" * (len(self.title) + 9))
        print(f"Overall: {status.value}")
        for check in self.checks:
            where = f" (degree {check.degree})" if check.degree is not None else ""
            at = f" @p^{check.precision}" if check.precision is not None else ""
            print(f"  [{check.status.value:>9}] {check.name}{where}{at} {check.detail}".rstrip())
            if check.witness is not None and not check.passed:
                print(f"              witness: {check.witness}")

        return None


class WindowReport(VerificationReport):
    """
    Report of the window axioms for one graded window.
    """
    title: str = "Window"
    frame: Optional[str] = None
    ranks: list[int] = Field(default_factory=list)
    l_ranks: list[int] = Field(default_factory=list)
    quotient_dims: list[int] = Field(default_factory=list)
    nilpotence_index: Optional[int] = None
    nilpotence_bound: Optional[int] = None

    def print_results(self) -> None:
        print(f"\nframe={self.frame} ranks={self.ranks} l_ranks={self.l_ranks}")
        if self.nilpotence_index is not None:
            print(f"psi is nilpotent mod p after {self.nilpotence_index} steps (bound {self.nilpotence_bound})")
        super().print_results()


class BaseVerifier(ABC):
    """
    Abstract base class for window verifiers.
    All verifiers should inherit from this class and implement the `verify` method.
    """
    data = None
    report = None

    @abstractmethod
    def _load_data(self, data) -> None:
        """
        Validate and store the object to verify.
        """
        pass

    @abstractmethod
    def verify(self, data) -> VerificationReport:
        """
        Verify the provided object and return a report.
        """
        pass
