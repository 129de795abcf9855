"""
Exception hierarchy shared by every layer of the workbench.

The CLI maps the three top-level families onto exit codes: input problems (2),
exhausted precision (3) and failed verifications (1).
"""


class WorkbenchError(Exception):
    """Base class for all workbench errors."""


class InputError(WorkbenchError, ValueError):
    """Invalid parameters, specs, files or preconditions."""


class PrecisionError(WorkbenchError, ArithmeticError):
    """The requested statement cannot be certified at the working precision."""


class DenominatorBudgetError(PrecisionError):
    """A value needs more powers of p in its denominator than the budget D allows."""


class TruncationError(PrecisionError):
    """A t-adic quantity is not stable between truncation orders T and 2T."""


class RingConstructionError(WorkbenchError):
    """Root refinement for the Frobenius table did not stabilise."""


class NotIsoclinalError(WorkbenchError, ValueError):
    """A single-slope operation was called on a module with several slopes."""


class MissingSkeletonError(WorkbenchError):
    """No complete skeleton exists over the residue field in use."""


class SingularMatrixError(WorkbenchError, ArithmeticError):
    """A matrix expected to be invertible over the coefficient ring is not."""


class VerificationError(WorkbenchError):
    """A construction produced data violating one of its defining identities."""


class LadderStuckError(VerificationError):
    pass


class ConsistencyError(VerificationError):
    pass


class IntegralityError(VerificationError):
    pass


class LatticeError(VerificationError):
    pass


class NonConvergenceError(VerificationError):
    pass


class SequenceNotFoundError(VerificationError):
    pass


EXIT_OK = 0
EXIT_VERIFICATION = 1
EXIT_INPUT = 2
EXIT_PRECISION = 3


def exit_code_for(error: BaseException) -> int:
    """
    Map an exception onto the CLI exit code contract.
    """
    if isinstance(error, PrecisionError):
        return EXIT_PRECISION
    if isinstance(error, (InputError, NotIsoclinalError, MissingSkeletonError, ValueError, FileNotFoundError)):
        return EXIT_INPUT
    return EXIT_VERIFICATION
