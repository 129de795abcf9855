from sym_workbench.windows.base_verifier import CheckResult, CheckStatus, VerificationReport, WindowReport
from sym_workbench.windows.ext_powers import (
    MultiplicativeTwist,
    WindowMorphism,
    exterior_power,
    functorial_power,
    independence_check,
)
from sym_workbench.windows.window import (
    Frame,
    NormalDecomposition,
    PsiOperator,
    Window,
    dieudonne_from_window,
    frobenius_base_change,
    m1_submodule,
    normal_decomposition,
    psi_sharp,
    random_decomposition,
    special_fibre,
    structure_operator,
    window_from_dieudonne,
)
from sym_workbench.windows.window_verifier import WindowVerifier, verify_window

__all__ = [
    "CheckResult",
    "CheckStatus",
    "Frame",
    "MultiplicativeTwist",
    "NormalDecomposition",
    "PsiOperator",
    "VerificationReport",
    "Window",
    "WindowMorphism",
    "WindowReport",
    "WindowVerifier",
    "dieudonne_from_window",
    "exterior_power",
    "frobenius_base_change",
    "functorial_power",
    "independence_check",
    "m1_submodule",
    "normal_decomposition",
    "psi_sharp",
    "random_decomposition",
    "special_fibre",
    "structure_operator",
    "verify_window",
    "window_from_dieudonne",
]
