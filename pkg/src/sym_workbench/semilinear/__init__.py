from sym_workbench.semilinear.graded_module import GradedSigmaModule, SigmaLinearMap, compose_cycle
from sym_workbench.semilinear.multilinear import dual, sym_power, tensor, wedge_power
from sym_workbench.semilinear.slopes import (
    NewtonPolygon,
    Skeleton,
    SlopeMultiset,
    generic_slopes,
    graded_slopes,
    skeleton,
    ungraded_slopes,
)

__all__ = [
    "GradedSigmaModule",
    "NewtonPolygon",
    "SigmaLinearMap",
    "Skeleton",
    "SlopeMultiset",
    "compose_cycle",
    "dual",
    "generic_slopes",
    "graded_slopes",
    "skeleton",
    "sym_power",
    "tensor",
    "ungraded_slopes",
    "wedge_power",
]
