from sym_workbench.structures.connection import Connection, ConnectionReport, solve_connection, verify_connection
from sym_workbench.structures.deformation import (
    Alternative,
    DeformationSequence,
    DeformedWindow,
    SuffReport,
    check_suff,
    deform_M,
    deform_N,
    enumerate_deformation_sequences,
    find_deformation_sequence,
)
from sym_workbench.structures.dwork import (
    DworkData,
    DworkReport,
    VelfReport,
    check_velf,
    descent_datum,
    dwork_theta,
    verify_dwork,
)
from sym_workbench.structures.sym_structure import (
    SymReport,
    SymSpec,
    SymStructure,
    build_M,
    build_N,
    build_Ni,
    build_sym,
    choose_parameters,
    sym_power_rep,
    verify_sym,
)

__all__ = [
    "Alternative",
    "Connection",
    "ConnectionReport",
    "DeformationSequence",
    "DeformedWindow",
    "DworkData",
    "DworkReport",
    "SuffReport",
    "SymReport",
    "SymSpec",
    "SymStructure",
    "VelfReport",
    "build_M",
    "build_N",
    "build_Ni",
    "build_sym",
    "check_suff",
    "check_velf",
    "choose_parameters",
    "deform_M",
    "deform_N",
    "descent_datum",
    "dwork_theta",
    "enumerate_deformation_sequences",
    "find_deformation_sequence",
    "solve_connection",
    "sym_power_rep",
    "verify_connection",
    "verify_dwork",
    "verify_sym",
]
