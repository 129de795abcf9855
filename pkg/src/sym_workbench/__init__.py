"""
Exact finite-precision arithmetic for graded sigma-linear algebra: windows,
formal Sym-structures, their deformations, connections and Dwork trivializations.
"""
import sys

from sym_workbench.harness.cli import main as cli_main


def main() -> None:
    sys.exit(cli_main())
