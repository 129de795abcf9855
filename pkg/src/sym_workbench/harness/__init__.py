from sym_workbench.harness.config import RunConfig, SweepRanges, git_describe
from sym_workbench.harness.sweep import SweepInstance, enumerate_instances, run_instance, run_sweep, summarize
from sym_workbench.harness.cli import build_parser, main

__all__ = [
    "RunConfig",
    "SweepInstance",
    "SweepRanges",
    "build_parser",
    "enumerate_instances",
    "git_describe",
    "main",
    "run_instance",
    "run_sweep",
    "summarize",
]
