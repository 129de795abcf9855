from sym_workbench.local_model.charts import (
    ChartPoint,
    ChartPresentation,
    ChartReport,
    ChartSpec,
    MembershipResult,
    chart_presentation,
    equivalence_report,
    membership_check,
    perturb,
    sample_point,
)

__all__ = [
    "ChartPoint",
    "ChartPresentation",
    "ChartReport",
    "ChartSpec",
    "MembershipResult",
    "chart_presentation",
    "equivalence_report",
    "membership_check",
    "perturb",
    "sample_point",
]
