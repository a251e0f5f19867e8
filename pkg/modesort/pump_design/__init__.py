from .projection import MAX_DISCARDED_FRACTION, CombProjection, line_coefficients, project_to_comb
from .designer import (
    DEFAULT_POWER_BUDGET_MW,
    WARM_STARTS,
    DesignProblem,
    DesignResult,
    NelderMeadRefinement,
    RayleighWarmStart,
    TimeReversedWarmStart,
    design_pump,
    design_pumps,
)

__all__ = [
    "design_pump",
    "design_pumps",
    "project_to_comb",
    "line_coefficients",
    "CombProjection",
    "DesignProblem",
    "DesignResult",
    "RayleighWarmStart",
    "TimeReversedWarmStart",
    "NelderMeadRefinement",
    "WARM_STARTS",
    "DEFAULT_POWER_BUDGET_MW",
    "MAX_DISCARDED_FRACTION",
]
