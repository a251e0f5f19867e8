from .visibility import fringe_powers, fringe_visibility, visibility, visibility_scan
from .alignment import DEFAULT_TAU_GRID, AlignmentResult, align_set

__all__ = [
    "visibility",
    "visibility_scan",
    "fringe_visibility",
    "fringe_powers",
    "align_set",
    "AlignmentResult",
    "DEFAULT_TAU_GRID",
]
