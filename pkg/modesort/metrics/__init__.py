from .figures import (
    QKDFigures,
    qkd_figures,
    selectivities,
    selectivity,
    separabilities,
    separability,
    sub_matrix,
)

__all__ = [
    "QKDFigures",
    "qkd_figures",
    "separability",
    "separabilities",
    "selectivity",
    "selectivities",
    "sub_matrix",
]
