"""
指标定理模块
"""

from .index_theorems import (
    index_formula,
    index_general_order,
    euler_and_cycles,
    incidence_index,
    full_index_report,
)

__all__ = [
    "index_formula",
    "index_general_order",
    "euler_and_cycles",
    "incidence_index",
    "full_index_report",
]
