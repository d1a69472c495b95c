"""
热迹模块
"""

from .walks import (
    PERIODIC,
    BOUNCE,
    WalkClass,
    WalkEnumeration,
    enumerate_walks,
    enumerate_all_walks,
)
from .heat_trace import (
    heat_kernel_free,
    weyl_term,
    spectral_tail_bound,
    spectral_heat_trace,
    spectral_heat_trace_result,
    constant_term_from_S,
    auto_cutoff,
    path_sum_heat_trace,
    bounce_sum,
    index_via_two_traces,
)

__all__ = [
    # 路径类
    "PERIODIC",
    "BOUNCE",
    "WalkClass",
    "WalkEnumeration",
    "enumerate_walks",
    "enumerate_all_walks",

    # 热迹
    "heat_kernel_free",
    "weyl_term",
    "spectral_tail_bound",
    "spectral_heat_trace",
    "spectral_heat_trace_result",
    "constant_term_from_S",
    "auto_cutoff",
    "path_sum_heat_trace",
    "bounce_sum",
    "index_via_two_traces",
]
