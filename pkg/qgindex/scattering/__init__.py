"""
散射矩阵模块
"""

from .scattering_matrix import (
    ScatteringMatrix,
    ScatteringAssembler,
    vertex_sigma,
    global_S,
    dual_sign_check,
    classify_vertex,
    classify_scale_invariance,
    strace_identity,
)

__all__ = [
    "ScatteringMatrix",
    "ScatteringAssembler",
    "vertex_sigma",
    "global_S",
    "dual_sign_check",
    "classify_vertex",
    "classify_scale_invariance",
    "strace_identity",
]
