"""
顶点条件模块
"""

from .vertex_conditions import (
    VertexConditions,
    validate,
    require_valid,
    to_AB,
    from_AB,
    dual,
    is_scale_invariant,
    solution_subspace,
    same_solution_subspace,
    projector_rank,
    range_basis,
)
from .presets import PRESET_NAMES, preset, haar_unitary, random_scale_invariant
from .assignment import (
    ConditionsAssignment,
    dirichlet_count,
    uniform_assignment,
    random_scale_invariant_assignment,
    insert_kirchhoff_vertex,
    normalize_loops_with_conditions,
)

__all__ = [
    # 顶点条件
    "VertexConditions",
    "validate",
    "require_valid",
    "to_AB",
    "from_AB",
    "dual",
    "is_scale_invariant",
    "solution_subspace",
    "same_solution_subspace",
    "projector_rank",
    "range_basis",

    # 预设与随机生成
    "PRESET_NAMES",
    "preset",
    "haar_unitary",
    "random_scale_invariant",

    # 条件分配
    "ConditionsAssignment",
    "dirichlet_count",
    "uniform_assignment",
    "random_scale_invariant_assignment",
    "insert_kirchhoff_vertex",
    "normalize_loops_with_conditions",
]
