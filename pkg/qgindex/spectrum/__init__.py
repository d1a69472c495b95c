"""
谱计算模块

久期方程求根、零模计数以及有限差分校验。
"""

from .secular import (
    SecularSystem,
    secular_matrix,
    secular_function,
    find_spectrum,
    weyl_check,
)
from .zero_modes import (
    kernel_dim,
    kernel_dim_dual,
    zero_root_multiplicity_from_S,
    first_positive_root,
    algebraic_multiplicity_zero,
    compute_spectral_data,
)
from .oracle import finite_difference_spectrum, max_oracle_deviation

__all__ = [
    # 久期方程
    "SecularSystem",
    "secular_matrix",
    "secular_function",
    "find_spectrum",
    "weyl_check",

    # 零模
    "kernel_dim",
    "kernel_dim_dual",
    "zero_root_multiplicity_from_S",
    "first_positive_root",
    "algebraic_multiplicity_zero",
    "compute_spectral_data",

    # 有限差分
    "finite_difference_spectrum",
    "max_oracle_deviation",
]
