"""
预设顶点条件与随机生成器
"""

from typing import Optional

import numpy as np
from scipy.stats import unitary_group

from ..core.exceptions import VertexConditionError
from .vertex_conditions import VertexConditions

PRESET_NAMES = ("kirchhoff", "anti_kirchhoff", "dirichlet", "neumann", "delta")


def preset(name: str, degree: int, alpha: Optional[float] = None) -> VertexConditions:
    """
    构造预设顶点条件

    Args:
        name: kirchhoff | anti_kirchhoff | dirichlet | neumann | delta
        degree: 顶点度数 d >= 1
        alpha: delta 条件的耦合常数 (Σf' = α f(v))，必须非零

    Returns:
        VertexConditions: 预设条件
    """
    if degree < 1:
        raise VertexConditionError(f"顶点度数必须 >= 1: {degree}")

    identity = np.eye(degree, dtype=complex)
    zero = np.zeros((degree, degree), dtype=complex)
    averaging = np.full((degree, degree), 1.0 / degree, dtype=complex)

    if name == "kirchhoff":
        return VertexConditions(P=identity - averaging, Q=averaging, Lambda=zero, label=name)
    if name == "anti_kirchhoff":
        return VertexConditions(P=averaging, Q=identity - averaging, Lambda=zero, label=name)
    if name == "dirichlet":
        return VertexConditions(P=identity, Q=zero, Lambda=zero, label=name)
    if name == "neumann":
        return VertexConditions(P=zero, Q=identity, Lambda=zero, label=name)
    if name == "delta":
        if alpha is None:
            raise VertexConditionError("delta 条件需要耦合常数 alpha")
        alpha = float(alpha)
        if alpha == 0.0 or not np.isfinite(alpha):
            raise VertexConditionError(
                f"delta 耦合常数必须为非零有限实数 (alpha=0 即 Kirchhoff): {alpha}"
            )
        return VertexConditions(
            P=identity - averaging,
            Q=zero,
            Lambda=(alpha / degree) * averaging,
            label=f"delta({alpha!r})",
        )

    raise VertexConditionError(f"未知的预设条件: {name}")


def haar_unitary(degree: int, rng: np.random.Generator) -> np.ndarray:
    """Haar 分布的随机酉矩阵"""
    if degree == 1:
        return np.array([[np.exp(2j * np.pi * rng.random())]])
    return unitary_group.rvs(degree, random_state=rng)


def random_scale_invariant(degree: int, rng: np.random.Generator) -> VertexConditions:
    """
    随机尺度不变条件

    取 Haar 酉矩阵前 r 列张成的投影作为 P，r 在 [0, d] 上均匀，Q = I - P。
    """
    unitary = haar_unitary(degree, rng)
    rank = int(rng.integers(0, degree + 1))
    columns = unitary[:, :rank]
    P = columns @ columns.conj().T
    # 保证数值上严格厄米
    P = (P + P.conj().T) / 2.0
    return VertexConditions(
        P=P,
        Q=np.eye(degree) - P,
        Lambda=np.zeros((degree, degree), dtype=complex),
    )
