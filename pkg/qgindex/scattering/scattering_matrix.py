"""
散射矩阵

顶点散射矩阵 σ(v)(k) = -(A + ikB)⁻¹(A - ikB) 与全局键散射矩阵 S。
对尺度不变条件 σ = Q - P 与 k 无关 (Dirichlet 为 -1，Neumann 为 +1)。

全局组装：对顶点 v 及其出射键 out = incident_bonds(v)，
S[out[i], rev(out[j])] = σ[i, j]，即入射键通过其反转键寻址。
"""

import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np
from loguru import logger

from ..conditions import ConditionsAssignment, VertexConditions, is_scale_invariant, to_AB
from ..core.config_models import DEFAULT_CONFIG, ToleranceConfiguration
from ..core.exceptions import ScatteringError
from ..graph import MetricGraph
from ..models import ScaleInvarianceReport, VertexScaleInvariance

# A + ikB 的条件数上限
_MAX_CONDITION = 1e12
# 尺度不变性分类时 σ 比较的容差
_SIGMA_TOLERANCE = 1e-9


def _tolerances(tolerances: Optional[ToleranceConfiguration]) -> ToleranceConfiguration:
    return tolerances if tolerances is not None else DEFAULT_CONFIG.tolerances


def _sigma_from_AB(A: np.ndarray, B: np.ndarray, k: float) -> np.ndarray:
    lhs = A + 1j * k * B
    if np.linalg.cond(lhs) > _MAX_CONDITION:
        raise ScatteringError(f"A + ikB 在 k={k} 处奇异，顶点条件无效")
    return -np.linalg.solve(lhs, A - 1j * k * B)


def vertex_sigma(
    conditions: VertexConditions,
    k: float,
    tolerances: Optional[ToleranceConfiguration] = None,
) -> np.ndarray:
    """
    顶点散射矩阵

    Args:
        conditions: 顶点条件
        k: 非零实频率；尺度不变条件允许 k = 0 (结果与 k 无关)

    Returns:
        np.ndarray: d×d 酉矩阵
    """
    if k == 0.0:
        if not is_scale_invariant(conditions, tolerances):
            raise ScatteringError("k = 0 仅对尺度不变条件有定义")
        k = 1.0
    A, B = to_AB(conditions, tolerances)
    return _sigma_from_AB(A, B, k)


@dataclass(frozen=True, eq=False)
class ScatteringMatrix:
    """散射矩阵 (全局 2E×2E 或顶点 d×d)"""
    matrix: np.ndarray
    k: Optional[float] = None
    k_independent: bool = False

    def __post_init__(self) -> None:
        array = np.array(self.matrix, dtype=complex, copy=True)
        array.setflags(write=False)
        object.__setattr__(self, "matrix", array)

    @property
    def size(self) -> int:
        return int(self.matrix.shape[0])

    def unitarity_residual(self) -> float:
        """‖SS† - I‖_max"""
        return float(np.max(np.abs(self.matrix @ self.matrix.conj().T - np.eye(self.size))))

    def is_unitary(self, tolerances: Optional[ToleranceConfiguration] = None) -> bool:
        return self.unitarity_residual() < _tolerances(tolerances).unitarity

    def bond_reversed(self) -> np.ndarray:
        """S·R，R 为键反转置换 (按顶点分块对角)"""
        reversal = np.arange(self.size) ^ 1
        return self.matrix[:, reversal]

    def involution_residual(self) -> float:
        """‖(SR)² - I‖_max"""
        SR = self.bond_reversed()
        return float(np.max(np.abs(SR @ SR - np.eye(self.size))))

    def reflection_trace(self) -> complex:
        """Σ_α S_{α, rev α}"""
        bonds = np.arange(self.size)
        return complex(np.sum(self.matrix[bonds, bonds ^ 1]))

    def sparsity_violation(self, graph: MetricGraph) -> float:
        """S_{βα} 在 α 终点不等于 β 起点处的最大模"""
        allowed = np.zeros((self.size, self.size), dtype=bool)
        for vertex in graph.vertices:
            outgoing = np.asarray(graph.incident_bonds(vertex))
            allowed[np.ix_(outgoing, outgoing ^ 1)] = True
        masked = np.where(allowed, 0.0, np.abs(self.matrix))
        return float(np.max(masked)) if masked.size else 0.0


class ScatteringAssembler:
    """
    全局散射矩阵的组装器

    预先计算各顶点的 (A, B) 与键索引，重复求值 S(k) 时只做小矩阵求解。
    """

    def __init__(
        self,
        graph: MetricGraph,
        assignment: ConditionsAssignment,
        tolerances: Optional[ToleranceConfiguration] = None,
    ):
        assignment.check(graph, tolerances)
        self.graph = graph
        self.tolerances = _tolerances(tolerances)
        self.scale_invariant = assignment.is_scale_invariant(self.tolerances)

        self._blocks: List[Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]] = []
        for vertex in graph.vertices:
            A, B = to_AB(assignment[vertex], self.tolerances)
            outgoing = np.asarray(graph.incident_bonds(vertex), dtype=int)
            self._blocks.append((A, B, outgoing, outgoing ^ 1))

        self._fixed: Optional[np.ndarray] = None
        if self.scale_invariant:
            self._fixed = self._assemble(1.0)

    def _assemble(self, k: float) -> np.ndarray:
        size = self.graph.num_bonds
        S = np.zeros((size, size), dtype=complex)
        for A, B, outgoing, incoming in self._blocks:
            S[np.ix_(outgoing, incoming)] = _sigma_from_AB(A, B, k)
        return S

    def matrix(self, k: float) -> np.ndarray:
        if self._fixed is not None:
            return self._fixed
        if k == 0.0:
            raise ScatteringError("含 Robin 部分的条件在 k = 0 处散射矩阵无定义")
        return self._assemble(k)

    def __call__(self, k: float = 1.0) -> ScatteringMatrix:
        return ScatteringMatrix(
            matrix=self.matrix(k),
            k=None if self.scale_invariant else k,
            k_independent=self.scale_invariant,
        )


def global_S(
    graph: MetricGraph,
    assignment: ConditionsAssignment,
    k: float = 1.0,
    tolerances: Optional[ToleranceConfiguration] = None,
) -> ScatteringMatrix:
    """
    全局键散射矩阵

    Args:
        graph: 度量图
        assignment: 顶点条件分配
        k: 频率；尺度不变条件下结果与 k 无关

    Returns:
        ScatteringMatrix: 2E×2E 散射矩阵
    """
    return ScatteringAssembler(graph, assignment, tolerances)(k)


def dual_sign_check(
    graph: MetricGraph,
    assignment: ConditionsAssignment,
    tolerances: Optional[ToleranceConfiguration] = None,
) -> bool:
    """检查对偶条件的散射矩阵 S' = -S"""
    if not assignment.is_scale_invariant(tolerances):
        raise ScatteringError("对偶符号检查要求尺度不变条件")
    S = global_S(graph, assignment, tolerances=tolerances).matrix
    S_dual = global_S(graph, assignment.dual(tolerances), tolerances=tolerances).matrix
    residual = float(np.max(np.abs(S_dual + S)))
    logger.debug(f"对偶符号检查残差: {residual:.3e}")
    return residual < _tolerances(tolerances).projector_residual


def _is_identity(matrix: np.ndarray) -> bool:
    return bool(np.max(np.abs(matrix - np.eye(matrix.shape[0]))) < _SIGMA_TOLERANCE)


def classify_vertex(
    vertex: str,
    conditions: VertexConditions,
    tolerances: Optional[ToleranceConfiguration] = None,
) -> VertexScaleInvariance:
    """对单个顶点检验五个等价条件"""
    k1, k2 = 1.0, math.sqrt(2.0)
    sigma1 = vertex_sigma(conditions, k1, tolerances)
    sigma2 = vertex_sigma(conditions, k2, tolerances)

    square1 = _is_identity(sigma1 @ sigma1)
    square2 = _is_identity(sigma2 @ sigma2)

    hermitian = bool(np.max(np.abs(sigma1 - sigma1.conj().T)) < _SIGMA_TOLERANCE)
    reflection = False
    if hermitian:
        eigenvalues = np.linalg.eigvalsh((sigma1 + sigma1.conj().T) / 2.0)
        reflection = bool(np.all(np.abs(np.abs(eigenvalues) - 1.0) < _SIGMA_TOLERANCE))

    return VertexScaleInvariance(
        vertex=vertex,
        k_independent=bool(np.max(np.abs(sigma1 - sigma2)) < _SIGMA_TOLERANCE),
        involutive_at_some_k=square1 or square2,
        involutive_for_all_k=square1 and square2,
        reflection_form=reflection,
        no_robin_part=is_scale_invariant(conditions, tolerances),
    )


def classify_scale_invariance(
    assignment: ConditionsAssignment,
    tolerances: Optional[ToleranceConfiguration] = None,
) -> ScaleInvarianceReport:
    """
    尺度不变性分类

    对每个顶点在 k = 1 与 k = √2 处检验等价条件 (i)-(v)，
    (vi)、(vii) 作为蕴含结论列出。
    """
    verdicts = [classify_vertex(v, c, tolerances) for v, c in assignment.items()]
    report = ScaleInvarianceReport(vertices=verdicts)
    for verdict in verdicts:
        if not verdict.consistent:
            logger.warning(f"顶点 {verdict.vertex} 的尺度不变性判定互相矛盾: {verdict.verdicts}")
    return report


def strace_identity(
    graph: MetricGraph,
    assignment: ConditionsAssignment,
    tolerances: Optional[ToleranceConfiguration] = None,
) -> Dict[str, float]:
    """
    Σ_α S_{α,rev α} 与 2(E - p) 的比较

    Returns:
        dict: trace 实部、虚部以及与 2(E - p) 的差
    """
    if not assignment.is_scale_invariant(tolerances):
        raise ScatteringError("反射迹恒等式要求尺度不变条件")
    trace = global_S(graph, assignment, tolerances=tolerances).reflection_trace()
    expected = 2 * (graph.E - assignment.dirichlet_count())
    return {
        "real": trace.real,
        "imag": trace.imag,
        "expected": float(expected),
        "difference": abs(trace.real - expected),
    }
