"""
有限差分谱 (独立校验用)

只支持连续型顶点条件：kirchhoff、delta(α)、dirichlet、neumann。
每条边划分 n 个等长子区间，内部节点使用三点差分，顶点节点采用
集中质量 Σ h_e / 2；delta 条件在顶点刚度上加 α，Dirichlet 顶点被消去，
度数大于 1 的 Neumann 顶点各出射端互不耦合。

广义特征问题 K x = λ M x 用 scipy 稀疏移位反演求解，
并做 Richardson 外推 (4λ_{2n} - λ_n) / 3。
"""

import math
from typing import Dict, List, Optional, Tuple

import numpy as np
from loguru import logger
from scipy import sparse
from scipy.sparse.linalg import eigsh

from ..conditions import ConditionsAssignment, VertexConditions
from ..core.exceptions import SpectrumError
from ..graph import MetricGraph

# 判定零特征值的阈值
_ZERO_EIGENVALUE = 1e-6


def _vertex_kind(conditions: VertexConditions) -> Tuple[str, float]:
    label = conditions.label or ""
    if label == "kirchhoff" or (label == "neumann" and conditions.degree == 1):
        return "kirchhoff", 0.0
    if label == "anti_kirchhoff" and conditions.degree == 1:
        return "dirichlet", 0.0
    if label in ("dirichlet", "neumann"):
        return label, 0.0
    if label.startswith("delta"):
        d = conditions.degree
        alpha = float(np.real(conditions.Lambda[0, 0])) * d * d
        return "delta", alpha
    raise SpectrumError(f"有限差分校验不支持顶点条件 {conditions!r}")


def _assemble(
    graph: MetricGraph, assignment: ConditionsAssignment, n: int
) -> Tuple[sparse.csc_matrix, sparse.csc_matrix]:
    """组装刚度矩阵 K 与集中质量矩阵 M"""
    node_count = 0
    shared: Dict[str, Optional[int]] = {}
    robin: Dict[int, float] = {}
    kinds = {v: _vertex_kind(assignment[v]) for v in graph.vertices}

    for vertex in graph.vertices:
        kind, alpha = kinds[vertex]
        if kind in ("kirchhoff", "delta"):
            shared[vertex] = node_count
            if kind == "delta":
                robin[node_count] = alpha
            node_count += 1
        else:
            shared[vertex] = None

    def end_node(vertex: str) -> Optional[int]:
        nonlocal node_count
        kind, _ = kinds[vertex]
        if kind == "dirichlet":
            return None
        if kind == "neumann":
            node_count += 1
            return node_count - 1
        return shared[vertex]

    rows: List[int] = []
    cols: List[int] = []
    stiffness: List[float] = []
    mass: Dict[int, float] = {}

    for edge in graph.edges:
        h = edge.length / n
        tail = end_node(edge.tail)
        head = end_node(edge.head)
        interior = list(range(node_count, node_count + n - 1))
        node_count += n - 1
        chain = [tail] + interior + [head]

        for left, right in zip(chain[:-1], chain[1:]):
            for a, b, value in ((left, left, 1.0), (right, right, 1.0), (left, right, -1.0), (right, left, -1.0)):
                if a is not None and b is not None:
                    rows.append(a)
                    cols.append(b)
                    stiffness.append(value / h)
            for node in (left, right):
                if node is not None:
                    mass[node] = mass.get(node, 0.0) + 0.5 * h

    for node, alpha in robin.items():
        rows.append(node)
        cols.append(node)
        stiffness.append(alpha)

    K = sparse.coo_matrix((stiffness, (rows, cols)), shape=(node_count, node_count)).tocsc()
    diagonal = np.array([mass.get(i, 0.0) for i in range(node_count)])
    M = sparse.diags(diagonal).tocsc()
    return K, M


def _eigenvalues(
    graph: MetricGraph, assignment: ConditionsAssignment, n: int, count: int
) -> np.ndarray:
    K, M = _assemble(graph, assignment, n)
    size = K.shape[0]
    wanted = min(count + graph.E + graph.V, size - 1)
    values = eigsh(K, k=wanted, M=M, sigma=-1.0, which="LM", return_eigenvectors=False)
    values = np.sort(values)
    positive = values[values > _ZERO_EIGENVALUE]
    if positive.size < count:
        raise SpectrumError(f"有限差分只得到 {positive.size} 个正特征值，需要 {count} 个")
    return positive[:count]


def finite_difference_spectrum(
    graph: MetricGraph,
    assignment: ConditionsAssignment,
    n: int = 2000,
    count: int = 10,
    richardson: bool = True,
) -> np.ndarray:
    """
    有限差分求前 count 个正频率 k = √λ

    Args:
        graph: 度量图
        assignment: 连续型顶点条件
        n: 每条边的子区间数
        count: 所需正特征值个数
        richardson: 是否用 n 与 2n 两套网格做 Richardson 外推

    Returns:
        np.ndarray: 升序的前 count 个正频率
    """
    if n < 2:
        raise SpectrumError(f"每条边至少需要 2 个子区间: {n}")

    coarse = _eigenvalues(graph, assignment, n, count)
    if richardson:
        fine = _eigenvalues(graph, assignment, 2 * n, count)
        eigenvalues = (4.0 * fine - coarse) / 3.0
    else:
        eigenvalues = coarse

    logger.debug(f"有限差分谱: n={n}, 前 {count} 个特征值 λ1={eigenvalues[0]:.10g}")
    return np.sqrt(np.maximum(eigenvalues, 0.0))


def max_oracle_deviation(secular_roots: List[float], oracle_roots: np.ndarray) -> float:
    """久期根 (按重数展开) 与有限差分结果的最大偏差"""
    count = min(len(secular_roots), len(oracle_roots))
    if count == 0:
        return math.inf
    return float(np.max(np.abs(np.asarray(secular_roots[:count]) - oracle_roots[:count])))
