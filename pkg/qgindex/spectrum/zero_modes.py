"""
零模计数

N0   = dim ker H   : 每条边上常数函数 c_e 满足 P_v F(v) = 0
N0*  = dim ker H'  : 1-形式，F(v) 中边 e 的值带方向符号，满足 Q_v F(v) = 0
Ñ    = k = 0 作为 f(k) 零点的代数重数，由环绕数 (1/2πi)∮ f'/f dk 计算
"""

import math
from typing import Optional

import numpy as np
from loguru import logger

from ..conditions import ConditionsAssignment
from ..core.config_models import DEFAULT_CONFIG, ApplicationConfiguration
from ..core.exceptions import SpectrumError
from ..graph import MetricGraph, bond_edge
from ..models import SpectralData
from .secular import SecularSystem, find_spectrum

# 零模线性系统的奇异值阈值
_NULL_THRESHOLD = 1e-10


def _require_scale_invariant(assignment: ConditionsAssignment, operation: str) -> None:
    if not assignment.is_scale_invariant():
        raise SpectrumError(f"{operation} 要求尺度不变顶点条件 (H = A*A)")


def _nullity(rows: np.ndarray, columns: int) -> int:
    if rows.size == 0:
        return columns
    singular = np.linalg.svd(rows, compute_uv=False)
    return columns - int(np.sum(singular > _NULL_THRESHOLD))


def _constant_mode_system(
    graph: MetricGraph,
    assignment: ConditionsAssignment,
    dual: bool,
) -> np.ndarray:
    blocks = []
    for vertex in graph.vertices:
        outgoing = graph.incident_bonds(vertex)
        incidence = np.zeros((len(outgoing), graph.E))
        for row, bond in enumerate(outgoing):
            # 1-形式在 head 端取反号
            sign = -1.0 if (dual and bond % 2 == 1) else 1.0
            incidence[row, bond_edge(bond)] += sign
        projector = assignment[vertex].Q if dual else assignment[vertex].P
        blocks.append(projector @ incidence)
    return np.vstack(blocks)


def kernel_dim(graph: MetricGraph, assignment: ConditionsAssignment) -> int:
    """N0 = dim ker H"""
    _require_scale_invariant(assignment, "kernel_dim")
    assignment.check(graph)
    return _nullity(_constant_mode_system(graph, assignment, dual=False), graph.E)


def kernel_dim_dual(graph: MetricGraph, assignment: ConditionsAssignment) -> int:
    """N0* = dim ker H' (对偶算子作用于 1-形式)"""
    _require_scale_invariant(assignment, "kernel_dim_dual")
    assignment.check(graph)
    return _nullity(_constant_mode_system(graph, assignment, dual=True), graph.E)


def zero_root_multiplicity_from_S(
    S: np.ndarray,
    config: Optional[ApplicationConfiguration] = None,
) -> int:
    """S 的等于 1 的特征值个数 (尺度不变情形下等于 Ñ)"""
    window = (config or DEFAULT_CONFIG).spectrum.multiplicity_window
    return int(np.sum(np.abs(np.linalg.eigvals(S) - 1.0) < window))


def first_positive_root(
    graph: MetricGraph,
    assignment: ConditionsAssignment,
    config: Optional[ApplicationConfiguration] = None,
) -> float:
    """最小正根 k1，k_max 从 π/L 起倍增搜索"""
    k_max = math.pi / graph.total_length
    for _ in range(60):
        roots = find_spectrum(graph, assignment, k_max, config=config)
        if roots:
            return roots[0].k
        k_max *= 2.0
    raise SpectrumError("未找到正根")


def algebraic_multiplicity_zero(
    graph: MetricGraph,
    assignment: ConditionsAssignment,
    config: Optional[ApplicationConfiguration] = None,
) -> int:
    """
    Ñ：f(k) 在 k = 0 处的零点阶数

    在半径 r = min(k1/2, 0.5) 的圆周上累加 arg f 的增量，采样点数从
    初始值倍增，直到相邻采样的相位跳变小于 π/4 且结果在容差内为整数。
    f 的相位取自 slogdet 的复符号，避免 det 上溢/下溢。

    Raises:
        SpectrumError: 非尺度不变输入、f 条件数过差或环绕数不收敛
    """
    _require_scale_invariant(assignment, "algebraic_multiplicity_zero")
    config = config or DEFAULT_CONFIG
    spectrum = config.spectrum

    system = SecularSystem(graph, assignment, config)
    radius = min(0.5 * first_positive_root(graph, assignment, config), 0.5)
    size = graph.num_bonds

    samples = spectrum.winding_initial_samples
    winding = float("nan")
    while samples <= spectrum.winding_max_samples:
        angles = np.linspace(0.0, 2.0 * math.pi, samples, endpoint=False)
        ks = radius * np.exp(1j * angles)
        signs, logs = np.linalg.slogdet(system.batch_U(ks) - np.eye(size)[None, :, :])
        if np.any(~np.isfinite(logs)) or np.any(np.abs(logs) > 700.0):
            raise SpectrumError(f"环绕数计算中 f 条件数过差 (半径 {radius})")

        phases = np.angle(np.append(signs, signs[0]))
        increments = np.angle(np.exp(1j * np.diff(phases)))
        winding = float(np.sum(increments) / (2.0 * math.pi))
        resolved = float(np.max(np.abs(increments))) < math.pi / 4.0
        if resolved and abs(winding - round(winding)) < spectrum.winding_integer_tolerance:
            logger.debug(f"环绕数 {winding:.6f} (采样 {samples}, 半径 {radius:.4g})")
            return int(round(winding))
        samples *= 2

    raise SpectrumError(f"环绕数未收敛到整数: {winding}")


def compute_spectral_data(
    graph: MetricGraph,
    assignment: ConditionsAssignment,
    k_max: float,
    tol: Optional[float] = None,
    config: Optional[ApplicationConfiguration] = None,
) -> SpectralData:
    """
    谱数据：正根以及 (尺度不变时) N0、N0*、Ñ

    Robin 条件下 N0 取 0 (假定无负谱且 0 不是特征值)，N0*、Ñ 不计算。
    """
    roots = find_spectrum(graph, assignment, k_max, tol, config)
    if not assignment.is_scale_invariant():
        return SpectralData(roots=roots, k_max=k_max, N0=0)
    return SpectralData(
        roots=roots,
        k_max=k_max,
        N0=kernel_dim(graph, assignment),
        N0_dual=kernel_dim_dual(graph, assignment),
        Ntilde=algebraic_multiplicity_zero(graph, assignment, config),
    )
