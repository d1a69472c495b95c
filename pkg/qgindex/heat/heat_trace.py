"""
热迹

两条独立途径计算 Tr e^{-tH}：
  - 谱求和 N0 + Σ mult·e^{-k²t}
  - 闭合路径 (像) 求和：Weyl 项 L/√(4πt)、周期类 A·L_e·K0(t, L_e + c)、
    反弹类 A·¼[erf((c + 2L_e)/√(4t)) - erf(c/√(4t))]

其中 K0(t, x) = (4πt)^{-1/2} e^{-x²/4t}。常数 (拓扑) 项为 ¼ Σ_α S_{α,rev α}。
"""

import math
from typing import Dict, Optional, Sequence

import numpy as np
from loguru import logger
from scipy.special import erf, erfc

from ..conditions import ConditionsAssignment
from ..core.config_models import DEFAULT_CONFIG, ApplicationConfiguration
from ..core.exceptions import ConsistencyError, HeatTraceError
from ..graph import MetricGraph
from ..models import HeatTraceResult, SpectralData
from ..scattering import ScatteringMatrix, global_S
from .walks import BOUNCE, PERIODIC, WalkEnumeration, enumerate_all_walks


def heat_kernel_free(t: float, x) -> np.ndarray:
    """直线上的热核 K0(t, x)"""
    return np.exp(-np.square(x) / (4.0 * t)) / math.sqrt(4.0 * math.pi * t)


def weyl_term(total_length: float, t: float) -> float:
    return total_length / math.sqrt(4.0 * math.pi * t)


def spectral_tail_bound(total_length: float, k_max: float, t: float) -> float:
    """k > k_max 部分的估计 (L/√(4πt))·erfc(k_max √t)"""
    return weyl_term(total_length, t) * float(erfc(k_max * math.sqrt(t)))


def spectral_heat_trace(
    spectrum: SpectralData,
    t: float,
    config: Optional[ApplicationConfiguration] = None,
    zero_modes: Optional[int] = None,
) -> float:
    """
    谱求和热迹 N0 + Σ mult·e^{-k_n² t}

    Args:
        spectrum: 谱数据 (k_max 需不小于 √(-ln ε / t))
        t: 时间 t > 0
        zero_modes: 替代 spectrum.N0 的零模数 (对偶算子使用 N0*)

    Raises:
        HeatTraceError: t 非正或 k_max 不足
    """
    config = config or DEFAULT_CONFIG
    if not t > 0.0:
        raise HeatTraceError(f"时间 t 必须为正: {t}")
    required = config.heat_trace.spectral_k_max(t)
    if spectrum.k_max < required * (1.0 - 1e-12):
        raise HeatTraceError(
            f"谱数据 k_max={spectrum.k_max:.6g} 不足，t={t} 需要至少 {required:.6g}"
        )
    N0 = spectrum.N0 if zero_modes is None else zero_modes
    eigenvalues = np.array([root.eigenvalue for root in spectrum.roots])
    multiplicities = np.array([root.multiplicity for root in spectrum.roots])
    return float(N0 + np.sum(multiplicities * np.exp(-eigenvalues * t)))


def constant_term_from_S(graph: MetricGraph, S: ScatteringMatrix) -> float:
    """
    常数项 ¼ Σ_α S_{α,rev α}

    Raises:
        HeatTraceError: S 依赖 k (非尺度不变)
        ConsistencyError: 迹的虚部不可忽略
    """
    if not S.k_independent:
        raise HeatTraceError("常数项公式要求与 k 无关的散射矩阵")
    if S.size != graph.num_bonds:
        raise HeatTraceError(f"散射矩阵尺寸 {S.size} 与键数 {graph.num_bonds} 不符")
    trace = S.reflection_trace()
    if abs(trace.imag) > 1e-12:
        raise ConsistencyError(f"Σ S_(α,rev α) 的虚部 {trace.imag:.3e} 不可忽略")
    return 0.25 * trace.real


def auto_cutoff(
    graph: MetricGraph,
    t: float,
    config: Optional[ApplicationConfiguration] = None,
) -> float:
    """
    自动长度截断

    取满足 K0(t, Λ)·L·d_max^{Λ/ℓ_min} < 目标误差 的最小 Λ，
    即二次方程 Λ²/4t - (ln d_max/ℓ_min)Λ - (ln L - ½ln(4πt) - ln ε) = 0 的正根。
    """
    config = config or DEFAULT_CONFIG
    target = config.heat_trace.truncation_target
    max_degree = max(graph.degrees().values())
    shortest = min(edge.length for edge in graph.edges)

    a = 1.0 / (4.0 * t)
    b = math.log(max_degree) / shortest
    c = math.log(graph.total_length) - 0.5 * math.log(4.0 * math.pi * t) - math.log(target)
    discriminant = b * b + 4.0 * a * max(c, 0.0)
    return (b + math.sqrt(discriminant)) / (2.0 * a)


def _contributions(
    graph: MetricGraph,
    enumeration: WalkEnumeration,
    t: float,
    form_degree: int,
) -> Dict[str, float]:
    if not enumeration.walks:
        return {PERIODIC: 0.0, BOUNCE: 0.0}

    base_lengths = graph.bond_lengths()[::2]
    amplitude = np.array([w.amplitude for w in enumeration.walks])
    length = np.array([w.length for w in enumeration.walks])
    base = np.array([base_lengths[w.base_edge] for w in enumeration.walks])
    periodic = np.array([w.kind == PERIODIC for w in enumeration.walks])

    if form_degree == 1:
        # 1-形式每完整经过一条边取一次方向符号
        traversals = np.array([w.traversals for w in enumeration.walks])
        amplitude = amplitude * np.where(traversals % 2 == 0, 1.0, -1.0)

    scale = math.sqrt(4.0 * t)
    periodic_terms = amplitude * base * heat_kernel_free(t, base + length)
    bounce_terms = amplitude * 0.25 * (erf((length + 2.0 * base) / scale) - erf(length / scale))

    periodic_sum = complex(np.sum(periodic_terms[periodic]))
    bounce_sum = complex(np.sum(bounce_terms[~periodic]))
    imaginary = abs(periodic_sum.imag) + abs(bounce_sum.imag)
    if imaginary > 1e-8:
        logger.warning(f"路径求和虚部 {imaginary:.3e} 未抵消")
    return {PERIODIC: periodic_sum.real, BOUNCE: bounce_sum.real}


def path_sum_heat_trace(
    graph: MetricGraph,
    S: ScatteringMatrix,
    t: float,
    cutoff: Optional[float] = None,
    config: Optional[ApplicationConfiguration] = None,
    form_degree: int = 0,
    tolerance: Optional[float] = None,
) -> HeatTraceResult:
    """
    路径求和热迹

    Args:
        graph: 度量图
        S: 与 k 无关的全局散射矩阵
        t: 时间 t > 0
        cutoff: 长度截断 Λc，None 表示自动选取
        config: 应用配置
        form_degree: 0 为函数，1 为 1-形式 (对偶算子，S 应为对偶散射矩阵)
        tolerance: 允许的截断误差，超出时报错；None 表示不检查

    Returns:
        HeatTraceResult: total = weyl + constant + orbit_sum
    """
    config = config or DEFAULT_CONFIG
    if not t > 0.0:
        raise HeatTraceError(f"时间 t 必须为正: {t}")
    if form_degree not in (0, 1):
        raise HeatTraceError(f"form_degree 只能为 0 或 1: {form_degree}")
    if not S.k_independent:
        raise HeatTraceError("路径求和要求尺度不变条件 (散射矩阵与 k 无关)")

    cutoff = auto_cutoff(graph, t, config) if cutoff is None else float(cutoff)
    enumeration = enumerate_all_walks(graph, S.matrix, cutoff, config)
    parts = _contributions(graph, enumeration, t, form_degree)

    weyl = weyl_term(graph.total_length, t)
    total = weyl + parts[PERIODIC] + parts[BOUNCE]
    constant = constant_term_from_S(graph, S)

    bound = enumeration.frontier * heat_kernel_free(t, cutoff) * max(
        graph.total_length, math.sqrt(math.pi * t)
    )
    bound = float(bound)
    if tolerance is not None and bound > tolerance:
        raise HeatTraceError(
            f"长度截断 {cutoff:.4g} 不足：截断误差估计 {bound:.3e} 超过 {tolerance:.1e}"
        )

    logger.debug(
        f"路径求和: t={t}, Λc={cutoff:.4g}, 路径类 {len(enumeration.walks)}, "
        f"反弹 {parts[BOUNCE]:.12g}, 周期 {parts[PERIODIC]:.3e}"
    )
    return HeatTraceResult(
        t=t,
        total=total,
        weyl=weyl,
        constant=constant,
        orbit_sum=total - weyl - constant,
        truncation_bound=bound,
        method="paths",
    )


def spectral_heat_trace_result(
    graph: MetricGraph,
    spectrum: SpectralData,
    t: float,
    constant: float,
    config: Optional[ApplicationConfiguration] = None,
) -> HeatTraceResult:
    """谱求和热迹的完整结果，截断误差为谱尾估计"""
    total = spectral_heat_trace(spectrum, t, config)
    weyl = weyl_term(graph.total_length, t)
    return HeatTraceResult(
        t=t,
        total=total,
        weyl=weyl,
        constant=constant,
        orbit_sum=total - weyl - constant,
        truncation_bound=spectral_tail_bound(graph.total_length, spectrum.k_max, t),
        method="spectral",
    )


def bounce_sum(
    graph: MetricGraph,
    S: ScatteringMatrix,
    t: float,
    cutoff: Optional[float] = None,
    config: Optional[ApplicationConfiguration] = None,
) -> float:
    """仅反弹类的贡献 (截断趋于无穷时收敛到常数项)"""
    config = config or DEFAULT_CONFIG
    cutoff = auto_cutoff(graph, t, config) if cutoff is None else cutoff
    enumeration = enumerate_all_walks(graph, S.matrix, cutoff, config)
    return _contributions(graph, enumeration, t, 0)[BOUNCE]


def index_via_two_traces(
    graph: MetricGraph,
    assignment: ConditionsAssignment,
    t: float,
    config: Optional[ApplicationConfiguration] = None,
    probe_times: Optional[Sequence[float]] = None,
) -> float:
    """
    index A = Tr K - Tr K'

    对原条件 (函数) 与逐顶点对偶条件 (1-形式) 各做一次路径求和并相减，
    检验差值在探测时间上与 t 无关，且等于两倍常数项。

    Raises:
        HeatTraceError: 非尺度不变输入
        ConsistencyError: 差值依赖 t 或与两倍常数项不符
    """
    config = config or DEFAULT_CONFIG
    if not assignment.is_scale_invariant(config.tolerances):
        raise HeatTraceError("index_via_two_traces 要求尺度不变条件")

    S = global_S(graph, assignment, tolerances=config.tolerances)
    S_dual = global_S(graph, assignment.dual(config.tolerances), tolerances=config.tolerances)

    def difference(time: float) -> float:
        primal = path_sum_heat_trace(graph, S, time, config=config)
        dual = path_sum_heat_trace(graph, S_dual, time, config=config, form_degree=1)
        return primal.total - dual.total

    value = difference(t)
    heat = config.heat_trace
    times = list(probe_times if probe_times is not None else heat.probe_times)
    for probe in times:
        other = value if probe == t else difference(probe)
        if abs(other - value) > heat.t_independence_tolerance:
            raise ConsistencyError(
                f"Tr K - Tr K' 随 t 变化: t={t} 时 {value:.12g}, t={probe} 时 {other:.12g}"
            )

    twice_constant = 2.0 * constant_term_from_S(graph, S)
    if abs(value - twice_constant) > heat.constant_match_tolerance:
        raise ConsistencyError(
            f"Tr K - Tr K' = {value:.12g} 与两倍常数项 {twice_constant:.12g} 不符"
        )
    logger.info(f"Tr K - Tr K' = {value:.12g} (t={t})")
    return value
