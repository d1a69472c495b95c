"""
指标定理

index A 的各条计算途径及其一致性报告：
  公式     E - p
  核维数   N0 - N0*
  反射迹   ½ Σ_α S_{α,rev α}
  热迹     Tr K - Tr K' (t = t_ref)
以及 Ñ = 2N0 - index A = N0 + N0*。
"""

from typing import Callable, Dict, List, Optional, TypeVar

import numpy as np
from loguru import logger

from ..conditions import ConditionsAssignment, dirichlet_count
from ..core.config_models import DEFAULT_CONFIG, ApplicationConfiguration
from ..core.exceptions import QuantumGraphError
from ..graph import MetricGraph
from ..heat import constant_term_from_S, index_via_two_traces
from ..models import IndexReport, Verdict
from ..scattering import global_S
from ..spectrum import algebraic_multiplicity_zero, kernel_dim, kernel_dim_dual

T = TypeVar("T")


def index_formula(graph: MetricGraph, assignment: ConditionsAssignment) -> int:
    """index A = E - p"""
    return graph.E - dirichlet_count(assignment)


def index_general_order(m: int, E: int, p: int) -> int:
    """m 阶算子的指标 mE - p"""
    if m < 1 or E < 1 or p < 0:
        raise QuantumGraphError(f"参数非法: m={m}, E={E}, p={p}")
    return m * E - p


def euler_and_cycles(graph: MetricGraph) -> Dict[str, int]:
    """
    Euler 示性数与圈数

    Returns:
        dict: chi = V - E, C = 连通分支数, kirchhoff_kernel = C,
              anti_kirchhoff_kernel = E - V + C；连通时另含 rank = E - V + 1
    """
    components, _ = graph.connected_components()
    result = {
        "chi": graph.V - graph.E,
        "C": components,
        "kirchhoff_kernel": components,
        "anti_kirchhoff_kernel": graph.E - graph.V + components,
    }
    if components == 1:
        result["rank"] = graph.E - graph.V + 1
    return result


def incidence_index(graph: MetricGraph) -> int:
    """
    关联矩阵的指标 dim ker M - dim coker M

    由奇异值计算秩，结果必为 E - V。
    """
    matrix = graph.incidence_matrix().astype(float)
    rank = int(np.linalg.matrix_rank(matrix))
    index = (graph.E - rank) - (graph.V - rank)
    if index != graph.E - graph.V:
        raise QuantumGraphError(f"关联矩阵指标 {index} 不等于 E - V = {graph.E - graph.V}")
    return index


def _attempt(name: str, failures: List[Verdict], compute: Callable[[], T]) -> Optional[T]:
    """执行子途径，失败时记录为 FAIL 判定"""
    try:
        return compute()
    except Exception as e:
        logger.error(f"{name} 计算失败: {e}")
        failures.append(Verdict(name=name, passed=False, detail=str(e)))
        return None


def full_index_report(
    graph: MetricGraph,
    assignment: ConditionsAssignment,
    t_ref: Optional[float] = None,
    config: Optional[ApplicationConfiguration] = None,
) -> IndexReport:
    """
    生成完整指标报告

    子途径的异常不会向外抛出，而是记录为失败判定。

    Args:
        graph: 度量图
        assignment: 尺度不变顶点条件
        t_ref: 热迹参考时间，默认取配置 heat_trace.t_ref
        config: 应用配置

    Returns:
        IndexReport: 各途径结果及一致性判定
    """
    config = config or DEFAULT_CONFIG
    t_ref = config.heat_trace.t_ref if t_ref is None else t_ref
    verdicts: List[Verdict] = []

    p = dirichlet_count(assignment)
    formula = graph.E - p

    if not assignment.is_scale_invariant(config.tolerances):
        verdicts.append(Verdict(
            name="scale_invariant", passed=False,
            detail=f"Robin 顶点: {', '.join(assignment.robin_vertices(config.tolerances))}",
        ))

    N0 = _attempt("kernel_dim", verdicts, lambda: kernel_dim(graph, assignment))
    N0_dual = _attempt("kernel_dim_dual", verdicts, lambda: kernel_dim_dual(graph, assignment))
    S = _attempt("global_S", verdicts, lambda: global_S(graph, assignment, tolerances=config.tolerances))
    strace = None
    constant = None
    if S is not None:
        constant = _attempt("constant_term", verdicts, lambda: constant_term_from_S(graph, S))
        strace = None if constant is None else 2.0 * constant
    heat = _attempt(
        "index_heat", verdicts, lambda: index_via_two_traces(graph, assignment, t_ref, config)
    )
    Ntilde = _attempt(
        "Ntilde", verdicts, lambda: algebraic_multiplicity_zero(graph, assignment, config)
    )

    kernels = None if N0 is None or N0_dual is None else N0 - N0_dual

    if kernels is not None:
        verdicts.append(Verdict(
            name="formula=kernels", passed=kernels == formula,
            detail=f"E-p={formula}, N0-N0*={kernels}",
        ))
    if strace is not None:
        verdicts.append(Verdict(
            name="strace=formula", passed=abs(strace - formula) < 1e-9,
            detail=f"½ΣS={strace:.17g}",
        ))
    if heat is not None:
        verdicts.append(Verdict(
            name="heat=formula", passed=abs(heat - formula) < 1e-6,
            detail=f"TrK-TrK'={heat:.17g}",
        ))
    if Ntilde is not None and N0 is not None:
        verdicts.append(Verdict(
            name="Ntilde=2N0-index", passed=Ntilde == 2 * N0 - formula,
            detail=f"Ñ={Ntilde}, 2N0-(E-p)={2 * N0 - formula}",
        ))
        if N0_dual is not None:
            verdicts.append(Verdict(
                name="Ntilde=N0+N0*", passed=Ntilde == N0 + N0_dual,
                detail=f"Ñ={Ntilde}, N0+N0*={N0 + N0_dual}",
            ))
    if constant is not None and all(c.label == "kirchhoff" for c in assignment.values()):
        expected = 0.5 * (graph.V - graph.E)
        verdicts.append(Verdict(
            name="K3=(V-E)/2", passed=abs(constant - expected) < 1e-9,
            detail=f"K3={constant:.17g}, (V-E)/2={expected}",
        ))

    report = IndexReport(
        E=graph.E,
        V=graph.V,
        p=p,
        index_formula=formula,
        index_kernels=kernels,
        index_strace=strace,
        index_heat=heat,
        euler=graph.V - graph.E,
        N0=N0,
        N0_dual=N0_dual,
        Ntilde=Ntilde,
        t_ref=t_ref,
        consistency=verdicts,
    )
    status = "PASS" if report.passed else "FAIL"
    logger.info(f"指标报告: index={formula}, 判定 {status}")
    return report
