"""
闭合路径类枚举

基边 e 上一点 x 出发的闭合路径：沿 e 的一个键 δ (出发键) 离开，
完整经过中间键 γ1..γm，再沿 e 的一个键 ε (到达键) 回到 x。
δ = ε 为周期类 (长度 L_e + c，与 x 无关)，δ ≠ ε 为反弹类
(长度 2x + c 或 2(L_e - x) + c)，其中 c = Σ L_γ。
振幅为 S[ε, γm] … S[γ1, δ]。
"""

from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
from loguru import logger

from ..core.config_models import DEFAULT_CONFIG, ApplicationConfiguration
from ..core.exceptions import HeatTraceError
from ..graph import MetricGraph

PERIODIC = "periodic"
BOUNCE = "bounce"

# 视为结构零的散射振幅
_ZERO_AMPLITUDE = 1e-14


@dataclass(frozen=True)
class WalkClass:
    """闭合路径类"""
    base_edge: int
    departure: int
    arrival: int
    intermediate: Tuple[int, ...]
    amplitude: complex
    length: float
    kind: str

    @property
    def traversals(self) -> int:
        """完整经过的边数 (周期类含基边本身)"""
        return len(self.intermediate) + (1 if self.kind == PERIODIC else 0)

    def minimal_length(self, base_length: float) -> float:
        return base_length + self.length if self.kind == PERIODIC else self.length


@dataclass
class WalkEnumeration:
    """枚举结果：路径类以及截断处被剪掉的分支数"""
    walks: List[WalkClass]
    frontier: int
    cutoff: float


def _successors(S: np.ndarray, graph: MetricGraph) -> List[List[Tuple[int, complex]]]:
    """每个键之后可接的键及其散射振幅 (剔除零振幅)"""
    table: List[List[Tuple[int, complex]]] = []
    for bond in range(graph.num_bonds):
        row = []
        for nxt in graph.bonds_from(bond):
            amplitude = complex(S[nxt, bond])
            if abs(amplitude) > _ZERO_AMPLITUDE:
                row.append((nxt, amplitude))
        table.append(row)
    return table


def enumerate_walks(
    graph: MetricGraph,
    S: np.ndarray,
    base_edge: int,
    cutoff: float,
    config: Optional[ApplicationConfiguration] = None,
    successors: Optional[List[List[Tuple[int, complex]]]] = None,
) -> WalkEnumeration:
    """
    枚举基边上的全部闭合路径类

    收录条件：周期类 L_e + c <= cutoff，反弹类 c <= cutoff。
    深度优先，按键编号顺序展开，结果顺序确定。

    Args:
        graph: 度量图
        S: 全局散射矩阵 (2E×2E)
        base_edge: 基边索引
        cutoff: 长度截断 Λc
        config: 应用配置 (路径类数量上限)
        successors: 预先计算的后继表

    Raises:
        HeatTraceError: cutoff 非正或路径类数量超过上限
    """
    if not cutoff > 0.0:
        raise HeatTraceError(f"长度截断必须为正: {cutoff}")
    config = config or DEFAULT_CONFIG
    limit = config.heat_trace.max_walk_classes
    table = successors if successors is not None else _successors(S, graph)

    lengths = graph.bond_lengths()
    base_length = float(lengths[2 * base_edge])
    base_bonds = (2 * base_edge, 2 * base_edge + 1)

    walks: List[WalkClass] = []
    frontier = 0

    for departure in base_bonds:
        # (最后一个键, 振幅, 中间长度, 中间序列)
        stack = [(departure, 1.0 + 0.0j, 0.0, ())]
        while stack:
            last, amplitude, length, sequence = stack.pop()
            extensions = []
            for nxt, factor in table[last]:
                value = amplitude * factor
                if nxt in base_bonds:
                    kind = PERIODIC if nxt == departure else BOUNCE
                    reach = base_length + length if kind == PERIODIC else length
                    if reach <= cutoff:
                        walks.append(WalkClass(
                            base_edge=base_edge, departure=departure, arrival=nxt,
                            intermediate=sequence, amplitude=value, length=length, kind=kind,
                        ))
                    else:
                        frontier += 1
                extended = length + float(lengths[nxt])
                if extended <= cutoff:
                    extensions.append((nxt, value, extended, sequence + (nxt,)))
                else:
                    frontier += 1
            # 逆序压栈使出栈顺序与键编号一致
            stack.extend(reversed(extensions))

            if len(walks) > limit:
                raise HeatTraceError(
                    f"基边 {base_edge} 的路径类数量超过上限 {limit}，请减小长度截断"
                )

    logger.debug(
        f"基边 {base_edge}: {len(walks)} 个路径类，截断 {cutoff:.4g}，边界分支 {frontier}"
    )
    return WalkEnumeration(walks=walks, frontier=frontier, cutoff=cutoff)


def enumerate_all_walks(
    graph: MetricGraph,
    S: np.ndarray,
    cutoff: float,
    config: Optional[ApplicationConfiguration] = None,
) -> WalkEnumeration:
    """对所有基边枚举并合并，总数受同一上限约束"""
    config = config or DEFAULT_CONFIG
    table = _successors(S, graph)
    walks: List[WalkClass] = []
    frontier = 0
    for edge in range(graph.E):
        result = enumerate_walks(graph, S, edge, cutoff, config, table)
        walks.extend(result.walks)
        frontier += result.frontier
        if len(walks) > config.heat_trace.max_walk_classes:
            raise HeatTraceError(
                f"路径类总数超过上限 {config.heat_trace.max_walk_classes}，请减小长度截断"
            )
    return WalkEnumeration(walks=walks, frontier=frontier, cutoff=cutoff)
