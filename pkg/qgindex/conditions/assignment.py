"""
顶点条件分配

ConditionsAssignment 将图的每个顶点映射到其 VertexConditions，
矩阵坐标与 incident_bonds(v) 的顺序一致。
"""

from dataclasses import dataclass
from typing import Dict, Iterator, List, Mapping, Optional, Tuple

import numpy as np
from loguru import logger

from ..core.config_models import ToleranceConfiguration
from ..core.exceptions import VertexConditionError
from ..graph.metric_graph import MetricGraph, loop_edges, split_edge
from .presets import preset, random_scale_invariant
from .vertex_conditions import (
    VertexConditions,
    dual,
    is_scale_invariant,
    projector_rank,
    require_valid,
)


@dataclass(frozen=True, eq=False)
class ConditionsAssignment(Mapping[str, VertexConditions]):
    """顶点 → 顶点条件"""
    conditions: Mapping[str, VertexConditions]

    def __post_init__(self) -> None:
        object.__setattr__(self, "conditions", dict(self.conditions))

    def __getitem__(self, vertex: str) -> VertexConditions:
        return self.conditions[vertex]

    def __iter__(self) -> Iterator[str]:
        return iter(self.conditions)

    def __len__(self) -> int:
        return len(self.conditions)

    def check(self, graph: MetricGraph, tolerances: Optional[ToleranceConfiguration] = None) -> None:
        """
        检查分配与图是否匹配

        Raises:
            VertexConditionError: 缺少顶点、多余顶点、度数不匹配或条件非法
        """
        extra = [v for v in self.conditions if v not in graph.vertices]
        if extra:
            raise VertexConditionError(f"条件分配包含图中不存在的顶点: {', '.join(extra)}")
        missing = [v for v in graph.vertices if v not in self.conditions]
        if missing:
            raise VertexConditionError(f"顶点没有指定条件: {', '.join(missing)}")
        for vertex in graph.vertices:
            conditions = self[vertex]
            if conditions.degree != graph.degree(vertex):
                raise VertexConditionError(
                    f"顶点 {vertex} 的条件维数 {conditions.degree} 与度数 {graph.degree(vertex)} 不匹配"
                )
            require_valid(conditions, tolerances)

    def is_scale_invariant(self, tolerances: Optional[ToleranceConfiguration] = None) -> bool:
        return all(is_scale_invariant(c, tolerances) for c in self.conditions.values())

    def robin_vertices(self, tolerances: Optional[ToleranceConfiguration] = None) -> List[str]:
        return [v for v, c in self.conditions.items() if not is_scale_invariant(c, tolerances)]

    def dual(self, tolerances: Optional[ToleranceConfiguration] = None) -> "ConditionsAssignment":
        """逐顶点对偶"""
        return ConditionsAssignment({v: dual(c, tolerances) for v, c in self.conditions.items()})

    def dirichlet_count(self) -> int:
        return dirichlet_count(self)


def dirichlet_count(assignment: ConditionsAssignment) -> int:
    """p = Σ_v rank P_v"""
    return sum(projector_rank(c.P) for c in assignment.values())


def uniform_assignment(graph: MetricGraph, name: str, alpha: Optional[float] = None) -> ConditionsAssignment:
    """所有顶点使用同一预设条件"""
    return ConditionsAssignment({
        vertex: preset(name, degree, alpha) for vertex, degree in graph.degrees().items()
    })


def random_scale_invariant_assignment(graph: MetricGraph, rng: np.random.Generator) -> ConditionsAssignment:
    """每个顶点独立抽取随机尺度不变条件"""
    return ConditionsAssignment({
        vertex: random_scale_invariant(degree, rng) for vertex, degree in graph.degrees().items()
    })


def insert_kirchhoff_vertex(
    graph: MetricGraph,
    assignment: ConditionsAssignment,
    edge: str,
    s: float,
) -> Tuple[MetricGraph, ConditionsAssignment]:
    """
    插入度数为 2 的 Kirchhoff 顶点并搬运原有条件

    原顶点的条件矩阵按新图中的出射键顺序重排；新顶点取 Kirchhoff 条件。

    Returns:
        tuple: (新图, 新条件分配)
    """
    new_graph, new_vertex, bond_map = split_edge(graph, edge, s)

    transported: Dict[str, VertexConditions] = {}
    for vertex in graph.vertices:
        mapped = [bond_map[b] for b in graph.incident_bonds(vertex)]
        order = [mapped.index(b) for b in new_graph.incident_bonds(vertex)]
        transported[vertex] = assignment[vertex].permuted(order)
    transported[new_vertex] = preset("kirchhoff", 2)

    logger.debug(f"在边 {edge} 的 s={s} 处插入 Kirchhoff 顶点 {new_vertex}")
    return new_graph, ConditionsAssignment(transported)


def normalize_loops_with_conditions(
    graph: MetricGraph,
    assignment: ConditionsAssignment,
) -> Tuple[MetricGraph, ConditionsAssignment]:
    """在每个自环中点插入 Kirchhoff 顶点，条件随之搬运"""
    for edge in loop_edges(graph):
        length = graph.edges[graph.edge_index(edge)].length
        graph, assignment = insert_kirchhoff_vertex(graph, assignment, edge, length / 2.0)
    return graph, assignment
