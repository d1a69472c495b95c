"""
度量图

紧致度量图的组合与度量结构：顶点、带长度的边、有向键 (bond)、
连通分支、Euler 示性数以及自环的规范化。

键编号约定：第 i 条边给出键 2i (tail → head) 与键 2i+1 (head → tail)，
所有矩阵 (S, U, D) 都使用这一全局顺序。
"""

import math
from typing import Dict, List, Optional, Sequence, Set, Tuple, Union

import networkx as nx
import numpy as np
from loguru import logger
from pydantic import BaseModel, ConfigDict, Field, PrivateAttr

from ..core.exceptions import GraphStructureError
from ..models import EdgeRecord

EdgeLike = Union[EdgeRecord, Tuple[str, str, str, float]]


def rev(bond: int) -> int:
    """键反转 rev(2i) = 2i+1, rev(2i+1) = 2i"""
    return bond ^ 1


def bond_edge(bond: int) -> int:
    """键所在的边索引"""
    return bond >> 1


class MetricGraph(BaseModel):
    """度量图 (构造后不可变)"""
    model_config = ConfigDict(frozen=True)

    name: Optional[str] = Field(default=None, description="图名称")
    vertices: Tuple[str, ...] = Field(description="按声明顺序排列的顶点ID")
    edges: Tuple[EdgeRecord, ...] = Field(description="按声明顺序排列的边")

    _vertex_index: Dict[str, int] = PrivateAttr(default_factory=dict)
    _edge_index: Dict[str, int] = PrivateAttr(default_factory=dict)
    _incident: List[List[int]] = PrivateAttr(default_factory=list)

    def model_post_init(self, __context) -> None:
        self._vertex_index = {v: i for i, v in enumerate(self.vertices)}
        self._edge_index = {e.edge_id: i for i, e in enumerate(self.edges)}

        incident: List[List[int]] = [[] for _ in self.vertices]
        for i, edge in enumerate(self.edges):
            incident[self._vertex_index[edge.tail]].append(2 * i)
            incident[self._vertex_index[edge.head]].append(2 * i + 1)
        self._incident = [sorted(bonds) for bonds in incident]

    # ------------------------------------------------------------------
    # 基本计数
    # ------------------------------------------------------------------

    @property
    def V(self) -> int:
        return len(self.vertices)

    @property
    def E(self) -> int:
        return len(self.edges)

    @property
    def num_bonds(self) -> int:
        return 2 * len(self.edges)

    @property
    def total_length(self) -> float:
        """所有边长之和 L"""
        return float(sum(edge.length for edge in self.edges))

    @property
    def has_loops(self) -> bool:
        return any(edge.is_loop for edge in self.edges)

    def vertex_index(self, vertex: str) -> int:
        try:
            return self._vertex_index[vertex]
        except KeyError:
            raise GraphStructureError(f"未知顶点: {vertex}") from None

    def edge_index(self, edge: str) -> int:
        try:
            return self._edge_index[edge]
        except KeyError:
            raise GraphStructureError(f"未知边: {edge}") from None

    def degree(self, vertex: str) -> int:
        return len(self._incident[self.vertex_index(vertex)])

    def degrees(self) -> Dict[str, int]:
        return {v: len(self._incident[i]) for i, v in enumerate(self.vertices)}

    # ------------------------------------------------------------------
    # 键
    # ------------------------------------------------------------------

    def incident_bonds(self, vertex: str) -> List[int]:
        """从顶点出发的全部键，按键编号升序；自环贡献两个键"""
        return list(self._incident[self.vertex_index(vertex)])

    def bond_origin(self, bond: int) -> str:
        """键的起点"""
        edge = self.edges[bond_edge(bond)]
        return edge.tail if bond % 2 == 0 else edge.head

    def bond_terminus(self, bond: int) -> str:
        """键的终点"""
        edge = self.edges[bond_edge(bond)]
        return edge.head if bond % 2 == 0 else edge.tail

    def bond_lengths(self) -> np.ndarray:
        """长度为 2E 的键长数组"""
        return np.repeat([edge.length for edge in self.edges], 2).astype(float)

    def bonds_from(self, bond: int) -> List[int]:
        """可接在给定键之后的键 (起点为其终点)"""
        return self.incident_bonds(self.bond_terminus(bond))

    # ------------------------------------------------------------------
    # 拓扑
    # ------------------------------------------------------------------

    def to_networkx(self) -> nx.MultiGraph:
        multigraph = nx.MultiGraph()
        multigraph.add_nodes_from(range(self.V))
        for i, edge in enumerate(self.edges):
            multigraph.add_edge(
                self._vertex_index[edge.tail], self._vertex_index[edge.head],
                key=i, length=edge.length
            )
        return multigraph

    def connected_components(self) -> Tuple[int, Dict[str, int]]:
        """
        连通分支

        Returns:
            tuple: (分支数 C, 顶点 → 所在分支中最小顶点索引)
        """
        labels: Dict[str, int] = {}
        components = nx.connected_components(self.to_networkx())
        for component in components:
            label = min(component)
            for index in component:
                labels[self.vertices[index]] = label
        count = len(set(labels.values()))
        return count, {v: labels[v] for v in self.vertices}

    def euler_characteristic(self) -> int:
        return self.V - self.E

    def incidence_matrix(self) -> np.ndarray:
        """V×E 关联矩阵，元素取 0、1 或 2 (自环)"""
        matrix = np.zeros((self.V, self.E), dtype=int)
        for i, edge in enumerate(self.edges):
            matrix[self._vertex_index[edge.tail], i] += 1
            matrix[self._vertex_index[edge.head], i] += 1
        return matrix


def _edge_record(edge: EdgeLike) -> EdgeRecord:
    if isinstance(edge, EdgeRecord):
        return edge
    edge_id, tail, head, length = edge
    return EdgeRecord(edge_id=edge_id, tail=tail, head=head, length=float(length))


def build_graph(
    vertices: Sequence[str],
    edges: Sequence[EdgeLike],
    name: Optional[str] = None,
) -> MetricGraph:
    """
    构造并校验度量图

    Args:
        vertices: 顶点ID列表 (声明顺序即索引顺序)
        edges: 边记录或 (edge_id, tail, head, length) 元组
        name: 图名称

    Returns:
        MetricGraph: 校验后的度量图

    Raises:
        GraphStructureError: 重复ID、未知端点、非法长度或孤立顶点
    """
    records = [_edge_record(edge) for edge in edges]

    if not vertices:
        raise GraphStructureError("图至少需要一个顶点")
    if not records:
        raise GraphStructureError("图至少需要一条边")

    seen: Set[str] = set()
    for vertex in vertices:
        if vertex in seen:
            raise GraphStructureError(f"重复的顶点ID: {vertex}")
        seen.add(vertex)

    edge_ids: Set[str] = set()
    touched: Set[str] = set()
    for record in records:
        if record.edge_id in edge_ids:
            raise GraphStructureError(f"重复的边ID: {record.edge_id}")
        edge_ids.add(record.edge_id)

        for endpoint in (record.tail, record.head):
            if endpoint not in seen:
                raise GraphStructureError(f"边 {record.edge_id} 引用了未声明的顶点: {endpoint}")
            touched.add(endpoint)

        if not (math.isfinite(record.length) and record.length > 0.0):
            raise GraphStructureError(f"边 {record.edge_id} 的长度必须为正有限数: {record.length}")

    isolated = [v for v in vertices if v not in touched]
    if isolated:
        raise GraphStructureError(f"孤立顶点 (度数为0): {', '.join(isolated)}")

    graph = MetricGraph(name=name, vertices=tuple(vertices), edges=tuple(records))
    logger.debug(f"构造度量图: V={graph.V}, E={graph.E}, L={graph.total_length}")
    return graph


def incident_bonds(graph: MetricGraph, vertex: str) -> List[int]:
    return graph.incident_bonds(vertex)


def connected_components(graph: MetricGraph) -> Tuple[int, Dict[str, int]]:
    return graph.connected_components()


def euler_characteristic(graph: MetricGraph) -> int:
    return graph.euler_characteristic()


def incidence_matrix(graph: MetricGraph) -> np.ndarray:
    return graph.incidence_matrix()


def _fresh_id(base: str, taken: Set[str]) -> str:
    candidate = base
    suffix = 1
    while candidate in taken:
        suffix += 1
        candidate = f"{base}{suffix}"
    return candidate


def split_edge(graph: MetricGraph, edge: str, s: float) -> Tuple[MetricGraph, str, Dict[int, int]]:
    """
    在边上位置 s 处插入度数为 2 的新顶点

    原第 i 条边被 (tail → 新顶点, 长度 s) 取代，另追加第 E 条边
    (新顶点 → head, 长度 L-s)。

    Args:
        graph: 原图
        edge: 边ID
        s: 从 tail 量起的位置, 0 < s < L

    Returns:
        tuple: (新图, 新顶点ID, 旧键 → 新键 的映射)
    """
    index = graph.edge_index(edge)
    record = graph.edges[index]
    if not (0.0 < s < record.length):
        raise GraphStructureError(f"分割位置 {s} 不在 (0, {record.length}) 内")

    taken = set(graph.vertices) | {e.edge_id for e in graph.edges}
    vertex = _fresh_id(f"{record.edge_id}_m", taken)
    taken.add(vertex)
    first_id = _fresh_id(f"{record.edge_id}_a", taken)
    taken.add(first_id)
    second_id = _fresh_id(f"{record.edge_id}_b", taken)

    edges = list(graph.edges)
    edges[index] = EdgeRecord(edge_id=first_id, tail=record.tail, head=vertex, length=s)
    edges.append(EdgeRecord(edge_id=second_id, tail=vertex, head=record.head, length=record.length - s))

    bond_map = {b: b for b in range(graph.num_bonds)}
    bond_map[2 * index + 1] = 2 * graph.E + 1

    new_graph = MetricGraph(name=graph.name, vertices=graph.vertices + (vertex,), edges=tuple(edges))
    return new_graph, vertex, bond_map


def insert_degree2_vertex(graph: MetricGraph, edge: str, s: float) -> MetricGraph:
    """在边上插入度数为 2 的顶点 (调用方负责为新顶点指定 Kirchhoff 条件)"""
    new_graph, _, _ = split_edge(graph, edge, s)
    return new_graph


def loop_edges(graph: MetricGraph) -> List[str]:
    return [edge.edge_id for edge in graph.edges if edge.is_loop]


def normalize_loops(graph: MetricGraph) -> MetricGraph:
    """在每个自环的中点插入度数为 2 的顶点，按边索引顺序处理"""
    for edge in loop_edges(graph):
        current = graph.edges[graph.edge_index(edge)]
        graph = insert_degree2_vertex(graph, edge, current.length / 2.0)
    return graph
