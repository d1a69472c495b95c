"""
图生成器

常用的固定图 (区间、星形、圈、8 字形) 以及随机图族。
"""

from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..models import EdgeRecord
from .metric_graph import MetricGraph, build_graph


def interval(length: float = 1.0) -> MetricGraph:
    return build_graph(["v1", "v2"], [("e1", "v1", "v2", length)], name="interval")


def star(leaves: int = 3, length: float = 1.0) -> MetricGraph:
    """中心顶点 c，所有边的 tail 均在中心"""
    vertices = ["c"] + [f"l{i}" for i in range(1, leaves + 1)]
    edges = [(f"e{i}", "c", f"l{i}", length) for i in range(1, leaves + 1)]
    return build_graph(vertices, edges, name=f"star{leaves}")


def cycle(n: int = 3, length: float = 1.0) -> MetricGraph:
    """n 条边首尾相接的圈 (n >= 2)"""
    vertices = [f"v{i}" for i in range(1, n + 1)]
    edges = [(f"e{i}", vertices[i - 1], vertices[i % n], length) for i in range(1, n + 1)]
    return build_graph(vertices, edges, name=f"cycle{n}")


def circle(length: float = 2.0 * np.pi) -> MetricGraph:
    """单个自环构成的圆周"""
    return build_graph(["o"], [("loop", "o", "o", length)], name="circle")


def rose(petals: Sequence[float] = (1.0, 1.0)) -> MetricGraph:
    """单顶点多自环 (两个花瓣即 8 字形)"""
    edges = [(f"p{i}", "o", "o", length) for i, length in enumerate(petals, start=1)]
    return build_graph(["o"], edges, name=f"rose{len(petals)}")


def disjoint_edges(count: int, length: float = 1.0) -> MetricGraph:
    vertices: List[str] = []
    edges = []
    for i in range(1, count + 1):
        vertices += [f"a{i}", f"b{i}"]
        edges.append((f"e{i}", f"a{i}", f"b{i}", length))
    return build_graph(vertices, edges, name=f"disjoint{count}")


def disjoint_union(graphs: Sequence[MetricGraph]) -> MetricGraph:
    """不交并，顶点和边ID加前缀 g<i>."""
    vertices: List[str] = []
    edges: List[EdgeRecord] = []
    for i, graph in enumerate(graphs):
        prefix = f"g{i}."
        vertices += [prefix + v for v in graph.vertices]
        edges += [
            EdgeRecord(
                edge_id=prefix + e.edge_id, tail=prefix + e.tail,
                head=prefix + e.head, length=e.length,
            )
            for e in graph.edges
        ]
    return build_graph(vertices, edges, name="union")


def random_graph(
    rng: np.random.Generator,
    max_vertices: int = 6,
    max_edges: int = 9,
    length_range: Tuple[float, float] = (0.5, 2.0),
    allow_loops: bool = False,
    min_vertices: int = 2,
) -> MetricGraph:
    """
    随机连通图

    先生成随机生成树，再补充随机边 (允许重边)，边长在 length_range 内均匀。

    Args:
        rng: 随机数生成器
        max_vertices: 顶点数上限
        max_edges: 边数上限 (不少于 V-1)
        length_range: 边长范围
        allow_loops: 是否允许自环
        min_vertices: 顶点数下限

    Returns:
        MetricGraph: 连通随机图
    """
    V = int(rng.integers(min_vertices, max_vertices + 1))
    max_edges = max(max_edges, V - 1)
    E = int(rng.integers(max(V - 1, 1), max_edges + 1))
    low, high = length_range

    vertices = [f"v{i}" for i in range(V)]
    pairs: List[Tuple[int, int]] = []
    for i in range(1, V):
        pairs.append((int(rng.integers(0, i)), i))
    while len(pairs) < E:
        a, b = (int(x) for x in rng.integers(0, V, size=2))
        if a == b and not allow_loops:
            continue
        pairs.append((a, b))

    edges = [
        (f"e{i}", vertices[a], vertices[b], float(rng.uniform(low, high)))
        for i, (a, b) in enumerate(pairs)
    ]
    return build_graph(vertices, edges, name="random")


def random_disconnected_graph(
    rng: np.random.Generator,
    components: int,
    max_vertices: Optional[int] = None,
    max_edges: Optional[int] = None,
) -> MetricGraph:
    """由若干随机连通图组成的不连通图"""
    per_vertices = max(2, (max_vertices or 6) // components)
    per_edges = max(per_vertices - 1, (max_edges or 9) // components)
    parts = [
        random_graph(rng, max_vertices=per_vertices, max_edges=per_edges)
        for _ in range(components)
    ]
    return disjoint_union(parts)
