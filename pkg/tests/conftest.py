"""
测试公共夹具
"""

import math
from typing import Callable

import numpy as np
import pytest

from qgindex.conditions import ConditionsAssignment, preset, uniform_assignment
from qgindex.graph import MetricGraph, circle, cycle, interval, rose, star

INTERVAL_NEUMANN = """\
graph interval_neumann
vertex v1 neumann
vertex v2 neumann
edge e1 v1 v2 1.0
"""

INTERVAL_DIRICHLET = """\
graph interval_dirichlet
vertex v1 dirichlet
vertex v2 dirichlet
edge e1 v1 v2 1.0
"""

KIRCHHOFF_TRIANGLE = """\
graph kirchhoff_triangle
# 三条单位边构成的圈
vertex a kirchhoff
vertex b kirchhoff
vertex c kirchhoff
edge e1 a b 1.0
edge e2 b c 1.0
edge e3 c a 1.0
"""

STAR3 = """\
graph star3
vertex c kirchhoff
vertex l1 neumann
vertex l2 neumann
vertex l3 neumann
edge e1 c l1 1.0
edge e2 c l2 1.0
edge e3 c l3 1.0
"""

ROBIN_INTERVAL = """\
graph robin_interval
vertex v1 neumann
vertex v2 delta(1.0)
edge e1 v1 v2 1.0
"""


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


@pytest.fixture
def interval_graph() -> MetricGraph:
    return interval(1.0)


@pytest.fixture
def neumann_interval(interval_graph):
    return interval_graph, uniform_assignment(interval_graph, "neumann")


@pytest.fixture
def dirichlet_interval(interval_graph):
    return interval_graph, uniform_assignment(interval_graph, "dirichlet")


@pytest.fixture
def star3():
    graph = star(3)
    return graph, uniform_assignment(graph, "kirchhoff")


@pytest.fixture
def triangle():
    graph = cycle(3)
    return graph, uniform_assignment(graph, "kirchhoff")


@pytest.fixture
def kirchhoff_circle():
    graph = circle(2.0 * math.pi)
    return graph, uniform_assignment(graph, "kirchhoff")


@pytest.fixture
def figure_eight():
    graph = rose((1.0, math.sqrt(2.0)))
    return graph, uniform_assignment(graph, "kirchhoff")


@pytest.fixture
def robin_interval(interval_graph):
    return interval_graph, ConditionsAssignment({
        "v1": preset("neumann", 1),
        "v2": preset("delta", 1, alpha=1.0),
    })


@pytest.fixture
def graph_file(tmp_path) -> Callable[[str, str], str]:
    """把图描述文本写入临时文件并返回路径"""
    def write(text: str, name: str = "graph.qg") -> str:
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return str(path)
    return write
