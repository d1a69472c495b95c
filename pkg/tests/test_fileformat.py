"""
图描述文件解析测试
"""

from pathlib import Path

import numpy as np
import pytest

from qgindex.core import GraphFileSyntaxError, GraphStructureError, VertexConditionError
from qgindex.fileformat import load_graph, parse_graph_file, serialize_graph_file

from .conftest import INTERVAL_DIRICHLET, INTERVAL_NEUMANN, KIRCHHOFF_TRIANGLE, ROBIN_INTERVAL, STAR3

CUSTOM_STAR = """\
graph custom_star
vertex c custom P=[[0.5,0+0.5i],[0-0.5i,0.5]] Q=[[0.5,0-0.5i],[0+0.5i,0.5]] L=[[0,0],[0,0]]
vertex l1 neumann
vertex l2 dirichlet
edge e1 c l1 1.0
edge e2 c l2 2.5
"""


class TestParse:
    @pytest.mark.parametrize("text", [INTERVAL_NEUMANN, INTERVAL_DIRICHLET, KIRCHHOFF_TRIANGLE, STAR3, ROBIN_INTERVAL])
    def test_fixtures_roundtrip(self, text):
        parsed = parse_graph_file(text)
        again = parse_graph_file(serialize_graph_file(parsed))
        assert parsed.same_structure(again)

    def test_triangle_contents(self):
        parsed = parse_graph_file(KIRCHHOFF_TRIANGLE)
        assert parsed.name == "kirchhoff_triangle"
        assert [v.vertex_id for v in parsed.vertices] == ["a", "b", "c"]
        assert [v.line for v in parsed.vertices] == [3, 4, 5]
        assert parsed.edges[2].edge.tail == "c"
        assert parsed.edges[2].edge.head == "a"

    def test_delta_and_comments(self):
        parsed = parse_graph_file("vertex v delta(-2.5e-1)  # 注释\n\n   # 空行\nedge e v v 3\n")
        assert parsed.name is None
        assert parsed.vertices[0].condition.kind == "delta"
        assert parsed.vertices[0].condition.alpha == -0.25
        assert parsed.edges[0].edge.length == 3.0

    def test_custom_matrices(self):
        parsed = parse_graph_file(CUSTOM_STAR)
        condition = parsed.vertices[0].condition
        assert condition.kind == "custom"
        assert condition.P[0][1] == 0.5j
        assert condition.Q[1][0] == 0.5j
        again = parse_graph_file(serialize_graph_file(parsed))
        assert parsed.same_structure(again)

    def test_custom_conditions_build(self):
        graph, assignment = load_graph(CUSTOM_STAR)
        assert graph.degree("c") == 2
        np.testing.assert_allclose(assignment["c"].P, [[0.5, 0.5j], [-0.5j, 0.5]])
        assert assignment.is_scale_invariant()
        assert assignment.dirichlet_count() == 2


class TestSyntaxErrors:
    def test_missing_length(self):
        with pytest.raises(GraphFileSyntaxError) as info:
            parse_graph_file("edge e1 v1 1.0\n")
        assert info.value.line == 1
        assert info.value.column == 15

    def test_unknown_keyword(self):
        with pytest.raises(GraphFileSyntaxError) as info:
            parse_graph_file("graph g\nnode v1 neumann\n")
        assert (info.value.line, info.value.column) == (2, 1)
        assert "node" in str(info.value)

    def test_unknown_condition(self):
        with pytest.raises(GraphFileSyntaxError) as info:
            parse_graph_file("vertex v1 robin\n")
        assert info.value.column == 11

    @pytest.mark.parametrize("text", [
        "graph a\ngraph b\n",
        "vertex v neumann\ngraph g\n",
    ])
    def test_graph_declaration_placement(self, text):
        with pytest.raises(GraphFileSyntaxError) as info:
            parse_graph_file(text)
        assert info.value.line == 2

    @pytest.mark.parametrize("text", [
        "vertex v delta\n",
        "vertex v delta(x)\n",
        "vertex v neumann extra\n",
        "vertex v custom P=[[1,0]] Q=[[0]] L=[[0]]\n",
        "vertex v custom P=[[1i]] Q=[[0]] L=[[0]]\n",
        "edge e a b 1.0x\n",
    ])
    def test_malformed_lines(self, text):
        with pytest.raises(GraphFileSyntaxError):
            parse_graph_file(text)


class TestLoad:
    def test_load_from_path(self, graph_file):
        graph, assignment = load_graph(Path(graph_file(STAR3)))
        assert graph.name == "star3"
        assert (graph.V, graph.E) == (4, 3)
        assert assignment["c"].label == "kirchhoff"

    def test_string_is_content(self):
        graph, _ = load_graph(INTERVAL_NEUMANN)
        assert graph.total_length == 1.0

    def test_undeclared_vertex(self):
        with pytest.raises(GraphStructureError):
            load_graph("vertex a neumann\nedge e1 a b 1.0\n")

    @pytest.mark.parametrize("length", ["0", "-1.0", "inf", "nan"])
    def test_bad_length(self, length):
        with pytest.raises(GraphStructureError):
            load_graph(f"vertex a neumann\nvertex b neumann\nedge e1 a b {length}\n")

    def test_invalid_custom_conditions(self):
        with pytest.raises(VertexConditionError):
            load_graph("vertex a custom P=[[2]] Q=[[0]] L=[[0]]\nvertex b neumann\nedge e1 a b 1.0\n")
