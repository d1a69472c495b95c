"""
度量图结构测试
"""

import networkx as nx
import numpy as np
import pytest

from qgindex.core import GraphStructureError
from qgindex.graph import (
    bond_edge,
    build_graph,
    circle,
    cycle,
    disjoint_edges,
    incidence_matrix,
    insert_degree2_vertex,
    normalize_loops,
    random_disconnected_graph,
    random_graph,
    rev,
    rose,
    split_edge,
    star,
)


class TestBonds:
    def test_reversal_is_involution(self):
        for bond in range(20):
            assert rev(rev(bond)) == bond
            assert rev(bond) != bond
            assert bond_edge(rev(bond)) == bond_edge(bond)

    def test_incident_bonds_are_outgoing(self):
        graph = star(3)
        assert graph.incident_bonds("c") == [0, 2, 4]
        assert graph.incident_bonds("l2") == [3]
        for bond in range(graph.num_bonds):
            assert graph.bond_origin(bond) == graph.bond_terminus(rev(bond))

    def test_loop_contributes_two_bonds(self):
        graph = circle(1.0)
        assert graph.degree("o") == 2
        assert graph.incident_bonds("o") == [0, 1]
        assert graph.has_loops

    def test_bond_lengths(self):
        graph = build_graph(["a", "b"], [("e1", "a", "b", 1.5), ("e2", "b", "a", 0.5)])
        np.testing.assert_array_equal(graph.bond_lengths(), [1.5, 1.5, 0.5, 0.5])
        assert graph.total_length == pytest.approx(2.0)


class TestBuildGraph:
    def test_duplicate_vertex(self):
        with pytest.raises(GraphStructureError):
            build_graph(["a", "a"], [("e1", "a", "a", 1.0)])

    def test_duplicate_edge(self):
        with pytest.raises(GraphStructureError):
            build_graph(["a", "b"], [("e1", "a", "b", 1.0), ("e1", "b", "a", 1.0)])

    def test_unknown_endpoint(self):
        with pytest.raises(GraphStructureError):
            build_graph(["a", "b"], [("e1", "a", "z", 1.0)])

    @pytest.mark.parametrize("length", [0.0, -1.0, float("inf"), float("nan")])
    def test_bad_length(self, length):
        with pytest.raises(GraphStructureError):
            build_graph(["a", "b"], [("e1", "a", "b", length)])

    def test_isolated_vertex(self):
        with pytest.raises(GraphStructureError, match="c"):
            build_graph(["a", "b", "c"], [("e1", "a", "b", 1.0)])

    def test_empty_graph(self):
        with pytest.raises(GraphStructureError):
            build_graph([], [])

    def test_multi_edges_allowed(self):
        graph = build_graph(["a", "b"], [("e1", "a", "b", 1.0), ("e2", "a", "b", 2.0)])
        assert graph.degree("a") == 2
        assert graph.E == 2


class TestTopology:
    def test_euler_characteristic(self):
        assert cycle(4).euler_characteristic() == 0
        assert star(5).euler_characteristic() == 1
        assert rose((1.0, 1.0, 1.0)).euler_characteristic() == -2

    def test_components_labels(self):
        graph = disjoint_edges(3)
        count, labels = graph.connected_components()
        assert count == 3
        assert labels["a1"] == labels["b1"] == 0
        assert labels["a3"] == labels["b3"]

    def test_components_match_networkx(self, rng):
        for components in (2, 3):
            graph = random_disconnected_graph(rng, components)
            count, _ = graph.connected_components()
            assert count == components
            assert count == nx.number_connected_components(graph.to_networkx())

    def test_incidence_matrix_columns(self):
        M = incidence_matrix(cycle(3))
        assert M.shape == (3, 3)
        np.testing.assert_array_equal(M.sum(axis=0), [2, 2, 2])
        assert set(np.unique(M)) == {0, 1}

    def test_loop_column(self):
        np.testing.assert_array_equal(incidence_matrix(circle(1.0)), [[2]])
        np.testing.assert_array_equal(incidence_matrix(star(1)), [[1], [1]])


class TestInsertion:
    def test_split_edge_structure(self):
        graph = star(3)
        new_graph, vertex, bond_map = split_edge(graph, "e2", 0.25)
        assert new_graph.V == graph.V + 1
        assert new_graph.E == graph.E + 1
        assert new_graph.degree(vertex) == 2
        assert new_graph.total_length == pytest.approx(graph.total_length)
        assert bond_map[3] == 2 * graph.E + 1
        assert new_graph.bond_origin(bond_map[3]) == "l2"

    @pytest.mark.parametrize("s", [0.0, 1.0, 2.0])
    def test_split_out_of_range(self, s):
        with pytest.raises(GraphStructureError):
            split_edge(star(3), "e1", s)

    def test_insertion_preserves_euler_and_components(self, rng):
        for _ in range(10):
            graph = random_graph(rng)
            edge = graph.edges[int(rng.integers(graph.E))]
            new_graph = insert_degree2_vertex(graph, edge.edge_id, 0.37 * edge.length)
            assert new_graph.euler_characteristic() == graph.euler_characteristic()
            assert new_graph.connected_components()[0] == graph.connected_components()[0]

    def test_normalize_loops(self):
        graph = normalize_loops(rose((1.0, 2.0)))
        assert not graph.has_loops
        assert graph.V == 3
        assert graph.E == 4
        assert graph.euler_characteristic() == -1


class TestGenerators:
    def test_random_graph_bounds(self, rng):
        for _ in range(20):
            graph = random_graph(rng)
            assert 2 <= graph.V <= 6
            assert graph.E <= 9
            assert graph.connected_components()[0] == 1
            assert all(0.5 <= e.length <= 2.0 for e in graph.edges)
            assert not graph.has_loops
