"""
热迹测试：路径求和、谱求和与两迹之差
"""

import math

import numpy as np
import pytest

from qgindex.conditions import (
    insert_kirchhoff_vertex,
    random_scale_invariant_assignment,
    uniform_assignment,
)
from qgindex.core import HeatTraceError
from qgindex.graph import interval, random_graph
from qgindex.heat import (
    BOUNCE,
    PERIODIC,
    auto_cutoff,
    bounce_sum,
    constant_term_from_S,
    enumerate_walks,
    index_via_two_traces,
    path_sum_heat_trace,
    spectral_heat_trace,
    spectral_heat_trace_result,
    weyl_term,
)
from qgindex.core.config_models import DEFAULT_CONFIG
from qgindex.models import SpectralData, SpectralRoot
from qgindex.scattering import ScatteringAssembler, global_S
from qgindex.spectrum import compute_spectral_data


def _spectral(graph, assignment, t):
    k_max = DEFAULT_CONFIG.heat_trace.spectral_k_max(t)
    return spectral_heat_trace(compute_spectral_data(graph, assignment, k_max), t)


class TestIntervalPrototype:
    @pytest.mark.parametrize("name,constant", [("neumann", 0.5), ("dirichlet", -0.5)])
    def test_constant_term(self, name, constant):
        graph = interval(1.0)
        assignment = uniform_assignment(graph, name)
        result = path_sum_heat_trace(graph, global_S(graph, assignment), 0.01)
        assert result.constant == pytest.approx(constant, abs=1e-12)
        assert result.weyl == pytest.approx(1.0 / math.sqrt(4.0 * math.pi * 0.01))
        assert result.total == pytest.approx(_spectral(graph, assignment, 0.01), abs=1e-8)
        assert abs(result.orbit_sum) < 1e-8

    def test_classical_series(self):
        # Neumann 区间: 1 + Σ e^{-n²π²t}
        graph = interval(1.0)
        t = 0.05
        expected = 1.0 + sum(math.exp(-(n * math.pi) ** 2 * t) for n in range(1, 200))
        result = path_sum_heat_trace(graph, global_S(graph, uniform_assignment(graph, "neumann")), t)
        assert result.total == pytest.approx(expected, abs=1e-9)

    def test_bounce_sum_is_constant(self, neumann_interval):
        graph, assignment = neumann_interval
        assert bounce_sum(graph, global_S(graph, assignment), 0.01) == pytest.approx(0.5, abs=1e-9)

    def test_dual_trace_is_dirichlet_trace(self, neumann_interval, dirichlet_interval):
        graph, assignment = neumann_interval
        S_dual = global_S(graph, assignment.dual())
        dual = path_sum_heat_trace(graph, S_dual, 0.01, form_degree=1)
        assert dual.total == pytest.approx(_spectral(*dirichlet_interval, 0.01), abs=1e-8)

    @pytest.mark.parametrize("name,index", [("neumann", 1), ("dirichlet", -1)])
    def test_two_traces(self, name, index):
        graph = interval(1.0)
        value = index_via_two_traces(graph, uniform_assignment(graph, name), 0.01)
        assert value == pytest.approx(index, abs=1e-6)


class TestPathSum:
    def test_triangle_routes_agree(self, triangle):
        graph, assignment = triangle
        result = path_sum_heat_trace(graph, global_S(graph, assignment), 0.02)
        assert result.constant == pytest.approx(0.0, abs=1e-12)
        assert abs(result.total - _spectral(graph, assignment, 0.02)) < 1e-6
        assert result.truncation_bound < 1e-6

    def test_figure_eight_routes_agree(self, figure_eight):
        graph, assignment = figure_eight
        result = path_sum_heat_trace(graph, global_S(graph, assignment), 0.02)
        assert result.constant == pytest.approx(0.5 * (graph.V - graph.E), abs=1e-12)
        assert abs(result.total - _spectral(graph, assignment, 0.02)) < 1e-6

    def test_explicit_cutoff_too_small(self, triangle):
        graph, assignment = triangle
        with pytest.raises(HeatTraceError):
            path_sum_heat_trace(graph, global_S(graph, assignment), 0.02, cutoff=0.5, tolerance=1e-10)

    def test_robin_rejected(self, robin_interval):
        graph, assignment = robin_interval
        S = ScatteringAssembler(graph, assignment)(1.0)
        with pytest.raises(HeatTraceError):
            path_sum_heat_trace(graph, S, 0.02)
        with pytest.raises(HeatTraceError):
            constant_term_from_S(graph, S)

    @pytest.mark.parametrize("t", [0.0, -0.1])
    def test_time_must_be_positive(self, triangle, t):
        graph, assignment = triangle
        with pytest.raises(HeatTraceError):
            path_sum_heat_trace(graph, global_S(graph, assignment), t)

    def test_auto_cutoff_grows_with_time(self, triangle):
        graph, _ = triangle
        assert 0.0 < auto_cutoff(graph, 0.01) < auto_cutoff(graph, 0.05)

    def test_walk_classes(self, neumann_interval):
        graph, assignment = neumann_interval
        S = global_S(graph, assignment).matrix
        enumeration = enumerate_walks(graph, S, 0, cutoff=2.5)
        kinds = {walk.kind for walk in enumeration.walks}
        assert kinds == {PERIODIC, BOUNCE}
        assert all(abs(walk.amplitude) == pytest.approx(1.0) for walk in enumeration.walks)
        shortest = [w for w in enumeration.walks if w.kind == PERIODIC and w.minimal_length(1.0) == pytest.approx(2.0)]
        assert len(shortest) == 2
        assert enumeration.frontier > 0

    def test_walk_class_limit(self, triangle):
        graph, assignment = triangle
        config = DEFAULT_CONFIG.model_copy(deep=True)
        config.heat_trace.max_walk_classes = 10
        with pytest.raises(HeatTraceError):
            enumerate_walks(graph, global_S(graph, assignment).matrix, 0, cutoff=20.0, config=config)


class TestSpectralRoute:
    def test_insufficient_k_max(self, neumann_interval):
        data = compute_spectral_data(*neumann_interval, k_max=10.0)
        with pytest.raises(HeatTraceError):
            spectral_heat_trace(data, 0.01)

    def test_sum_over_eigenvalues(self):
        roots = [SpectralRoot(k=1.0, multiplicity=2), SpectralRoot(k=3.0, multiplicity=1)]
        assert roots[1].eigenvalue == 9.0
        data = SpectralData(roots=roots, k_max=200.0, N0=1)
        expected = 1.0 + 2.0 * math.exp(-0.5) + math.exp(-4.5)
        assert spectral_heat_trace(data, 0.5) == pytest.approx(expected, rel=1e-14)

    def test_result_decomposition(self, triangle):
        graph, assignment = triangle
        t = 0.05
        data = compute_spectral_data(graph, assignment, DEFAULT_CONFIG.heat_trace.spectral_k_max(t))
        result = spectral_heat_trace_result(graph, data, t, 0.0)
        assert result.method == "spectral"
        assert result.weyl == pytest.approx(weyl_term(graph.total_length, t))
        assert result.total == pytest.approx(result.weyl + result.constant + result.orbit_sum)

    def test_robin_spectral_trace(self, robin_interval):
        t = 0.05
        data = compute_spectral_data(*robin_interval, k_max=DEFAULT_CONFIG.heat_trace.spectral_k_max(t))
        # 正特征值使热迹小于 Neumann 区间
        assert 0.0 < spectral_heat_trace(data, t) < 1.0 + sum(math.exp(-(n * math.pi) ** 2 * t) for n in range(1, 100))


class TestInvariance:
    def test_heat_trace_unchanged_by_insertion(self, star3):
        graph, assignment = star3
        new_graph, new_assignment = insert_kirchhoff_vertex(graph, assignment, "e1", 0.37)
        t = 0.02
        before = path_sum_heat_trace(graph, global_S(graph, assignment), t)
        after = path_sum_heat_trace(new_graph, global_S(new_graph, new_assignment), t)
        assert after.constant == pytest.approx(before.constant, abs=1e-12)
        assert after.total == pytest.approx(before.total, abs=1e-8)


@pytest.mark.slow
class TestRandomFamilies:
    def test_kirchhoff_constant_and_routes(self, rng):
        for _ in range(20):
            graph = random_graph(rng)
            assignment = uniform_assignment(graph, "kirchhoff")
            result = path_sum_heat_trace(graph, global_S(graph, assignment), 0.02)
            assert result.constant == pytest.approx(0.5 * (graph.V - graph.E), abs=1e-6)
            assert abs(result.total - _spectral(graph, assignment, 0.02)) < 1e-6

    def test_index_identities(self, rng):
        for _ in range(50):
            graph = random_graph(rng)
            assignment = random_scale_invariant_assignment(graph, rng)
            index = graph.E - assignment.dirichlet_count()
            S = global_S(graph, assignment)
            assert abs(2.0 * constant_term_from_S(graph, S) - index) < 1e-9
            assert abs(index_via_two_traces(graph, assignment, 0.02) - index) < 1e-6

    def test_trace_difference_is_time_independent(self, rng):
        graph = random_graph(rng)
        assignment = random_scale_invariant_assignment(graph, rng)
        values = [index_via_two_traces(graph, assignment, t, probe_times=[]) for t in (0.01, 0.03)]
        assert values[0] == pytest.approx(values[1], abs=1e-6)
        assert np.isfinite(values).all()
