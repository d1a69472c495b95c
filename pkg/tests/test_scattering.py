"""
散射矩阵测试
"""

import math

import numpy as np
import pytest

from qgindex.conditions import (
    ConditionsAssignment,
    preset,
    random_scale_invariant,
    random_scale_invariant_assignment,
    uniform_assignment,
)
from qgindex.core import ScatteringError
from qgindex.graph import cycle, interval, random_graph, star
from qgindex.scattering import (
    ScatteringAssembler,
    classify_scale_invariance,
    classify_vertex,
    dual_sign_check,
    global_S,
    strace_identity,
    vertex_sigma,
)

K_VALUES = (0.5, 1.0, math.sqrt(2.0))


class TestVertexSigma:
    @pytest.mark.parametrize("degree", range(1, 13))
    def test_kirchhoff_matches_closed_form(self, degree):
        sigma = vertex_sigma(preset("kirchhoff", degree), 1.0)
        expected = 2.0 / degree * np.ones((degree, degree)) - np.eye(degree)
        np.testing.assert_allclose(sigma, expected, atol=1e-12)

    def test_dirichlet_and_neumann(self):
        np.testing.assert_allclose(vertex_sigma(preset("dirichlet", 2), 1.0), -np.eye(2), atol=1e-14)
        np.testing.assert_allclose(vertex_sigma(preset("neumann", 2), 1.0), np.eye(2), atol=1e-14)

    def test_delta_single_end(self):
        # d = 1: σ = (ik + α) / (ik - α)
        alpha, k = 2.0, 1.5
        sigma = vertex_sigma(preset("delta", 1, alpha=alpha), k)
        assert sigma[0, 0] == pytest.approx((1j * k + alpha) / (1j * k - alpha), abs=1e-12)

    def test_unitarity_random(self, rng):
        for degree in range(1, 7):
            candidates = [random_scale_invariant(degree, rng), preset("delta", degree, alpha=rng.normal())]
            for conditions in candidates:
                for k in K_VALUES:
                    sigma = vertex_sigma(conditions, k)
                    residual = np.max(np.abs(sigma @ sigma.conj().T - np.eye(degree)))
                    assert residual < 1e-11

    def test_zero_frequency_requires_scale_invariance(self):
        vertex_sigma(preset("kirchhoff", 3), 0.0)
        with pytest.raises(ScatteringError):
            vertex_sigma(preset("delta", 3, alpha=1.0), 0.0)


class TestGlobalS:
    def test_shape_and_sparsity(self, star3):
        graph, assignment = star3
        S = global_S(graph, assignment)
        assert S.size == 6
        assert S.is_unitary()
        assert S.sparsity_violation(graph) == 0.0
        # 叶子 (Neumann) 上的反射: 键 1 (l1 → c) 的入射来自键 0
        assert S.matrix[1, 0] == pytest.approx(1.0)

    def test_scale_invariant_is_k_independent(self, rng):
        graph = random_graph(rng)
        assignment = random_scale_invariant_assignment(graph, rng)
        assembler = ScatteringAssembler(graph, assignment)
        assert assembler.scale_invariant
        np.testing.assert_allclose(assembler.matrix(1.0), assembler.matrix(7.3), atol=1e-14)
        assert assembler(2.0).k_independent

    def test_robin_depends_on_k(self, robin_interval):
        graph, assignment = robin_interval
        assembler = ScatteringAssembler(graph, assignment)
        assert not assembler.scale_invariant
        assert np.max(np.abs(assembler.matrix(1.0) - assembler.matrix(2.0))) > 1e-3
        assert assembler(1.0).is_unitary()

    def test_sr_involution(self, rng):
        # S 本身不是对合 (三角形上 S 按 3-循环置换键)，SR 才是
        graph, assignment = cycle(3), uniform_assignment(cycle(3), "kirchhoff")
        S = global_S(graph, assignment)
        assert S.involution_residual() < 1e-11
        for _ in range(10):
            graph = random_graph(rng)
            S = global_S(graph, random_scale_invariant_assignment(graph, rng))
            assert S.involution_residual() < 1e-11

    def test_dual_sign_flip(self, rng):
        for _ in range(10):
            graph = random_graph(rng)
            assert dual_sign_check(graph, random_scale_invariant_assignment(graph, rng))

    def test_dual_sign_requires_scale_invariance(self, robin_interval):
        with pytest.raises(ScatteringError):
            dual_sign_check(*robin_interval)

    def test_strace_identity(self, rng):
        for _ in range(10):
            graph = random_graph(rng)
            assignment = random_scale_invariant_assignment(graph, rng)
            result = strace_identity(graph, assignment)
            assert result["difference"] < 1e-9
            assert abs(result["imag"]) < 1e-12
            assert result["expected"] == 2 * (graph.E - assignment.dirichlet_count())

    def test_interval_reflection_trace(self):
        graph = interval(1.0)
        assert global_S(graph, uniform_assignment(graph, "neumann")).reflection_trace() == pytest.approx(2.0)
        assert global_S(graph, uniform_assignment(graph, "dirichlet")).reflection_trace() == pytest.approx(-2.0)


class TestClassifier:
    @pytest.mark.parametrize("name", ["kirchhoff", "anti_kirchhoff", "dirichlet", "neumann"])
    def test_scale_invariant_fixtures(self, name):
        verdict = classify_vertex("v", preset(name, 3))
        assert verdict.consistent
        assert verdict.scale_invariant

    @pytest.mark.parametrize("alpha", [0.5, -2.0, 10.0])
    def test_delta_fixtures(self, alpha):
        verdict = classify_vertex("v", preset("delta", 3, alpha=alpha))
        assert verdict.consistent
        assert not any(verdict.verdicts)

    def test_mixed_assignment(self, robin_interval):
        report = classify_scale_invariance(robin_interval[1])
        assert report.consistent
        assert not report.scale_invariant
        assert [v.scale_invariant for v in report.vertices] == [True, False]

    def test_assignment_level(self):
        graph = star(3)
        assignment = ConditionsAssignment({
            "c": preset("kirchhoff", 3),
            "l1": preset("dirichlet", 1),
            "l2": preset("neumann", 1),
            "l3": preset("delta", 1, alpha=1.0),
        })
        assert classify_scale_invariance(assignment).consistent
        assert not assignment.is_scale_invariant()
