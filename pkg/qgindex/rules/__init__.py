"""
校验规则引擎

以规则的形式组织数值不变量检查：每条规则引用一个内置检查函数，
引擎负责执行、捕获异常、计时并汇总统计。`verify` 子命令和验收测试都经由此处。
"""

import json
import math
import time
from datetime import datetime
from functools import cached_property
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Tuple, Union

import numpy as np
import yaml
from loguru import logger
from pydantic import BaseModel, Field

from ..conditions import (
    ConditionsAssignment,
    dual,
    from_AB,
    insert_kirchhoff_vertex,
    same_solution_subspace,
    to_AB,
    validate,
)
from ..core.config_models import DEFAULT_CONFIG, ApplicationConfiguration
from ..graph import MetricGraph
from ..heat import (
    constant_term_from_S,
    index_via_two_traces,
    path_sum_heat_trace,
    spectral_heat_trace,
)
from ..index import full_index_report, incidence_index
from ..models import SpectralData
from ..scattering import (
    ScatteringMatrix,
    classify_scale_invariance,
    dual_sign_check,
    global_S,
    vertex_sigma,
)
from ..spectrum import (
    algebraic_multiplicity_zero,
    compute_spectral_data,
    kernel_dim,
    kernel_dim_dual,
    weyl_check,
    zero_root_multiplicity_from_S,
)
from ..spectrum.secular import SecularSystem

CheckOutcome = Tuple[bool, Optional[float], List[str]]


class Rule(BaseModel):
    """规则定义"""
    rule_id: str = Field(description="规则ID")
    name: str = Field(description="规则名称")
    category: str = Field(description="规则类别")
    description: str = Field(description="规则描述")
    check: str = Field(description="内置检查函数名")
    severity: str = Field(default="high", description="严重程度")
    tolerance: Optional[float] = Field(default=None, description="检查容差")
    requires_scale_invariant: bool = Field(default=False, description="是否要求尺度不变条件")
    enabled: bool = Field(default=True, description="是否启用")


class RuleExecutionResult(BaseModel):
    """规则执行结果"""
    rule_id: str = Field(description="规则ID")
    name: str = Field(description="规则名称")
    passed: bool = Field(description="是否通过")
    skipped: bool = Field(default=False, description="前提不满足而跳过")
    residual: Optional[float] = Field(default=None, description="残差")
    evidence: List[str] = Field(default_factory=list, description="证据")
    execution_time: float = Field(default=0.0, description="执行时间 (秒)")
    timestamp: datetime = Field(default_factory=datetime.now, description="执行时刻")

    @property
    def status(self) -> str:
        if self.skipped:
            return "SKIP"
        return "PASS" if self.passed else "FAIL"


class VerificationContext:
    """
    校验上下文

    缓存各规则共享的中间结果 (散射矩阵、谱数据、插点后的图)。
    """

    SPECTRUM_ROOTS = 20
    REFERENCE_TIME = 0.02

    def __init__(
        self,
        graph: MetricGraph,
        assignment: ConditionsAssignment,
        config: Optional[ApplicationConfiguration] = None,
    ):
        self.graph = graph
        self.assignment = assignment
        self.config = config or DEFAULT_CONFIG

    @cached_property
    def scale_invariant(self) -> bool:
        return self.assignment.is_scale_invariant(self.config.tolerances)

    @cached_property
    def S(self) -> ScatteringMatrix:
        return global_S(self.graph, self.assignment, tolerances=self.config.tolerances)

    @cached_property
    def heat_k_max(self) -> float:
        return self.config.heat_trace.spectral_k_max(self.REFERENCE_TIME)

    @cached_property
    def spectrum(self) -> SpectralData:
        return compute_spectral_data(self.graph, self.assignment, self.heat_k_max, config=self.config)

    @cached_property
    def split(self) -> Tuple[MetricGraph, ConditionsAssignment]:
        """在第一条边 0.37L 处插入 Kirchhoff 顶点"""
        edge = self.graph.edges[0]
        return insert_kirchhoff_vertex(self.graph, self.assignment, edge.edge_id, 0.37 * edge.length)

    @cached_property
    def split_spectrum(self) -> SpectralData:
        graph, assignment = self.split
        return compute_spectral_data(graph, assignment, self.heat_k_max, config=self.config)


class VerificationChecks:
    """内置检查函数，签名为 (context, tolerance) -> (通过, 残差, 证据)"""

    # ------------------------------------------------------------------
    # 图结构
    # ------------------------------------------------------------------

    @staticmethod
    def incidence_index(ctx: VerificationContext, tol: Optional[float]) -> CheckOutcome:
        value = incidence_index(ctx.graph)
        return value == ctx.graph.E - ctx.graph.V, None, [f"index M = {value}"]

    @staticmethod
    def euler_invariance(ctx: VerificationContext, tol: Optional[float]) -> CheckOutcome:
        graph, _ = ctx.split
        before = ctx.graph.euler_characteristic()
        after = graph.euler_characteristic()
        components = (ctx.graph.connected_components()[0], graph.connected_components()[0])
        passed = before == after and components[0] == components[1]
        return passed, None, [f"χ: {before} → {after}", f"C: {components[0]} → {components[1]}"]

    # ------------------------------------------------------------------
    # 顶点条件
    # ------------------------------------------------------------------

    @staticmethod
    def conditions_valid(ctx: VerificationContext, tol: Optional[float]) -> CheckOutcome:
        evidence = []
        passed = True
        worst = 0.0
        for vertex, conditions in ctx.assignment.items():
            report = validate(conditions, ctx.config.tolerances)
            residuals = [c.residual for c in report.checks if c.residual is not None and "invertible" not in c.name]
            worst = max([worst] + residuals)
            if not report.passed:
                passed = False
                evidence.append(f"{vertex}: " + ", ".join(c.name for c in report.failures()))
        return passed, worst, evidence or ["全部顶点条件合法"]

    @staticmethod
    def normal_form_roundtrip(ctx: VerificationContext, tol: Optional[float]) -> CheckOutcome:
        evidence = []
        for vertex, conditions in ctx.assignment.items():
            A, B = to_AB(conditions, ctx.config.tolerances)
            recovered = from_AB(A, B, ctx.config.tolerances)
            if not same_solution_subspace(to_AB(recovered, ctx.config.tolerances), (A, B), ctx.config.tolerances):
                evidence.append(f"{vertex}: 解子空间不一致")
        return not evidence, None, evidence or ["from_AB ∘ to_AB 保持解子空间"]

    @staticmethod
    def dual_involution(ctx: VerificationContext, tol: Optional[float]) -> CheckOutcome:
        worst = 0.0
        for conditions in ctx.assignment.values():
            twice = dual(dual(conditions))
            worst = max(worst, float(np.max(np.abs(twice.P - conditions.P))),
                        float(np.max(np.abs(twice.Q - conditions.Q))))
        return worst < (tol or 1e-14), worst, [f"max |dual(dual(c)) - c| = {worst:.3e}"]

    # ------------------------------------------------------------------
    # 散射矩阵
    # ------------------------------------------------------------------

    @staticmethod
    def vertex_unitarity(ctx: VerificationContext, tol: Optional[float]) -> CheckOutcome:
        tol = tol or ctx.config.tolerances.unitarity
        worst = 0.0
        for conditions in ctx.assignment.values():
            for k in (0.5, 1.0, math.sqrt(2.0)):
                sigma = vertex_sigma(conditions, k, ctx.config.tolerances)
                worst = max(worst, float(np.max(np.abs(sigma @ sigma.conj().T - np.eye(conditions.degree)))))
        return worst < tol, worst, [f"max ‖σσ† - I‖ = {worst:.3e}"]

    @staticmethod
    def global_unitarity(ctx: VerificationContext, tol: Optional[float]) -> CheckOutcome:
        tol = tol or ctx.config.tolerances.unitarity
        residual = ctx.S.unitarity_residual()
        sparsity = ctx.S.sparsity_violation(ctx.graph)
        passed = residual < tol and sparsity == 0.0
        return passed, residual, [f"‖SS† - I‖ = {residual:.3e}", f"稀疏结构违例 {sparsity:.3e}"]

    @staticmethod
    def classifier_consistency(ctx: VerificationContext, tol: Optional[float]) -> CheckOutcome:
        report = classify_scale_invariance(ctx.assignment, ctx.config.tolerances)
        evidence = [f"{v.vertex}: {v.verdicts}" for v in report.vertices]
        agrees = report.scale_invariant == ctx.scale_invariant
        return report.consistent and agrees, None, evidence

    @staticmethod
    def involution(ctx: VerificationContext, tol: Optional[float]) -> CheckOutcome:
        tol = tol or ctx.config.tolerances.unitarity
        residual = ctx.S.involution_residual()
        return residual < tol, residual, [f"‖(SR)² - I‖ = {residual:.3e}"]

    @staticmethod
    def dual_sign(ctx: VerificationContext, tol: Optional[float]) -> CheckOutcome:
        passed = dual_sign_check(ctx.graph, ctx.assignment, ctx.config.tolerances)
        return passed, None, ["S' = -S" if passed else "S' ≠ -S"]

    @staticmethod
    def reflection_trace(ctx: VerificationContext, tol: Optional[float]) -> CheckOutcome:
        trace = ctx.S.reflection_trace()
        expected = 2 * (ctx.graph.E - ctx.assignment.dirichlet_count())
        residual = abs(trace.real - expected)
        passed = residual < (tol or 1e-9) and abs(trace.imag) < 1e-12
        return passed, residual, [f"Σ S_(α,rev α) = {trace.real:.17g}{trace.imag:+.3e}i, 2(E-p) = {expected}"]

    # ------------------------------------------------------------------
    # 谱
    # ------------------------------------------------------------------

    @staticmethod
    def root_residuals(ctx: VerificationContext, tol: Optional[float]) -> CheckOutcome:
        tol = tol or ctx.config.spectrum.secular_residual
        system = SecularSystem(ctx.graph, ctx.assignment, ctx.config)
        worst = 0.0
        evidence = []
        window = ctx.config.spectrum.multiplicity_window
        for root in ctx.spectrum.roots:
            worst = max(worst, system.root_residual(root.k, root.multiplicity))
            count = int(np.sum(system.unit_distances(root.k) < window))
            if count != root.multiplicity:
                evidence.append(f"k={root.k:.12g}: 重数 {root.multiplicity} ≠ {count}")
        evidence.append(f"{len(ctx.spectrum.roots)} 个根, 最大残差 {worst:.3e}")
        return worst < tol and len(evidence) == 1, worst, evidence

    @staticmethod
    def weyl_law(ctx: VerificationContext, tol: Optional[float]) -> CheckOutcome:
        result = weyl_check(ctx.spectrum.roots, ctx.graph.total_length, ctx.spectrum.k_max, ctx.graph.E)
        return result.passed, result.residual, [result.detail]

    @staticmethod
    def spectrum_insertion(ctx: VerificationContext, tol: Optional[float]) -> CheckOutcome:
        tol = tol or 1e-8
        before = ctx.spectrum.expanded()[:VerificationContext.SPECTRUM_ROOTS]
        after = ctx.split_spectrum.expanded()[:VerificationContext.SPECTRUM_ROOTS]
        if len(before) != len(after):
            return False, None, [f"根数量不一致: {len(before)} vs {len(after)}"]
        deviation = float(np.max(np.abs(np.subtract(before, after)))) if before else 0.0
        return deviation < tol, deviation, [f"前 {len(before)} 个根最大偏差 {deviation:.3e}"]

    @staticmethod
    def multiplicity_identities(ctx: VerificationContext, tol: Optional[float]) -> CheckOutcome:
        N0 = kernel_dim(ctx.graph, ctx.assignment)
        N0_dual = kernel_dim_dual(ctx.graph, ctx.assignment)
        Ntilde = algebraic_multiplicity_zero(ctx.graph, ctx.assignment, ctx.config)
        from_S = zero_root_multiplicity_from_S(ctx.S.matrix, ctx.config)
        index = ctx.graph.E - ctx.assignment.dirichlet_count()
        passed = Ntilde == N0 + N0_dual == 2 * N0 - index == from_S
        return passed, None, [f"Ñ={Ntilde}, N0={N0}, N0*={N0_dual}, E-p={index}, #eig(S)=1: {from_S}"]

    # ------------------------------------------------------------------
    # 热迹
    # ------------------------------------------------------------------

    @staticmethod
    def route_agreement(ctx: VerificationContext, tol: Optional[float]) -> CheckOutcome:
        tol = tol or 1e-6
        t = VerificationContext.REFERENCE_TIME
        paths = path_sum_heat_trace(ctx.graph, ctx.S, t, config=ctx.config)
        spectral = spectral_heat_trace(ctx.spectrum, t, ctx.config)
        discrepancy = abs(paths.total - spectral)
        return discrepancy < tol, discrepancy, [f"paths={paths.total:.17g}, spectral={spectral:.17g}"]

    @staticmethod
    def heat_insertion(ctx: VerificationContext, tol: Optional[float]) -> CheckOutcome:
        tol = tol or 1e-8
        t = VerificationContext.REFERENCE_TIME
        before = spectral_heat_trace(ctx.spectrum, t, ctx.config)
        after = spectral_heat_trace(ctx.split_spectrum, t, ctx.config)
        difference = abs(before - after)
        return difference < tol, difference, [f"Tr K: {before:.17g} → {after:.17g}"]

    @staticmethod
    def two_traces(ctx: VerificationContext, tol: Optional[float]) -> CheckOutcome:
        tol = tol or 1e-6
        value = index_via_two_traces(ctx.graph, ctx.assignment, VerificationContext.REFERENCE_TIME, ctx.config)
        index = ctx.graph.E - ctx.assignment.dirichlet_count()
        constant = constant_term_from_S(ctx.graph, ctx.S)
        residual = abs(value - index)
        return residual < tol, residual, [f"Tr K - Tr K' = {value:.17g}, E-p = {index}, K3 = {constant:.17g}"]

    # ------------------------------------------------------------------
    # 指标
    # ------------------------------------------------------------------

    @staticmethod
    def index_report(ctx: VerificationContext, tol: Optional[float]) -> CheckOutcome:
        report = full_index_report(ctx.graph, ctx.assignment, config=ctx.config)
        evidence = [f"{v.name}: {'PASS' if v.passed else 'FAIL'} {v.detail}" for v in report.consistency]
        return report.passed, None, evidence


class BuiltinRules:
    """内置规则库"""

    @staticmethod
    def get_graph_rules() -> List[Rule]:
        """图结构规则"""
        return [
            Rule(rule_id="graph_incidence_index", name="关联矩阵指标", category="graph",
                 description="关联矩阵的指标等于 E - V", check="incidence_index"),
            Rule(rule_id="graph_euler_insertion", name="插点不变性 (χ, C)", category="graph",
                 description="插入度数为 2 的顶点不改变 Euler 示性数与连通分支数",
                 check="euler_invariance"),
        ]

    @staticmethod
    def get_condition_rules() -> List[Rule]:
        """顶点条件规则"""
        return [
            Rule(rule_id="cond_valid", name="顶点条件合法", category="conditions",
                 description="P、Q、C 为正交投影且 Λ 在 range(C) 上可逆", check="conditions_valid"),
            Rule(rule_id="cond_normal_form", name="规范形式往返", category="conditions",
                 description="from_AB ∘ to_AB 保持解子空间", check="normal_form_roundtrip"),
            Rule(rule_id="cond_dual_involution", name="对偶为对合", category="conditions",
                 description="dual(dual(c)) = c", check="dual_involution",
                 requires_scale_invariant=True),
        ]

    @staticmethod
    def get_scattering_rules() -> List[Rule]:
        """散射矩阵规则"""
        return [
            Rule(rule_id="scat_vertex_unitary", name="顶点散射矩阵酉性", category="scattering",
                 description="k ∈ {0.5, 1, √2} 处 σ(v) 为酉矩阵", check="vertex_unitarity"),
            Rule(rule_id="scat_global_unitary", name="全局散射矩阵酉性与稀疏结构", category="scattering",
                 description="S 为酉矩阵且只连接相邻的键", check="global_unitarity"),
            Rule(rule_id="scat_classifier", name="尺度不变性判定一致", category="scattering",
                 description="五个等价条件的数值判定相互一致", check="classifier_consistency"),
            Rule(rule_id="scat_involution", name="SR 为对合", category="scattering",
                 description="(SR)² = I", check="involution", requires_scale_invariant=True),
            Rule(rule_id="scat_dual_sign", name="对偶符号翻转", category="scattering",
                 description="对偶条件的散射矩阵 S' = -S", check="dual_sign",
                 requires_scale_invariant=True),
            Rule(rule_id="scat_reflection_trace", name="反射迹恒等式", category="scattering",
                 description="Σ S_(α,rev α) = 2(E - p)", check="reflection_trace",
                 requires_scale_invariant=True),
        ]

    @staticmethod
    def get_spectrum_rules() -> List[Rule]:
        """谱规则"""
        return [
            Rule(rule_id="spec_root_residual", name="根残差与重数", category="spectrum",
                 description="根处久期因子残差小于阈值且重数与单位特征值个数一致",
                 check="root_residuals", requires_scale_invariant=True),
            Rule(rule_id="spec_weyl", name="Weyl 计数", category="spectrum",
                 description="|N(k) - Lk/π| <= 2E + 2", check="weyl_law",
                 requires_scale_invariant=True),
            Rule(rule_id="spec_insertion", name="插点谱不变性", category="spectrum",
                 description="插入 Kirchhoff 顶点后前 20 个根不变", check="spectrum_insertion",
                 requires_scale_invariant=True),
            Rule(rule_id="spec_multiplicity", name="零点重数恒等式", category="spectrum",
                 description="Ñ = N0 + N0* = 2N0 - (E - p) = #{S 的特征值 1}",
                 check="multiplicity_identities", requires_scale_invariant=True),
        ]

    @staticmethod
    def get_heat_rules() -> List[Rule]:
        """热迹规则"""
        return [
            Rule(rule_id="heat_routes", name="热迹两途径一致", category="heat",
                 description="路径求和与谱求和在 t = 0.02 处一致", check="route_agreement",
                 requires_scale_invariant=True),
            Rule(rule_id="heat_insertion", name="插点热迹不变性", category="heat",
                 description="插入 Kirchhoff 顶点后热迹不变", check="heat_insertion",
                 requires_scale_invariant=True),
            Rule(rule_id="heat_two_traces", name="Tr K - Tr K' = index", category="heat",
                 description="原算子与对偶算子热迹之差等于 E - p", check="two_traces",
                 requires_scale_invariant=True),
        ]

    @staticmethod
    def get_index_rules() -> List[Rule]:
        """指标规则"""
        return [
            Rule(rule_id="index_report", name="指标报告一致性", category="index",
                 description="各途径计算的 index A 相互一致", check="index_report",
                 requires_scale_invariant=True),
        ]

    @staticmethod
    def get_all_builtin_rules() -> List[Rule]:
        """获取所有内置规则"""
        rules: List[Rule] = []
        rules.extend(BuiltinRules.get_graph_rules())
        rules.extend(BuiltinRules.get_condition_rules())
        rules.extend(BuiltinRules.get_scattering_rules())
        rules.extend(BuiltinRules.get_spectrum_rules())
        rules.extend(BuiltinRules.get_heat_rules())
        rules.extend(BuiltinRules.get_index_rules())
        return rules


class RuleEngine:
    """规则引擎"""

    def __init__(self, config: Optional[ApplicationConfiguration] = None):
        """
        初始化规则引擎

        Args:
            config: 应用配置
        """
        self.config = config or DEFAULT_CONFIG
        self.rules: List[Rule] = BuiltinRules.get_all_builtin_rules()
        self._last_results: List[RuleExecutionResult] = []
        logger.debug(f"加载了 {len(self.rules)} 个内置规则")

    def load_rule_file(self, path: Union[str, Path]) -> int:
        """
        从 JSON/YAML 文件加载规则覆盖 (启用状态、容差) 或新增规则

        文件内容为规则列表，或含 rules 键的字典。

        Returns:
            int: 生效的条目数
        """
        path = Path(path)
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f) if path.suffix.lower() == ".json" else yaml.safe_load(f)
        entries = data.get("rules", []) if isinstance(data, dict) else (data or [])

        by_id = {rule.rule_id: i for i, rule in enumerate(self.rules)}
        applied = 0
        for entry in entries:
            rule_id = entry.get("rule_id")
            if rule_id in by_id:
                index = by_id[rule_id]
                self.rules[index] = self.rules[index].model_copy(update=entry)
            else:
                rule = Rule(**entry)
                if not hasattr(VerificationChecks, rule.check):
                    logger.warning(f"规则 {rule.rule_id} 引用了未知检查 {rule.check}，已忽略")
                    continue
                self.rules.append(rule)
            applied += 1
        logger.info(f"从 {path} 加载了 {applied} 条规则")
        return applied

    def get_all_rules(self) -> List[Rule]:
        return [rule for rule in self.rules if rule.enabled]

    def get_rules_by_category(self, category: str) -> List[Rule]:
        return [rule for rule in self.get_all_rules() if rule.category == category]

    def set_enabled(self, rule_id: str, enabled: bool) -> bool:
        for i, rule in enumerate(self.rules):
            if rule.rule_id == rule_id:
                self.rules[i] = rule.model_copy(update={"enabled": enabled})
                return True
        logger.warning(f"未知规则: {rule_id}")
        return False

    def execute_rules(
        self,
        graph: MetricGraph,
        assignment: ConditionsAssignment,
        categories: Optional[List[str]] = None,
    ) -> List[RuleExecutionResult]:
        """
        执行规则检查

        Args:
            graph: 度量图
            assignment: 顶点条件分配
            categories: 只执行这些类别，None 表示全部

        Returns:
            List[RuleExecutionResult]: 规则执行结果列表
        """
        logger.info("开始执行规则检查")
        context = VerificationContext(graph, assignment, self.config)
        results = []

        for rule in self.get_all_rules():
            if categories is not None and rule.category not in categories:
                continue
            start_time = time.perf_counter()
            try:
                result = self._execute_single_rule(rule, context)
            except Exception as e:
                logger.error(f"规则执行失败 {rule.rule_id}: {e}")
                result = RuleExecutionResult(
                    rule_id=rule.rule_id, name=rule.name, passed=False, evidence=[str(e)]
                )
            result.execution_time = time.perf_counter() - start_time
            results.append(result)

        self._last_results = results
        failed = sum(1 for r in results if not r.passed)
        logger.info(f"规则检查完成，执行了 {len(results)} 个规则，失败 {failed} 个")
        return results

    def _execute_single_rule(self, rule: Rule, context: VerificationContext) -> RuleExecutionResult:
        if rule.requires_scale_invariant and not context.scale_invariant:
            return RuleExecutionResult(
                rule_id=rule.rule_id, name=rule.name, passed=True, skipped=True,
                evidence=["需要尺度不变条件，已跳过"],
            )
        check: Callable[[VerificationContext, Optional[float]], CheckOutcome] = getattr(
            VerificationChecks, rule.check
        )
        passed, residual, evidence = check(context, rule.tolerance)
        return RuleExecutionResult(
            rule_id=rule.rule_id, name=rule.name, passed=bool(passed),
            residual=residual, evidence=evidence,
        )

    def get_rule_statistics(self) -> Dict[str, Any]:
        """获取规则统计信息"""
        all_rules = self.get_all_rules()

        by_category: Dict[str, int] = {}
        by_severity: Dict[str, int] = {}
        for rule in all_rules:
            by_category[rule.category] = by_category.get(rule.category, 0) + 1
            by_severity[rule.severity] = by_severity.get(rule.severity, 0) + 1

        return {
            "total_rules": len(all_rules),
            "by_category": by_category,
            "by_severity": by_severity,
            "last_run": {
                "executed": len(self._last_results),
                "passed": sum(1 for r in self._last_results if r.passed and not r.skipped),
                "failed": sum(1 for r in self._last_results if not r.passed),
                "skipped": sum(1 for r in self._last_results if r.skipped),
            },
        }


__all__ = [
    "Rule",
    "RuleExecutionResult",
    "VerificationContext",
    "VerificationChecks",
    "BuiltinRules",
    "RuleEngine",
]
