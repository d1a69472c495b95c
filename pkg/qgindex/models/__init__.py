"""
数据模型定义

定义图描述、校验报告、谱数据、热迹结果和指标报告的结构化表示。
数值矩阵类型 (顶点条件、散射矩阵) 定义在各自的计算模块中。
"""

from typing import Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator


class EdgeRecord(BaseModel):
    """边记录"""
    model_config = ConfigDict(frozen=True)

    edge_id: str = Field(description="边ID")
    tail: str = Field(description="起点顶点ID")
    head: str = Field(description="终点顶点ID")
    length: float = Field(description="边长 (无量纲)")

    @property
    def is_loop(self) -> bool:
        return self.tail == self.head


class CheckResult(BaseModel):
    """单项数值检查结果"""
    name: str = Field(description="检查名称")
    passed: bool = Field(description="是否通过")
    residual: Optional[float] = Field(default=None, description="残差范数")
    detail: str = Field(default="", description="补充说明")


class ValidationReport(BaseModel):
    """校验报告"""
    subject: str = Field(description="校验对象")
    checks: List[CheckResult] = Field(default_factory=list, description="检查列表")

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def failures(self) -> List[CheckResult]:
        return [check for check in self.checks if not check.passed]


class VertexScaleInvariance(BaseModel):
    """单个顶点的尺度不变性判定 (五个等价条件)"""
    vertex: str = Field(description="顶点ID")
    k_independent: bool = Field(description="(i) σ(k₁) = σ(k₂)")
    involutive_at_some_k: bool = Field(description="(ii) 存在 k 使 σ² = I")
    involutive_for_all_k: bool = Field(description="(iii) 两个 k 处均有 σ² = I")
    reflection_form: bool = Field(description="(iv) σ 厄米且特征值为 ±1 (形如 1-2Q)")
    no_robin_part: bool = Field(description="(v) C = 0")

    @property
    def verdicts(self) -> List[bool]:
        return [
            self.k_independent,
            self.involutive_at_some_k,
            self.involutive_for_all_k,
            self.reflection_form,
            self.no_robin_part,
        ]

    @property
    def consistent(self) -> bool:
        return len(set(self.verdicts)) == 1

    @property
    def scale_invariant(self) -> bool:
        return all(self.verdicts)


class ScaleInvarianceReport(BaseModel):
    """尺度不变性分类报告"""
    vertices: List[VertexScaleInvariance] = Field(description="逐顶点判定")
    implied: List[str] = Field(
        default=["(vi) scale-invariant conditions", "(vii) factorization H = A*A"],
        description="由等价性蕴含的条件"
    )

    @property
    def consistent(self) -> bool:
        return all(v.consistent for v in self.vertices)

    @property
    def scale_invariant(self) -> bool:
        return all(v.scale_invariant for v in self.vertices)


class SpectralRoot(BaseModel):
    """久期方程的正根"""
    model_config = ConfigDict(frozen=True)

    k: float = Field(description="频率 k_n > 0")
    multiplicity: int = Field(description="重数")

    @property
    def eigenvalue(self) -> float:
        return self.k * self.k


class SpectralData(BaseModel):
    """谱数据"""
    roots: List[SpectralRoot] = Field(default_factory=list, description="按 k 升序排列的正根")
    k_max: float = Field(description="扫描上限")
    N0: int = Field(default=0, description="零特征值的谱重数")
    N0_dual: Optional[int] = Field(default=None, description="对偶算子零特征值的谱重数")
    Ntilde: Optional[int] = Field(default=None, description="k=0 作为 f 的根的代数重数")

    @field_validator("roots")
    @classmethod
    def validate_sorted(cls, roots: List[SpectralRoot]) -> List[SpectralRoot]:
        for previous, current in zip(roots, roots[1:]):
            if current.k <= previous.k:
                raise ValueError("roots must be strictly increasing")
        return roots

    def count(self) -> int:
        """计重数的正根个数"""
        return sum(root.multiplicity for root in self.roots)

    def expanded(self) -> List[float]:
        """按重数展开的 k 列表"""
        return [root.k for root in self.roots for _ in range(root.multiplicity)]


class HeatTraceResult(BaseModel):
    """热迹计算结果"""
    t: float = Field(description="时间")
    total: float = Field(description="Tr e^{-tH}")
    weyl: float = Field(description="Weyl 项 L/√(4πt)")
    constant: float = Field(description="常数 (拓扑) 项")
    orbit_sum: float = Field(description="其余 (周期轨道) 贡献 total - weyl - constant")
    truncation_bound: float = Field(default=0.0, description="截断误差估计")
    method: str = Field(default="paths", description="计算途径 (paths | spectral)")


class Verdict(BaseModel):
    """一致性判定"""
    name: str = Field(description="判定名称")
    passed: bool = Field(description="是否通过")
    detail: str = Field(default="", description="证据或失败原因")


class IndexReport(BaseModel):
    """指标报告 - 各途径计算的 index A 及一致性判定"""
    E: int = Field(description="边数")
    V: int = Field(description="顶点数")
    p: int = Field(description="Dirichlet 条件总数 Σ rank P_v")
    index_formula: int = Field(description="E - p")
    index_kernels: Optional[int] = Field(default=None, description="N0 - N0*")
    index_strace: Optional[float] = Field(default=None, description="½ Σ S_{αᾱ}")
    index_heat: Optional[float] = Field(default=None, description="Tr K - Tr K' (t = t_ref)")
    euler: int = Field(description="V - E")
    N0: Optional[int] = Field(default=None, description="dim ker H")
    N0_dual: Optional[int] = Field(default=None, description="dim ker H'")
    Ntilde: Optional[int] = Field(default=None, description="k=0 的代数重数")
    t_ref: float = Field(description="参考时间")
    consistency: List[Verdict] = Field(default_factory=list, description="一致性判定")

    @property
    def passed(self) -> bool:
        return all(verdict.passed for verdict in self.consistency)

    def verdict_map(self) -> Dict[str, bool]:
        return {verdict.name: verdict.passed for verdict in self.consistency}


class ConditionSpec(BaseModel):
    """顶点条件描述 (文件中的 condspec)"""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    kind: str = Field(description="kirchhoff | anti_kirchhoff | dirichlet | neumann | delta | custom")
    alpha: Optional[float] = Field(default=None, description="delta 耦合常数")
    P: Optional[List[List[complex]]] = Field(default=None, description="custom: Dirichlet 投影")
    Q: Optional[List[List[complex]]] = Field(default=None, description="custom: Neumann 投影")
    L: Optional[List[List[complex]]] = Field(default=None, description="custom: Robin 算子 Λ")


class VertexDeclaration(BaseModel):
    """顶点声明"""
    model_config = ConfigDict(frozen=True)

    vertex_id: str = Field(description="顶点ID")
    condition: ConditionSpec = Field(description="顶点条件")
    line: int = Field(default=0, description="源文件行号")


class EdgeDeclaration(BaseModel):
    """边声明"""
    model_config = ConfigDict(frozen=True)

    edge: EdgeRecord = Field(description="边记录")
    line: int = Field(default=0, description="源文件行号")


class GraphFile(BaseModel):
    """解析后的图描述文件"""
    name: Optional[str] = Field(default=None, description="图名称")
    vertices: List[VertexDeclaration] = Field(default_factory=list, description="顶点声明")
    edges: List[EdgeDeclaration] = Field(default_factory=list, description="边声明")

    def same_structure(self, other: "GraphFile") -> bool:
        """忽略行号比较两个文件的结构"""
        return (
            self.name == other.name
            and [(v.vertex_id, v.condition) for v in self.vertices]
            == [(v.vertex_id, v.condition) for v in other.vertices]
            and [e.edge for e in self.edges] == [e.edge for e in other.edges]
        )


__all__ = [
    "EdgeRecord",
    "CheckResult",
    "ValidationReport",
    "VertexScaleInvariance",
    "ScaleInvarianceReport",
    "SpectralRoot",
    "SpectralData",
    "HeatTraceResult",
    "Verdict",
    "IndexReport",
    "ConditionSpec",
    "VertexDeclaration",
    "EdgeDeclaration",
    "GraphFile",
]
