"""
顶点条件

以 (P, Q, Λ) 形式表示自伴顶点条件：P 为 Dirichlet 部分的正交投影，
Q 为 Neumann 部分的正交投影，Λ 为 C = I - P - Q 值域上的可逆自伴
Robin 耦合。条件写成 A F(v) + B F'(v) = 0，其中 A = P - ΛC, B = Q + C，
F(v) 与 F'(v) 的坐标按 incident_bonds(v) 排列，导数取向外方向。
"""

from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np
from loguru import logger
from scipy import linalg

from ..core.config_models import DEFAULT_CONFIG, ToleranceConfiguration
from ..core.exceptions import ConsistencyError, VertexConditionError
from ..models import CheckResult, ValidationReport


def _readonly(matrix: np.ndarray) -> np.ndarray:
    array = np.array(matrix, dtype=complex, copy=True)
    array.setflags(write=False)
    return array


def _residual(matrix: np.ndarray) -> float:
    return float(np.max(np.abs(matrix))) if matrix.size else 0.0


def _tolerances(tolerances: Optional[ToleranceConfiguration]) -> ToleranceConfiguration:
    return tolerances if tolerances is not None else DEFAULT_CONFIG.tolerances


@dataclass(frozen=True, eq=False)
class VertexConditions:
    """
    单个顶点的条件 (P, Q, Λ)

    Λ 以完整的 d×d 矩阵存储，在 range(C) 之外为零。
    """
    P: np.ndarray
    Q: np.ndarray
    Lambda: np.ndarray
    label: Optional[str] = field(default=None)

    def __post_init__(self) -> None:
        P = np.atleast_2d(np.asarray(self.P, dtype=complex))
        Q = np.atleast_2d(np.asarray(self.Q, dtype=complex))
        L = np.atleast_2d(np.asarray(self.Lambda, dtype=complex))
        for name, matrix in (("P", P), ("Q", Q), ("Lambda", L)):
            if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
                raise VertexConditionError(f"{name} 必须为方阵，实际形状 {matrix.shape}")
        if not (P.shape == Q.shape == L.shape):
            raise VertexConditionError(
                f"P, Q, Λ 尺寸不一致: {P.shape}, {Q.shape}, {L.shape}"
            )
        if P.shape[0] < 1:
            raise VertexConditionError("顶点度数必须 >= 1")
        object.__setattr__(self, "P", _readonly(P))
        object.__setattr__(self, "Q", _readonly(Q))
        object.__setattr__(self, "Lambda", _readonly(L))

    @property
    def degree(self) -> int:
        return int(self.P.shape[0])

    @property
    def C(self) -> np.ndarray:
        """Robin 部分投影 C = I - P - Q"""
        return np.eye(self.degree) - self.P - self.Q

    def permuted(self, order) -> "VertexConditions":
        """按新的坐标顺序重排 (new[j] = old[order[j]])"""
        index = np.asarray(order, dtype=int)
        return VertexConditions(
            P=self.P[np.ix_(index, index)],
            Q=self.Q[np.ix_(index, index)],
            Lambda=self.Lambda[np.ix_(index, index)],
            label=self.label,
        )

    def __repr__(self) -> str:
        tag = self.label or "custom"
        return f"VertexConditions({tag}, d={self.degree})"


def validate(
    conditions: VertexConditions,
    tolerances: Optional[ToleranceConfiguration] = None,
) -> ValidationReport:
    """
    检查顶点条件的全部不变量

    Args:
        conditions: 顶点条件
        tolerances: 数值容差，默认使用全局配置

    Returns:
        ValidationReport: 逐项结果及残差
    """
    tol = _tolerances(tolerances)
    P, Q, L, C = conditions.P, conditions.Q, conditions.Lambda, conditions.C
    eps = tol.projector_residual

    checks = []

    def add(name: str, matrix: np.ndarray) -> None:
        residual = _residual(matrix)
        checks.append(CheckResult(name=name, passed=residual < eps, residual=residual))

    add("P idempotent", P @ P - P)
    add("P hermitian", P - P.conj().T)
    add("Q idempotent", Q @ Q - Q)
    add("Q hermitian", Q - Q.conj().T)
    add("PQ = 0", P @ Q)
    add("QP = 0", Q @ P)
    add("C idempotent", C @ C - C)
    add("C hermitian", C - C.conj().T)
    add("Lambda = C Lambda C", C @ L @ C - L)
    add("Lambda hermitian", L - L.conj().T)

    basis = range_basis(C)
    if basis.shape[1] == 0:
        checks.append(CheckResult(
            name="Lambda invertible on range(C)", passed=True, residual=None,
            detail="C = 0"
        ))
    else:
        restricted = basis.conj().T @ L @ basis
        smallest = float(np.min(np.linalg.svd(restricted, compute_uv=False)))
        checks.append(CheckResult(
            name="Lambda invertible on range(C)",
            passed=smallest > tol.lambda_invertibility,
            residual=smallest,
            detail=f"最小奇异值 {smallest:.3e}",
        ))

    return ValidationReport(subject=repr(conditions), checks=checks)


def require_valid(
    conditions: VertexConditions,
    tolerances: Optional[ToleranceConfiguration] = None,
) -> None:
    """校验失败时抛出 VertexConditionError"""
    report = validate(conditions, tolerances)
    if not report.passed:
        failed = ", ".join(
            f"{check.name} ({check.residual:.2e})" if check.residual is not None else check.name
            for check in report.failures()
        )
        raise VertexConditionError(f"非法顶点条件 {conditions!r}: {failed}")


def range_basis(projector: np.ndarray) -> np.ndarray:
    """正交投影值域的标准正交基 (特征值 > 1/2 的特征向量)"""
    values, vectors = np.linalg.eigh((projector + projector.conj().T) / 2.0)
    return vectors[:, values > 0.5]


def projector_rank(projector: np.ndarray) -> int:
    """投影矩阵的秩：特征值大于 1/2 的个数"""
    values = np.linalg.eigvalsh((projector + projector.conj().T) / 2.0)
    return int(np.sum(values > 0.5))


def to_AB(
    conditions: VertexConditions,
    tolerances: Optional[ToleranceConfiguration] = None,
) -> Tuple[np.ndarray, np.ndarray]:
    """返回 A = P - ΛC, B = Q + C"""
    require_valid(conditions, tolerances)
    C = conditions.C
    A = conditions.P - conditions.Lambda @ C
    B = conditions.Q + C
    return A, B


def solution_subspace(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """
    条件 A F + B F' = 0 的解空间

    Returns:
        np.ndarray: 2d×k 列正交基，每列为 (F; F')
    """
    return linalg.null_space(np.hstack([np.asarray(A, dtype=complex), np.asarray(B, dtype=complex)]))


def same_solution_subspace(
    first: Tuple[np.ndarray, np.ndarray],
    second: Tuple[np.ndarray, np.ndarray],
    tolerances: Optional[ToleranceConfiguration] = None,
) -> bool:
    """两组 (A, B) 是否定义同一解空间 (主角度比较)"""
    tol = _tolerances(tolerances)
    left = solution_subspace(*first)
    right = solution_subspace(*second)
    if left.shape != right.shape:
        return False
    if left.shape[1] == 0:
        return True
    angles = linalg.subspace_angles(left, right)
    return bool(np.max(angles) < tol.subspace_angle)


def from_AB(
    A: np.ndarray,
    B: np.ndarray,
    tolerances: Optional[ToleranceConfiguration] = None,
) -> VertexConditions:
    """
    由 (A, B) 恢复规范形式 (P, Q, Λ)

    P 为 ker B 上的投影；在 W = range(I-P) 上取 M = -B⁺A，
    Q 为 ker M ∩ W 上的投影，Λ = M 限制在 range(C) 上。

    Raises:
        VertexConditionError: [A|B] 秩不足、AB† 非厄米或 Λ 不可判定可逆
    """
    tol = _tolerances(tolerances)
    A = np.atleast_2d(np.asarray(A, dtype=complex))
    B = np.atleast_2d(np.asarray(B, dtype=complex))
    if A.shape != B.shape or A.shape[0] != A.shape[1]:
        raise VertexConditionError(f"A, B 必须为同尺寸方阵: {A.shape}, {B.shape}")
    d = A.shape[0]

    block = np.hstack([A, B])
    singular = np.linalg.svd(block, compute_uv=False)
    rank = int(np.sum(singular > tol.rank_threshold * singular[0])) if singular[0] > 0 else 0
    if rank != d:
        raise VertexConditionError(f"[A|B] 的秩为 {rank}，应为 {d}")

    scale = max(1.0, float(np.linalg.norm(A, 2) * np.linalg.norm(B, 2)))
    hermiticity = _residual(A @ B.conj().T - B @ A.conj().T)
    if hermiticity > tol.rank_threshold * scale:
        raise VertexConditionError(f"AB† 非厄米 (残差 {hermiticity:.2e})，条件不自伴")

    # ker B 与 B⁺ 共用一个绝对截断，B 只含舍入噪声时视为零矩阵
    identity = np.eye(d)
    left, values_B, right = np.linalg.svd(B)
    cutoff = tol.rank_threshold * max(1.0, float(singular[0]))
    kept = values_B > cutoff
    kernel = right[~kept].conj().T
    P = kernel @ kernel.conj().T if kernel.size else np.zeros((d, d), dtype=complex)
    W = identity - P

    B_pinv = right[kept].conj().T @ np.diag(1.0 / values_B[kept]) @ left[:, kept].conj().T
    M = -B_pinv @ A @ W
    M = W @ M @ W
    M = (M + M.conj().T) / 2.0

    values, vectors = np.linalg.eigh(M)
    magnitude = np.abs(values)
    spread = max(1.0, float(np.max(magnitude)) if magnitude.size else 1.0)
    zero_cut = tol.lambda_invertibility * spread
    ambiguous = (magnitude > zero_cut) & (magnitude < 1e2 * zero_cut)
    if np.any(ambiguous):
        raise VertexConditionError(
            f"Λ 的特征值 {values[ambiguous]} 无法判定为零或非零"
        )

    robin = vectors[:, magnitude > zero_cut]
    C = robin @ robin.conj().T if robin.size else np.zeros((d, d), dtype=complex)
    Q = W - C
    Lambda = C @ M @ C

    conditions = VertexConditions(P=P, Q=Q, Lambda=Lambda)
    if not same_solution_subspace(to_AB(conditions, tolerances), (A, B), tolerances):
        raise ConsistencyError("恢复的 (P, Q, Λ) 与输入 (A, B) 的解空间不一致")

    logger.debug(
        f"from_AB: d={d}, rank P={projector_rank(P)}, rank Q={projector_rank(Q)}, "
        f"rank C={robin.shape[1]}"
    )
    return conditions


def is_scale_invariant(
    conditions: VertexConditions,
    tolerances: Optional[ToleranceConfiguration] = None,
) -> bool:
    """无 Robin 部分: ‖I - P - Q‖ < 容差"""
    return _residual(conditions.C) < _tolerances(tolerances).scale_invariance


_DUAL_LABELS = {
    "kirchhoff": "anti_kirchhoff",
    "anti_kirchhoff": "kirchhoff",
    "dirichlet": "neumann",
    "neumann": "dirichlet",
}


def dual(
    conditions: VertexConditions,
    tolerances: Optional[ToleranceConfiguration] = None,
) -> VertexConditions:
    """
    对偶条件：交换 P 与 Q

    Raises:
        VertexConditionError: 条件含 Robin 部分时对偶无定义
    """
    if not is_scale_invariant(conditions, tolerances):
        raise VertexConditionError(f"含 Robin 部分的条件 {conditions!r} 不存在对偶")
    d = conditions.degree
    return VertexConditions(
        P=conditions.Q,
        Q=conditions.P,
        Lambda=np.zeros((d, d), dtype=complex),
        label=_DUAL_LABELS.get(conditions.label or ""),
    )
