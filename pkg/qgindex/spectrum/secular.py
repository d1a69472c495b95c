"""
久期方程求谱

U(k) = D(k) S(k)，D 为对角矩阵 D_αα = exp(i k L_α)。
f(k) = det[U(k) - I] 的正根 k_n 给出正特征值 λ_n = k_n²。

尺度不变情形使用精确计数恒等式：U 的本征相位 φ_j ∈ [0, 2π) 关于 k
严格单调递增且 det U(k) = e^{2ikL} det S，因此

    #{根 ∈ (a, b]} = (Σφ_j(a) - Σφ_j(b) + 2L(b - a)) / 2π

一般 (Robin) 情形使用实值化的久期函数 r(k) = f(k) e^{-iΦ(k)/2}
(Φ 为 arg det U 的连续分支) 的变号区间与 |r| 的局部极小。
"""

import math
from typing import Dict, List, Optional, Tuple

import numpy as np
from loguru import logger
from scipy import optimize

from ..conditions import ConditionsAssignment
from ..core.config_models import DEFAULT_CONFIG, ApplicationConfiguration
from ..core.exceptions import SpectrumError
from ..graph import MetricGraph
from ..models import CheckResult, SpectralRoot
from ..scattering import ScatteringAssembler

_TWO_PI = 2.0 * math.pi


class SecularSystem:
    """
    久期系统 U(k) = D(k) S(k)

    封装散射矩阵组装器与键长，提供 U、f 及本征值的求值。
    """

    def __init__(
        self,
        graph: MetricGraph,
        assignment: ConditionsAssignment,
        config: Optional[ApplicationConfiguration] = None,
    ):
        self.config = config or DEFAULT_CONFIG
        self.graph = graph
        self.assembler = ScatteringAssembler(graph, assignment, self.config.tolerances)
        self.bond_lengths = graph.bond_lengths()
        self.total_length = graph.total_length

    @property
    def scale_invariant(self) -> bool:
        return self.assembler.scale_invariant

    def U(self, k: float) -> np.ndarray:
        phases = np.exp(1j * k * self.bond_lengths)
        return phases[:, None] * self.assembler.matrix(k)

    def f(self, k: float) -> complex:
        """f(k) = det[U(k) - I]"""
        U = self.U(k)
        return complex(np.linalg.det(U - np.eye(U.shape[0])))

    def eigenvalues(self, k: float) -> np.ndarray:
        return np.linalg.eigvals(self.U(k))

    def batch_U(self, ks: np.ndarray) -> np.ndarray:
        """尺度不变情形下按 k 堆叠的 U(k)，形状 (n, 2E, 2E)；k 可为复数"""
        S = self.assembler.matrix(1.0)
        phases = np.exp(1j * np.multiply.outer(ks, self.bond_lengths))
        return phases[:, :, None] * S[None, :, :]

    def phase_sums(self, ks: np.ndarray) -> np.ndarray:
        """Σ_j φ_j(k)，本征相位取 [0, 2π)"""
        eigenvalues = np.linalg.eigvals(self.batch_U(np.atleast_1d(ks)))
        return np.mod(np.angle(eigenvalues), _TWO_PI).sum(axis=1)

    def unit_distances(self, k: float) -> np.ndarray:
        """升序排列的 |λ_j(U(k)) - 1|"""
        return np.sort(np.abs(self.eigenvalues(k) - 1.0))

    def root_residual(self, k: float, multiplicity: int) -> float:
        """属于该根的 f 因子之积 Π_{j ≤ mult} |λ_j - 1|"""
        return float(np.prod(self.unit_distances(k)[:multiplicity]))


def secular_matrix(
    graph: MetricGraph,
    assignment: ConditionsAssignment,
    k: float,
    config: Optional[ApplicationConfiguration] = None,
) -> np.ndarray:
    """U(k) = D(k) S(k)"""
    return SecularSystem(graph, assignment, config).U(k)


def secular_function(
    graph: MetricGraph,
    assignment: ConditionsAssignment,
    k: float,
    config: Optional[ApplicationConfiguration] = None,
) -> complex:
    """f(k) = det[U(k) - I]"""
    return SecularSystem(graph, assignment, config).f(k)


def _merge_roots(raw: List[Tuple[float, int]], window: float) -> List[SpectralRoot]:
    """合并窗口内的根，重数相加，位置取重数加权平均"""
    merged: List[SpectralRoot] = []
    cluster: List[Tuple[float, int]] = []

    def flush() -> None:
        if cluster:
            weight = sum(m for _, m in cluster)
            position = sum(k * m for k, m in cluster) / weight
            merged.append(SpectralRoot(k=position, multiplicity=weight))

    for k, multiplicity in sorted(raw):
        if cluster and k - cluster[-1][0] > window:
            flush()
            cluster = []
        cluster.append((k, multiplicity))
    flush()
    return merged


class _PhaseCounter:
    """带缓存的本征相位计数"""

    def __init__(self, system: SecularSystem):
        self.system = system
        self.cache: Dict[float, float] = {}

    def prime(self, ks: np.ndarray) -> None:
        for k, value in zip(ks, self.system.phase_sums(ks)):
            self.cache[float(k)] = float(value)

    def phase_sum(self, k: float) -> float:
        if k not in self.cache:
            self.cache[k] = float(self.system.phase_sums(np.array([k]))[0])
        return self.cache[k]

    def count(self, a: float, b: float) -> int:
        raw = (self.phase_sum(a) - self.phase_sum(b) + 2.0 * self.system.total_length * (b - a)) / _TWO_PI
        nearest = round(raw)
        if abs(raw - nearest) > 1e-6:
            logger.warning(f"根计数在 ({a}, {b}] 上偏离整数: {raw}")
        return max(int(nearest), 0)


def _scale_invariant_roots(
    system: SecularSystem, k_stop: float, tol: float
) -> List[Tuple[float, int]]:
    spectrum = system.config.spectrum
    start = spectrum.root_tolerance
    if k_stop <= start:
        return []

    spacing = math.pi / (4.0 * system.total_length)
    cells = max(1, int(math.ceil((k_stop - start) / spacing)))
    grid = np.linspace(start, k_stop, cells + 1)

    counter = _PhaseCounter(system)
    counter.prime(grid)

    raw: List[Tuple[float, int]] = []
    for a, b in zip(grid[:-1], grid[1:]):
        count = counter.count(float(a), float(b))
        if count == 0:
            continue
        stack = [(float(a), float(b), count)]
        while stack:
            left, right, inside = stack.pop()
            middle = 0.5 * (left + right)
            width = right - left
            if width <= tol:
                residual = system.root_residual(middle, inside)
                if residual < spectrum.secular_residual or width <= 4.0 * np.spacing(right):
                    raw.append((middle, inside))
                    continue
            left_count = counter.count(left, middle)
            right_count = inside - left_count
            if left_count > 0:
                stack.append((left, middle, left_count))
            if right_count > 0:
                stack.append((middle, right, right_count))
    return raw


def _real_secular(system: SecularSystem, k: float, reference: float) -> float:
    """
    r(k) = f(k) e^{-iΦ(k)/2}，Φ 取 reference 附近的分支

    f = Π(λ_j - 1) 而 det U = Πλ_j，2E 为偶数时 r 为实数。
    """
    eigenvalues = system.eigenvalues(k)
    f = np.prod(eigenvalues - 1.0)
    phase = reference + float(np.angle(np.prod(eigenvalues) * np.exp(-1j * reference)))
    return float(np.real(f * np.exp(-0.5j * phase)))


def _general_roots(
    system: SecularSystem, k_stop: float, tol: float
) -> List[Tuple[float, int]]:
    spectrum = system.config.spectrum
    start = spectrum.root_tolerance
    if k_stop <= start:
        return []

    spacing = math.pi / (4.0 * system.total_length * spectrum.grid_oversample)
    cells = max(2, int(math.ceil((k_stop - start) / spacing)))
    grid = np.linspace(start, k_stop, cells + 1)

    eigenvalues = [system.eigenvalues(float(k)) for k in grid]
    phases = np.unwrap([float(np.angle(np.prod(ev))) for ev in eigenvalues])
    values = np.array([
        float(np.real(np.prod(ev - 1.0) * np.exp(-0.5j * phi)))
        for ev, phi in zip(eigenvalues, phases)
    ])
    distances = np.array([float(np.min(np.abs(ev - 1.0))) for ev in eigenvalues])

    raw: List[Tuple[float, int]] = []

    def multiplicity_at(k: float) -> int:
        return max(1, int(np.sum(system.unit_distances(k) < spectrum.multiplicity_window)))

    for i in range(cells):
        a, b = float(grid[i]), float(grid[i + 1])
        if values[i] == 0.0:
            raw.append((a, multiplicity_at(a)))
        elif values[i] * values[i + 1] < 0.0:
            reference = float(phases[i])
            root = optimize.brentq(
                lambda k: _real_secular(system, k, reference), a, b, xtol=tol
            )
            raw.append((root, multiplicity_at(root)))

    # 不变号的偶重根表现为 min|λ - 1| 的局部极小
    for i in range(1, cells):
        if distances[i] > distances[i - 1] or distances[i] > distances[i + 1]:
            continue
        if values[i - 1] * values[i] < 0.0 or values[i] * values[i + 1] < 0.0:
            continue
        result = optimize.minimize_scalar(
            lambda k: float(np.min(np.abs(system.eigenvalues(k) - 1.0))),
            method="bounded",
            bounds=(float(grid[i - 1]), float(grid[i + 1])),
            options={"xatol": tol},
        )
        if result.fun < spectrum.multiplicity_window:
            multiplicity = multiplicity_at(float(result.x))
            if system.root_residual(float(result.x), multiplicity) < spectrum.secular_residual:
                raw.append((float(result.x), multiplicity))
    return raw


def find_spectrum(
    graph: MetricGraph,
    assignment: ConditionsAssignment,
    k_max: float,
    tol: Optional[float] = None,
    config: Optional[ApplicationConfiguration] = None,
) -> List[SpectralRoot]:
    """
    求 (root_tolerance, k_max] 内久期方程的全部正根

    Args:
        graph: 度量图
        assignment: 顶点条件分配
        k_max: 扫描上限
        tol: 二分/求根容差，默认取配置 spectrum.bisection_tolerance
        config: 应用配置

    Returns:
        List[SpectralRoot]: 按 k 升序的根及其重数

    Raises:
        SpectrumError: 参数非法或根无法在给定容差下分离
    """
    config = config or DEFAULT_CONFIG
    spectrum = config.spectrum
    tol = spectrum.bisection_tolerance if tol is None else tol
    if not (k_max > 0.0 and math.isfinite(k_max)):
        raise SpectrumError(f"k_max 必须为正有限数: {k_max}")
    if not tol > 0.0:
        raise SpectrumError(f"容差必须为正: {tol}")

    # k_max 处的根在 k_max 本身上相位为 2π - ε，计数须越过它
    window = spectrum.merge_window_factor * tol
    system = SecularSystem(graph, assignment, config)
    if system.scale_invariant:
        raw = _scale_invariant_roots(system, k_max + window, tol)
    else:
        logger.warning(
            "检测到 Robin (非尺度不变) 顶点条件：散射矩阵依赖 k，"
            "求根不保证本征相位单调，且假定不存在负谱"
        )
        raw = _general_roots(system, k_max + window, tol)

    roots = _merge_roots(raw, window)
    roots = [root for root in roots if spectrum.root_tolerance < root.k <= k_max + tol]

    for root in roots:
        residual = system.root_residual(root.k, root.multiplicity)
        if residual > spectrum.secular_residual:
            raise SpectrumError(
                f"k={root.k} 处久期残差 {residual:.3e} 超过 {spectrum.secular_residual:.1e}，"
                "无法在给定容差下分离根"
            )
        window_count = int(np.sum(system.unit_distances(root.k) < spectrum.multiplicity_window))
        if window_count != root.multiplicity:
            logger.warning(
                f"k={root.k}: 计数重数 {root.multiplicity} 与单位特征值个数 {window_count} 不一致"
            )

    logger.info(f"找到 {len(roots)} 个不同正根 (计重数 {sum(r.multiplicity for r in roots)})，k_max={k_max}")
    return roots


def weyl_check(
    roots: List[SpectralRoot],
    total_length: float,
    k: float,
    edges: int,
) -> CheckResult:
    """根计数与 Weyl 渐近 L k / π 的比较，允许偏差 2E + 2"""
    count = sum(root.multiplicity for root in roots if root.k <= k)
    deviation = abs(count - total_length * k / math.pi)
    return CheckResult(
        name="weyl counting",
        passed=deviation <= 2 * edges + 2,
        residual=deviation,
        detail=f"N({k:.6g}) = {count}, Lk/π = {total_length * k / math.pi:.6g}",
    )
