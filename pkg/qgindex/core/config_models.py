"""
配置管理数据模型

定义所有数值容差、求解器参数和输出选项的数据结构和默认值。
"""

import math
from pathlib import Path
from typing import List

from pydantic import BaseModel, Field, field_validator


class ToleranceConfiguration(BaseModel):
    """数值容差配置"""
    projector_residual: float = Field(default=1e-12, description="投影矩阵/厄米性残差容差")
    rank_threshold: float = Field(default=1e-10, description="秩判定的相对奇异值阈值")
    unitarity: float = Field(default=1e-11, description="酉性残差容差")
    scale_invariance: float = Field(default=1e-12, description="Robin部分 C=I-P-Q 的判零容差")
    subspace_angle: float = Field(default=1e-8, description="解子空间主角容差")
    lambda_invertibility: float = Field(default=1e-10, description="Λ 在 range(C) 上最小奇异值下限")

    @field_validator("*")
    @classmethod
    def validate_positive(cls, v: float) -> float:
        if not 0.0 < v < 1.0:
            raise ValueError("tolerances must lie in (0, 1)")
        return v


class SpectrumConfiguration(BaseModel):
    """久期方程求根配置"""
    root_tolerance: float = Field(default=1e-6, description="零模与正根的分界")
    bisection_tolerance: float = Field(default=1e-10, description="二分法终止宽度")
    merge_window_factor: float = Field(default=10.0, description="重根合并窗口 (倍数 × tol)")
    grid_oversample: int = Field(default=4, description="一般 (Robin) 情形扫描网格加密倍数")
    secular_residual: float = Field(default=1e-8, description="根处 |f(k)| 残差上限")
    multiplicity_window: float = Field(default=1e-6, description="U(k) 单位特征值判定窗口")
    winding_initial_samples: int = Field(default=256, description="环绕数初始采样点数")
    winding_max_samples: int = Field(default=65536, description="环绕数最大采样点数")
    winding_integer_tolerance: float = Field(default=1e-3, description="环绕数取整容差")

    @field_validator("grid_oversample")
    @classmethod
    def validate_oversample(cls, v: int) -> int:
        if v < 1:
            raise ValueError("grid_oversample must be >= 1")
        return v


class HeatTraceConfiguration(BaseModel):
    """热迹计算配置"""
    t_ref: float = Field(default=0.02, description="指标报告使用的参考时间")
    truncation_target: float = Field(default=1e-10, description="自动截断长度的目标误差")
    max_walk_classes: int = Field(default=10_000_000, description="路径类数量上限")
    spectral_epsilon: float = Field(default=1e-14, description="谱求和所需 k_max 的截断精度")
    probe_times: List[float] = Field(
        default=[0.01, 0.02, 0.05],
        description="检验 Tr K - Tr K' 与 t 无关时使用的时间点"
    )
    t_independence_tolerance: float = Field(default=1e-6, description="t 无关性容差")
    constant_match_tolerance: float = Field(default=1e-8, description="与 2×常数项比较的容差")

    @field_validator("t_ref")
    @classmethod
    def validate_t_ref(cls, v: float) -> float:
        if v <= 0.0:
            raise ValueError("t_ref must be positive")
        return v

    def spectral_k_max(self, t: float) -> float:
        """谱求和在时间 t 处所需的最小 k_max"""
        return math.sqrt(-math.log(self.spectral_epsilon) / t)


class OutputConfiguration(BaseModel):
    """输出配置"""
    significant_digits: int = Field(default=17, description="浮点数输出有效位数")
    csv_delimiter: str = Field(default=",", description="CSV 分隔符")


class LoggingConfiguration(BaseModel):
    """日志配置"""
    level: str = Field(default="WARNING", description="日志级别")
    file_enabled: bool = Field(default=False, description="启用文件日志")
    console_enabled: bool = Field(default=True, description="启用控制台日志")
    max_file_size: str = Field(default="10 MB", description="最大日志文件大小")
    retention_days: int = Field(default=7, description="日志保留天数")
    format: str = Field(
        default="{time:YYYY-MM-DD HH:mm:ss} | {level} | {name}:{function}:{line} | {message}",
        description="文件日志格式"
    )

    @field_validator("level")
    @classmethod
    def validate_level(cls, v: str) -> str:
        v = v.upper()
        if v not in ("TRACE", "DEBUG", "INFO", "SUCCESS", "WARNING", "ERROR", "CRITICAL"):
            raise ValueError(f"unknown log level: {v}")
        return v


class ApplicationConfiguration(BaseModel):
    """应用程序总配置"""
    app_name: str = Field(default="QGIndex", description="应用程序名称")
    app_version: str = Field(default="0.1.0", description="应用程序版本")

    tolerances: ToleranceConfiguration = Field(default_factory=ToleranceConfiguration)
    spectrum: SpectrumConfiguration = Field(default_factory=SpectrumConfiguration)
    heat_trace: HeatTraceConfiguration = Field(default_factory=HeatTraceConfiguration)
    output: OutputConfiguration = Field(default_factory=OutputConfiguration)
    logging: LoggingConfiguration = Field(default_factory=LoggingConfiguration)

    log_directory: str = Field(default="", description="日志目录")

    def __init__(self, **data):
        super().__init__(**data)
        if not self.log_directory:
            self.log_directory = str(Path.home() / ".qgindex" / "logs")

    def get_log_file_path(self) -> Path:
        """获取日志文件路径"""
        return Path(self.log_directory) / "qgindex.log"


# 默认配置实例
DEFAULT_CONFIG = ApplicationConfiguration()
