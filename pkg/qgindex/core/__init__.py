"""
QGIndex 核心模块

包含配置模型、配置管理器和异常体系。
"""

from .config_models import (
    ApplicationConfiguration,
    ToleranceConfiguration,
    SpectrumConfiguration,
    HeatTraceConfiguration,
    OutputConfiguration,
    LoggingConfiguration,
    DEFAULT_CONFIG,
)

from .config_manager import ConfigurationManager

from .exceptions import (
    QuantumGraphError,
    GraphStructureError,
    VertexConditionError,
    ScatteringError,
    SpectrumError,
    HeatTraceError,
    ConsistencyError,
    GraphFileSyntaxError,
)

__all__ = [
    # 配置相关
    "ApplicationConfiguration",
    "ToleranceConfiguration",
    "SpectrumConfiguration",
    "HeatTraceConfiguration",
    "OutputConfiguration",
    "LoggingConfiguration",
    "DEFAULT_CONFIG",
    "ConfigurationManager",

    # 异常
    "QuantumGraphError",
    "GraphStructureError",
    "VertexConditionError",
    "ScatteringError",
    "SpectrumError",
    "HeatTraceError",
    "ConsistencyError",
    "GraphFileSyntaxError",
]
