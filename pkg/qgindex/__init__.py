"""
QGIndex - 量子图谱、热迹与指标计算工具

度量图上带一般自伴顶点条件的 Laplace 算子：散射矩阵、久期方程求根、
零模重数、热迹的路径求和与谱求和，以及 index = E - p 的多途径交叉校验。
"""

__version__ = "0.1.0"
__description__ = "量子图谱、热迹与指标计算工具"

from .core import DEFAULT_CONFIG, ConfigurationManager, QuantumGraphError
from .graph import MetricGraph, build_graph
from .conditions import ConditionsAssignment, VertexConditions, preset
from .scattering import global_S
from .spectrum import compute_spectral_data, find_spectrum
from .heat import path_sum_heat_trace, spectral_heat_trace
from .index import full_index_report
from .fileformat import load_graph, parse_graph_file

__all__ = [
    "DEFAULT_CONFIG",
    "ConfigurationManager",
    "QuantumGraphError",
    "MetricGraph",
    "build_graph",
    "ConditionsAssignment",
    "VertexConditions",
    "preset",
    "global_S",
    "compute_spectral_data",
    "find_spectrum",
    "path_sum_heat_trace",
    "spectral_heat_trace",
    "full_index_report",
    "load_graph",
    "parse_graph_file",
]
