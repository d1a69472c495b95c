"""
异常定义

所有计算模块抛出的异常都继承自 QuantumGraphError (ValueError 子类)，
CLI 和报告生成器据此区分"输入/数值问题"与程序错误。
"""

from typing import Optional


class QuantumGraphError(ValueError):
    """量子图计算异常基类"""


class GraphStructureError(QuantumGraphError):
    """图结构错误 (重复ID、未知端点、非法长度、孤立顶点等)"""


class VertexConditionError(QuantumGraphError):
    """顶点条件错误 (投影矩阵非法、度数不匹配、非自伴等)"""


class ScatteringError(QuantumGraphError):
    """散射矩阵计算错误"""


class SpectrumError(QuantumGraphError):
    """谱计算错误 (参数非法、根无法分离、环绕数不收敛)"""


class HeatTraceError(QuantumGraphError):
    """热迹计算错误 (截断不足、路径类数量超限)"""


class ConsistencyError(QuantumGraphError):
    """数值恒等式校验失败"""


class GraphFileSyntaxError(QuantumGraphError):
    """图描述文件语法错误，携带行号和列号"""

    def __init__(self, message: str, line: int, column: int, source_line: Optional[str] = None):
        self.line = line
        self.column = column
        self.source_line = source_line
        super().__init__(f"第 {line} 行第 {column} 列: {message}")
