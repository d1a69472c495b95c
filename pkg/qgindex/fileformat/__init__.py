"""
图描述文件格式
"""

from .parser import (
    SIMPLE_CONDITIONS,
    parse_graph_file,
    serialize_graph_file,
    condition_from_spec,
    build_from_file,
    load_graph,
)

__all__ = [
    "SIMPLE_CONDITIONS",
    "parse_graph_file",
    "serialize_graph_file",
    "condition_from_spec",
    "build_from_file",
    "load_graph",
]
