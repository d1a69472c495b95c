"""
图描述文件解析与序列化

行格式：
    # 注释到行尾
    graph <name>                       (可选，至多一次，须为首个非注释行)
    vertex <id> <condspec>
    edge <id> <tail> <head> <length>

condspec 为 kirchhoff | anti_kirchhoff | dirichlet | neumann | delta(<float>)
或 custom P=<mat> Q=<mat> L=<mat>，<mat> 形如 [[c,...],[c,...]]，
复数字面量 c 为 a、a+bi 或 a-bi。
"""

import re
from pathlib import Path
from typing import List, Optional, Tuple, Union

from loguru import logger

from ..conditions import ConditionsAssignment, VertexConditions, preset
from ..core.exceptions import GraphFileSyntaxError
from ..graph import MetricGraph, build_graph
from ..models import ConditionSpec, EdgeDeclaration, EdgeRecord, GraphFile, VertexDeclaration

_FLOAT = r"(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?"
_COMPLEX_RE = re.compile(rf"(?P<re>[+-]?{_FLOAT})(?:(?P<sign>[+-])(?P<im>{_FLOAT})i)?")
_LENGTH_RE = re.compile(rf"[+-]?{_FLOAT}|[+-]?(?:inf|nan)")
_IDENT_RE = re.compile(r"[\w.:~\-]+")
_DELTA_RE = re.compile(rf"delta\(\s*(?P<alpha>[+-]?{_FLOAT})\s*\)")
_SPACE_RE = re.compile(r"\s*")

SIMPLE_CONDITIONS = ("kirchhoff", "anti_kirchhoff", "dirichlet", "neumann")


class _LineScanner:
    """单行扫描器，列号从 1 开始"""

    def __init__(self, text: str, line_number: int, source: str):
        self.text = text
        self.line = line_number
        self.source = source
        self.pos = 0

    def error(self, message: str, pos: Optional[int] = None) -> GraphFileSyntaxError:
        column = (self.pos if pos is None else pos) + 1
        return GraphFileSyntaxError(message, self.line, column, self.source)

    def skip_space(self) -> None:
        self.pos = _SPACE_RE.match(self.text, self.pos).end()

    def at_end(self) -> bool:
        self.skip_space()
        return self.pos >= len(self.text)

    def expect(self, pattern: "re.Pattern[str]", what: str) -> "re.Match[str]":
        self.skip_space()
        match = pattern.match(self.text, self.pos)
        if match is None or match.end() == self.pos:
            found = self.text[self.pos:].split(" ", 1)[0] or "行尾"
            raise self.error(f"期望{what}，实际为 '{found}'")
        self.pos = match.end()
        return match

    def expect_literal(self, literal: str) -> None:
        self.skip_space()
        if not self.text.startswith(literal, self.pos):
            raise self.error(f"期望 '{literal}'")
        self.pos += len(literal)

    def token_end(self) -> None:
        """当前位置必须是空白或行尾"""
        if self.pos < len(self.text) and not self.text[self.pos].isspace():
            raise self.error(f"意外的字符 '{self.text[self.pos]}'")

    def finish(self) -> None:
        if not self.at_end():
            raise self.error(f"多余的内容 '{self.text[self.pos:].strip()}'")

    def complex_number(self) -> complex:
        start = self.pos
        match = self.expect(_COMPLEX_RE, "复数")
        if self.pos < len(self.text) and self.text[self.pos] not in ",] \t":
            raise self.error("复数字面量格式错误 (应为 a、a+bi 或 a-bi)", start)
        real = float(match.group("re"))
        imag = 0.0
        if match.group("im") is not None:
            imag = float(match.group("im"))
            if match.group("sign") == "-":
                imag = -imag
        return complex(real, imag)

    def matrix(self) -> List[List[complex]]:
        start = self.pos
        self.expect_literal("[")
        rows: List[List[complex]] = []
        while True:
            self.expect_literal("[")
            row = [self.complex_number()]
            while True:
                self.skip_space()
                if self.text.startswith(",", self.pos):
                    self.pos += 1
                    row.append(self.complex_number())
                    continue
                self.expect_literal("]")
                break
            rows.append(row)
            self.skip_space()
            if self.text.startswith(",", self.pos):
                self.pos += 1
                continue
            self.expect_literal("]")
            break
        width = len(rows[0])
        if any(len(row) != width for row in rows) or width != len(rows):
            raise self.error("矩阵必须为方阵", start)
        return rows


def _parse_condition(scanner: _LineScanner) -> ConditionSpec:
    scanner.skip_space()
    start = scanner.pos
    delta = _DELTA_RE.match(scanner.text, start)
    if delta is not None:
        scanner.pos = delta.end()
        scanner.token_end()
        return ConditionSpec(kind="delta", alpha=float(delta.group("alpha")))

    word = scanner.expect(_IDENT_RE, "顶点条件").group(0)
    if word in SIMPLE_CONDITIONS:
        return ConditionSpec(kind=word)
    if word == "delta":
        raise scanner.error("delta 条件格式应为 delta(<float>)", start)
    if word != "custom":
        raise scanner.error(f"未知的顶点条件 '{word}'", start)

    matrices = {}
    for name in ("P", "Q", "L"):
        scanner.skip_space()
        scanner.expect_literal(f"{name}=")
        matrices[name] = scanner.matrix()
    return ConditionSpec(kind="custom", **matrices)


def parse_graph_file(text: str) -> GraphFile:
    """
    解析图描述文本

    Args:
        text: 文件内容

    Returns:
        GraphFile: 解析结果 (语义检查留给 build_graph / 条件校验)

    Raises:
        GraphFileSyntaxError: 语法错误，附带行号与列号
    """
    name: Optional[str] = None
    vertices: List[VertexDeclaration] = []
    edges: List[EdgeDeclaration] = []
    seen_statement = False

    for line_number, source in enumerate(text.splitlines(), start=1):
        content = source.split("#", 1)[0]
        scanner = _LineScanner(content, line_number, source)
        if scanner.at_end():
            continue

        keyword_start = scanner.pos
        keyword = scanner.expect(_IDENT_RE, "关键字").group(0)
        scanner.token_end()

        if keyword == "graph":
            if seen_statement:
                raise scanner.error("graph 声明只能出现一次且必须位于首行", keyword_start)
            name = scanner.expect(_IDENT_RE, "图名称").group(0)
        elif keyword == "vertex":
            vertex_id = scanner.expect(_IDENT_RE, "顶点ID").group(0)
            scanner.token_end()
            condition = _parse_condition(scanner)
            vertices.append(VertexDeclaration(vertex_id=vertex_id, condition=condition, line=line_number))
        elif keyword == "edge":
            fields = []
            for what in ("边ID", "起点ID", "终点ID"):
                fields.append(scanner.expect(_IDENT_RE, what).group(0))
                scanner.token_end()
            length_start = scanner.pos
            length_text = scanner.expect(_LENGTH_RE, "边长").group(0)
            scanner.token_end()
            try:
                length = float(length_text)
            except ValueError:
                raise scanner.error(f"非法边长 '{length_text}'", length_start) from None
            record = EdgeRecord(edge_id=fields[0], tail=fields[1], head=fields[2], length=length)
            edges.append(EdgeDeclaration(edge=record, line=line_number))
        else:
            raise scanner.error(f"未知关键字 '{keyword}'", keyword_start)

        scanner.finish()
        seen_statement = True

    logger.debug(f"解析图文件: {len(vertices)} 个顶点声明, {len(edges)} 个边声明")
    return GraphFile(name=name, vertices=vertices, edges=edges)


def _format_real(value: float) -> str:
    return repr(float(value))


def _format_complex(value: complex) -> str:
    value = complex(value)
    if value.imag == 0.0:
        return _format_real(value.real)
    sign = "-" if value.imag < 0 else "+"
    return f"{_format_real(value.real)}{sign}{_format_real(abs(value.imag))}i"


def _format_matrix(matrix: List[List[complex]]) -> str:
    return "[" + ",".join("[" + ",".join(_format_complex(c) for c in row) + "]" for row in matrix) + "]"


def _format_condition(condition: ConditionSpec) -> str:
    if condition.kind == "delta":
        return f"delta({_format_real(condition.alpha)})"
    if condition.kind == "custom":
        return (
            f"custom P={_format_matrix(condition.P)} "
            f"Q={_format_matrix(condition.Q)} L={_format_matrix(condition.L)}"
        )
    return condition.kind


def serialize_graph_file(graph_file: GraphFile) -> str:
    """规范化输出，浮点数使用 repr 保证精确往返"""
    lines = []
    if graph_file.name is not None:
        lines.append(f"graph {graph_file.name}")
    for vertex in graph_file.vertices:
        lines.append(f"vertex {vertex.vertex_id} {_format_condition(vertex.condition)}")
    for declaration in graph_file.edges:
        edge = declaration.edge
        lines.append(f"edge {edge.edge_id} {edge.tail} {edge.head} {_format_real(edge.length)}")
    return "\n".join(lines) + "\n"


def condition_from_spec(spec: ConditionSpec, degree: int) -> VertexConditions:
    if spec.kind == "custom":
        return VertexConditions(P=spec.P, Q=spec.Q, Lambda=spec.L)
    return preset(spec.kind, degree, spec.alpha)


def build_from_file(graph_file: GraphFile) -> Tuple[MetricGraph, ConditionsAssignment]:
    """由解析结果构造图与条件分配 (执行全部语义检查)"""
    graph = build_graph(
        [v.vertex_id for v in graph_file.vertices],
        [e.edge for e in graph_file.edges],
        name=graph_file.name,
    )
    degrees = graph.degrees()
    assignment = ConditionsAssignment({
        v.vertex_id: condition_from_spec(v.condition, degrees[v.vertex_id])
        for v in graph_file.vertices
    })
    assignment.check(graph)
    return graph, assignment


def load_graph(source: Union[str, Path]) -> Tuple[MetricGraph, ConditionsAssignment]:
    """
    读取图描述

    Args:
        source: Path 对象视为文件路径，字符串视为文件内容
    """
    if isinstance(source, Path):
        text = source.read_text(encoding="utf-8")
        logger.info(f"读取图文件: {source}")
    else:
        text = source
    return build_from_file(parse_graph_file(text))
