#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
QGIndex 命令行入口

子命令: validate, spectrum, scattering, heat-trace, index, verify。
数据以 CSV 写到 stdout，诊断信息写到 stderr。

退出码: 0 成功/全部通过；1 校验或计算失败；2 用法错误或文件不可读。
"""

import argparse
import math
import sys
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from loguru import logger

from . import __version__
from .conditions import ConditionsAssignment, validate
from .core import (
    DEFAULT_CONFIG,
    ApplicationConfiguration,
    ConfigurationManager,
    GraphFileSyntaxError,
    QuantumGraphError,
)
from .fileformat import load_graph
from .graph import MetricGraph
from .heat import (
    constant_term_from_S,
    path_sum_heat_trace,
    spectral_heat_trace_result,
)
from .index import full_index_report
from .models import HeatTraceResult
from .rules import RuleEngine
from .scattering import global_S
from .spectrum import compute_spectral_data
from .utils import format_float, parse_float_list, setup_logging, write_csv

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

INDEX_FIELDS = [
    "E", "V", "p", "index_formula", "index_kernels", "index_strace", "index_heat",
    "euler", "N0", "N0_dual", "Ntilde", "t_ref",
]
HEAT_FIELDS = ["t", "total", "weyl", "constant", "orbit_sum", "bound"]


class UsageError(Exception):
    """命令行用法错误或输入文件不可读"""


def _cutoff_argument(text: str) -> Optional[float]:
    if text == "auto":
        return None
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"截断长度应为 auto 或正数: '{text}'") from None
    if not value > 0.0:
        raise argparse.ArgumentTypeError(f"截断长度必须为正: {value}")
    return value


def _times_argument(text: str) -> List[float]:
    try:
        times = parse_float_list(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from None
    if any(not t > 0.0 for t in times):
        raise argparse.ArgumentTypeError(f"时间必须为正: '{text}'")
    return times


def create_argument_parser() -> argparse.ArgumentParser:
    """创建命令行参数解析器"""
    parser = argparse.ArgumentParser(
        prog="qgindex",
        description="QGIndex - 量子图谱、热迹与指标计算工具",
        epilog="使用示例: qgindex spectrum interval.qg --kmax 10",
    )
    parser.add_argument("--version", action="version", version=f"QGIndex {__version__}")
    parser.add_argument("--config", help="配置文件路径 (yaml/json/toml)")
    parser.add_argument("--debug", action="store_true", help="启用调试模式")
    parser.add_argument(
        "--log-level",
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        default=None,
        help="设置日志级别 (默认取配置文件)",
    )

    subparsers = parser.add_subparsers(dest="command", help="可用命令")

    validate_parser = subparsers.add_parser("validate", help="解析并校验图描述文件")
    validate_parser.add_argument("file", help="图描述文件")

    spectrum_parser = subparsers.add_parser("spectrum", help="求久期方程的正根")
    spectrum_parser.add_argument("file", help="图描述文件")
    spectrum_parser.add_argument("--kmax", type=float, required=True, help="扫描上限 k_max")
    spectrum_parser.add_argument("--tol", type=float, default=None, help="求根容差 (默认 1e-10)")

    scattering_parser = subparsers.add_parser("scattering", help="输出全局散射矩阵的非零元")
    scattering_parser.add_argument("file", help="图描述文件")
    scattering_parser.add_argument("--k", type=float, default=1.0, help="频率 k (默认 1.0)")

    heat_parser = subparsers.add_parser("heat-trace", help="计算热迹")
    heat_parser.add_argument("file", help="图描述文件")
    heat_parser.add_argument("--t", type=_times_argument, required=True, help="时间，逗号分隔")
    heat_parser.add_argument(
        "--method", choices=["spectral", "paths", "both"], default="paths", help="计算途径"
    )
    heat_parser.add_argument(
        "--cutoff", type=_cutoff_argument, default=None, help="路径长度截断 (auto 或正数)"
    )

    index_parser = subparsers.add_parser("index", help="生成指标报告")
    index_parser.add_argument("file", help="图描述文件")
    index_parser.add_argument("--tref", type=float, default=None, help="热迹参考时间 (默认 0.02)")

    verify_parser = subparsers.add_parser("verify", help="运行完整不变量校验")
    verify_parser.add_argument("file", help="图描述文件")
    verify_parser.add_argument("--rules", help="规则覆盖文件 (json/yaml)")
    verify_parser.add_argument(
        "--category", action="append", default=None, help="只运行指定类别 (可重复)"
    )

    return parser


def _load_configuration(path: Optional[str]) -> ApplicationConfiguration:
    if path is None:
        return DEFAULT_CONFIG
    config_file = Path(path)
    if not config_file.is_file():
        raise UsageError(f"配置文件不可读: {config_file}")
    manager = ConfigurationManager(config_file)
    valid, errors = manager.validate_config()
    if not valid:
        raise UsageError(f"配置无效: {'; '.join(errors)}")
    return manager.get_config()


def _read_input(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as e:
        raise UsageError(f"无法读取文件 {path}: {e}") from None


def _load(path: str) -> Tuple[MetricGraph, ConditionsAssignment]:
    return load_graph(_read_input(path))


def command_validate(args: argparse.Namespace, config: ApplicationConfiguration) -> int:
    """解析 + 建图 + 顶点条件校验"""
    text = _read_input(args.file)
    try:
        graph, assignment = load_graph(text)
    except GraphFileSyntaxError as e:
        print(f"FAIL syntax: {e}")
        return EXIT_FAILURE
    except QuantumGraphError as e:
        print(f"FAIL structure: {e}")
        return EXIT_FAILURE

    passed = True
    for vertex, conditions in assignment.items():
        report = validate(conditions, config.tolerances)
        status = "PASS" if report.passed else "FAIL"
        print(f"{status} vertex {vertex} ({conditions.label or 'custom'}, d={conditions.degree})")
        passed = passed and report.passed
    kind = "scale-invariant" if assignment.is_scale_invariant(config.tolerances) else "robin"
    print(f"PASS graph {graph.name or '-'} V={graph.V} E={graph.E} {kind}")
    return EXIT_OK if passed else EXIT_FAILURE


def command_spectrum(args: argparse.Namespace, config: ApplicationConfiguration) -> int:
    """CSV k,multiplicity 及尾注 N0,N0_dual,Ntilde"""
    graph, assignment = _load(args.file)
    data = compute_spectral_data(graph, assignment, args.kmax, args.tol, config)
    digits = config.output.significant_digits
    write_csv(
        ["k", "multiplicity"],
        ([root.k, root.multiplicity] for root in data.roots),
        digits=digits,
        delimiter=config.output.csv_delimiter,
    )
    trailer = ",".join(format_float(v, digits) for v in (data.N0, data.N0_dual, data.Ntilde))
    print(f"# N0,N0_dual,Ntilde={trailer}")
    return EXIT_OK


def command_scattering(args: argparse.Namespace, config: ApplicationConfiguration) -> int:
    """CSV row,col,re,im (仅非零元)"""
    graph, assignment = _load(args.file)
    S = global_S(graph, assignment, k=args.k, tolerances=config.tolerances)
    rows, cols = np.nonzero(S.matrix)
    write_csv(
        ["row", "col", "re", "im"],
        ([int(r), int(c), float(S.matrix[r, c].real), float(S.matrix[r, c].imag)] for r, c in zip(rows, cols)),
        digits=config.output.significant_digits,
        delimiter=config.output.csv_delimiter,
    )
    return EXIT_OK


def command_heat_trace(args: argparse.Namespace, config: ApplicationConfiguration) -> int:
    """CSV t,total,weyl,constant,orbit_sum,bound[,discrepancy]"""
    graph, assignment = _load(args.file)
    times: List[float] = args.t
    scale_invariant = assignment.is_scale_invariant(config.tolerances)
    if args.method in ("paths", "both") and not scale_invariant:
        logger.error("路径求和要求尺度不变条件，Robin 输入只能使用 --method spectral")
        return EXIT_FAILURE

    S = global_S(graph, assignment, tolerances=config.tolerances)
    constant = constant_term_from_S(graph, S) if scale_invariant else math.nan

    spectral: Dict[float, HeatTraceResult] = {}
    if args.method in ("spectral", "both"):
        k_max = config.heat_trace.spectral_k_max(min(times))
        data = compute_spectral_data(graph, assignment, k_max, config=config)
        spectral = {t: spectral_heat_trace_result(graph, data, t, constant, config) for t in times}

    header = list(HEAT_FIELDS)
    rows = []
    for t in times:
        if args.method == "spectral":
            result = spectral[t]
        else:
            result = path_sum_heat_trace(graph, S, t, cutoff=args.cutoff, config=config)
        row = [t, result.total, result.weyl, result.constant, result.orbit_sum, result.truncation_bound]
        if args.method == "both":
            row.append(abs(result.total - spectral[t].total))
        rows.append(row)
    if args.method == "both":
        header.append("discrepancy")

    write_csv(header, rows, digits=config.output.significant_digits, delimiter=config.output.csv_delimiter)
    return EXIT_OK


def command_index(args: argparse.Namespace, config: ApplicationConfiguration) -> int:
    """CSV 一行指标报告及 verdict 列"""
    graph, assignment = _load(args.file)
    report = full_index_report(graph, assignment, args.tref, config)
    for verdict in report.consistency:
        log = logger.info if verdict.passed else logger.warning
        log(f"{verdict.name}: {'PASS' if verdict.passed else 'FAIL'} {verdict.detail}")
    values = report.model_dump()
    row = [values[name] for name in INDEX_FIELDS] + ["PASS" if report.passed else "FAIL"]
    write_csv(
        INDEX_FIELDS + ["verdict"],
        [row],
        digits=config.output.significant_digits,
        delimiter=config.output.csv_delimiter,
    )
    return EXIT_OK if report.passed else EXIT_FAILURE


def command_verify(args: argparse.Namespace, config: ApplicationConfiguration) -> int:
    """运行规则引擎，逐条输出 PASS/FAIL/SKIP"""
    graph, assignment = _load(args.file)
    engine = RuleEngine(config)
    if args.rules:
        try:
            engine.load_rule_file(args.rules)
        except OSError as e:
            raise UsageError(f"无法读取规则文件 {args.rules}: {e}") from None
    results = engine.execute_rules(graph, assignment, args.category)
    write_csv(
        ["check", "status", "residual", "evidence"],
        ([r.rule_id, r.status, r.residual, "; ".join(r.evidence)] for r in results),
        digits=config.output.significant_digits,
        delimiter=config.output.csv_delimiter,
    )
    failed = [r.rule_id for r in results if not r.passed]
    if failed:
        logger.error(f"校验失败: {', '.join(failed)}")
        return EXIT_FAILURE
    return EXIT_OK


COMMANDS: Dict[str, Callable[[argparse.Namespace, ApplicationConfiguration], int]] = {
    "validate": command_validate,
    "spectrum": command_spectrum,
    "scattering": command_scattering,
    "heat-trace": command_heat_trace,
    "index": command_index,
    "verify": command_verify,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    """主函数"""
    parser = create_argument_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE

    if args.command is None:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE

    try:
        config = _load_configuration(args.config)
        log_file: Optional[Union[str, Path]] = None
        if config.logging.file_enabled:
            log_file = config.get_log_file_path()
        setup_logging(
            level=args.log_level or config.logging.level,
            debug=args.debug,
            log_file=log_file,
            rotation=config.logging.max_file_size,
            retention_days=config.logging.retention_days,
            console=config.logging.console_enabled,
            file_format=config.logging.format,
        )
        logger.debug(f"执行命令 {args.command}")
        return COMMANDS[args.command](args, config)

    except UsageError as e:
        print(f"qgindex: {e}", file=sys.stderr)
        return EXIT_USAGE
    except QuantumGraphError as e:
        print(f"qgindex: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
