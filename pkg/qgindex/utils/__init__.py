"""
QGIndex 工具函数模块

提供日志设置、浮点数格式化和 CSV 输出等通用功能。
"""

import csv
import sys
from pathlib import Path
from typing import Any, Iterable, List, Optional, Sequence, TextIO, Union

from loguru import logger

CONSOLE_FORMAT = (
    "<green>{time:YYYY-MM-DD HH:mm:ss}</green> | <level>{level: <8}</level> | "
    "<cyan>{name}</cyan>:<cyan>{function}</cyan>:<cyan>{line}</cyan> | <level>{message}</level>"
)
FILE_FORMAT = "{time:YYYY-MM-DD HH:mm:ss} | {level} | {name}:{function}:{line} | {message}"


def setup_logging(
    level: str = "WARNING",
    debug: bool = False,
    log_file: Optional[Union[str, Path]] = None,
    rotation: str = "10 MB",
    retention_days: int = 7,
    console: bool = True,
    file_format: str = FILE_FORMAT,
) -> None:
    """
    设置日志系统

    诊断信息只写到 stderr，stdout 保留给 CSV 数据。

    Args:
        level: 日志级别
        debug: 是否启用调试模式
        log_file: 日志文件路径，None 表示不写文件
        rotation: 文件轮转大小
        retention_days: 日志保留天数
        console: 是否输出到 stderr
        file_format: 文件日志格式
    """
    logger.remove()

    log_level = "DEBUG" if debug else level.upper()

    if console:
        logger.add(sys.stderr, level=log_level, format=CONSOLE_FORMAT, colorize=True)

    if log_file is not None:
        log_path = Path(log_file)
        if ensure_directory(log_path.parent):
            logger.add(
                log_path,
                level=log_level,
                format=file_format,
                rotation=rotation,
                retention=f"{retention_days} days",
                compression="zip",
            )

    if debug:
        logger.debug("调试模式已启用")


def ensure_directory(path: Path) -> bool:
    """
    确保目录存在

    Args:
        path: 目录路径

    Returns:
        bool: 是否成功
    """
    try:
        path.mkdir(parents=True, exist_ok=True)
        return True
    except Exception as e:
        logger.error(f"创建目录失败 {path}: {e}")
        return False


def format_float(value: Optional[float], digits: int = 17) -> str:
    """浮点数按有效位数输出 (17 位可精确往返)；None 输出为空"""
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, int):
        return str(value)
    text = f"{float(value):.{digits}g}"
    return "0" if text == "-0" else text


def format_cell(value: Any, digits: int = 17) -> str:
    """CSV 单元格格式化"""
    if value is None or isinstance(value, (bool, int, float)):
        return format_float(value, digits)
    return str(value)


def write_csv(
    header: Sequence[str],
    rows: Iterable[Sequence[Any]],
    stream: Optional[TextIO] = None,
    digits: int = 17,
    delimiter: str = ",",
) -> int:
    """
    写出 CSV (带表头)

    Args:
        header: 列名
        rows: 数据行
        stream: 输出流，默认 stdout
        digits: 浮点数有效位数
        delimiter: 分隔符

    Returns:
        int: 写出的数据行数
    """
    stream = stream or sys.stdout
    writer = csv.writer(stream, delimiter=delimiter, lineterminator="\n")
    writer.writerow(header)
    count = 0
    for row in rows:
        writer.writerow([format_cell(value, digits) for value in row])
        count += 1
    return count


def parse_float_list(text: str) -> List[float]:
    """解析逗号分隔的浮点数列表，如 '0.01,0.02'"""
    values = [float(part) for part in text.split(",") if part.strip()]
    if not values:
        raise ValueError(f"空的数值列表: '{text}'")
    return values


__all__ = [
    "setup_logging",
    "ensure_directory",
    "format_float",
    "format_cell",
    "write_csv",
    "parse_float_list",
]
