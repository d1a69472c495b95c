"""
数值配置的读写

配置文件按扩展名解析 (.yaml/.yml、.json、.toml)，缺省项取 DEFAULT_CONFIG。
修改均经过 pydantic 重新校验，非法值不会进入运行配置。
"""

import json
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Tuple, Union

import toml
import yaml
from loguru import logger

from .config_models import DEFAULT_CONFIG, ApplicationConfiguration

Watcher = Callable[[Any], None]


class ConfigurationManager:
    """
    运行配置的持有者

    事件 config_loaded / config_saved / config_changed / section_changed /
    config_reset 会通知已注册的监听器。
    """

    def __init__(self, config_file: Optional[Union[str, Path]] = None):
        """
        Args:
            config_file: 配置文件，默认 ~/.qgindex/config.yaml；文件不存在时使用默认值
        """
        self._config: ApplicationConfiguration = DEFAULT_CONFIG.model_copy(deep=True)
        self._watchers: Dict[str, List[Watcher]] = {}
        self._config_file = Path(config_file) if config_file else self._get_default_config_path()
        self.load_config()

    @staticmethod
    def _get_default_config_path() -> Path:
        return Path.home() / ".qgindex" / "config.yaml"

    @property
    def config_file(self) -> Path:
        return self._config_file

    def load_config(self) -> bool:
        """
        从 config_file 读取配置

        不会自动写盘。解析或校验失败时退回默认配置并返回 False。
        """
        if not self._config_file.exists():
            logger.debug(f"未找到 {self._config_file}，容差与求解参数取默认值")
            return True

        try:
            data = self._read_file(self._config_file)
            if data is None:
                return False
            self._config = ApplicationConfiguration(**data)
        except Exception as e:
            logger.error(f"{self._config_file} 无法解析为有效配置: {e}")
            self._config = DEFAULT_CONFIG.model_copy(deep=True)
            return False

        logger.info(f"已读取数值配置 {self._config_file}")
        self._notify_watchers("config_loaded", self._config)
        return True

    @staticmethod
    def _read_file(path: Path) -> Optional[Dict[str, Any]]:
        suffix = path.suffix.lower()
        with open(path, "r", encoding="utf-8") as f:
            if suffix in (".yaml", ".yml"):
                return yaml.safe_load(f) or {}
            if suffix == ".json":
                return json.load(f)
            if suffix == ".toml":
                return toml.load(f)
        logger.error(f"配置文件扩展名 {suffix} 无法识别 (支持 yaml/json/toml)")
        return None

    @staticmethod
    def _write_file(path: Path, data: Dict[str, Any], format: str) -> bool:
        writers: Dict[str, Callable[[Any], None]] = {
            "yaml": lambda f: yaml.safe_dump(data, f, default_flow_style=False, allow_unicode=True),
            "yml": lambda f: yaml.safe_dump(data, f, default_flow_style=False, allow_unicode=True),
            "json": lambda f: json.dump(data, f, indent=2, ensure_ascii=False),
            "toml": lambda f: toml.dump(data, f),
        }
        writer = writers.get(format)
        if writer is None:
            logger.error(f"不能以 {format} 格式写出配置")
            return False
        with open(path, "w", encoding="utf-8") as f:
            writer(f)
        return True

    def save_config(self) -> bool:
        """按 config_file 的扩展名写回当前配置"""
        try:
            self._config_file.parent.mkdir(parents=True, exist_ok=True)
            format = self._config_file.suffix.lower().lstrip(".")
            if not self._write_file(self._config_file, self._config.model_dump(), format):
                return False
        except OSError as e:
            logger.error(f"写入 {self._config_file} 失败: {e}")
            return False

        logger.info(f"数值配置已写入 {self._config_file}")
        self._notify_watchers("config_saved", self._config)
        return True

    def get_config(self) -> ApplicationConfiguration:
        return self._config

    def get_section(self, section: str) -> Optional[Any]:
        """按名称取配置段，如 'spectrum'、'heat_trace'"""
        return getattr(self._config, section, None)

    def get_value(self, key_path: str, default: Any = None) -> Any:
        """
        按点分路径取值

        Args:
            key_path: 例如 'spectrum.bisection_tolerance'
            default: 路径不存在时的返回值
        """
        value: Any = self._config
        try:
            for key in key_path.split("."):
                value = getattr(value, key)
        except AttributeError:
            logger.warning(f"没有配置项 {key_path}")
            return default
        return value

    def set_value(self, key_path: str, value: Any) -> bool:
        """
        修改 'section.key' 形式的单个配置项

        Returns:
            bool: 新值通过校验并生效时为 True
        """
        parts = key_path.split(".")
        if len(parts) != 2:
            logger.error(f"配置项路径应为 section.key: {key_path}")
            return False

        section_name, key = parts
        try:
            section = getattr(self._config, section_name)
            old_value = getattr(section, key)
            setattr(self._config, section_name, type(section)(**{**section.model_dump(), key: value}))
        except (AttributeError, ValueError) as e:
            logger.error(f"拒绝修改 {key_path}: {e}")
            return False

        logger.info(f"{key_path}: {old_value} -> {value}")
        self._notify_watchers("config_changed", {
            "key": key_path,
            "old_value": old_value,
            "new_value": value,
        })
        return True

    def update_section(self, section: str, config_dict: Dict[str, Any]) -> bool:
        """合并更新一个配置段，未知键忽略并告警"""
        try:
            current = getattr(self._config, section)
        except AttributeError:
            logger.error(f"没有配置段 {section}")
            return False

        old_config = current.model_dump()
        merged = dict(old_config)
        for key, value in config_dict.items():
            if key not in old_config:
                logger.warning(f"忽略未知配置项 {section}.{key}")
                continue
            merged[key] = value

        try:
            setattr(self._config, section, type(current)(**merged))
        except ValueError as e:
            logger.error(f"配置段 {section} 校验失败: {e}")
            return False

        logger.info(f"配置段 {section} 已更新")
        self._notify_watchers("section_changed", {
            "section": section,
            "old_config": old_config,
            "new_config": merged,
        })
        return True

    def reset_to_default(self, section: Optional[str] = None) -> bool:
        """section 为 None 时恢复全部默认值"""
        if section is None:
            self._config = DEFAULT_CONFIG.model_copy(deep=True)
            logger.info("全部配置恢复默认")
        else:
            default_section = getattr(DEFAULT_CONFIG, section, None)
            if default_section is None:
                logger.error(f"没有配置段 {section}")
                return False
            setattr(self._config, section, default_section.model_copy(deep=True))
            logger.info(f"配置段 {section} 恢复默认")

        self._notify_watchers("config_reset", section)
        return True

    def validate_config(self) -> Tuple[bool, List[str]]:
        """
        字段校验之外的跨字段检查

        Returns:
            tuple: (是否有效, 问题列表)
        """
        errors: List[str] = []
        try:
            ApplicationConfiguration(**self._config.model_dump())
        except ValueError as e:
            return False, [f"字段校验失败: {e}"]

        spectrum = self._config.spectrum
        if spectrum.bisection_tolerance >= spectrum.root_tolerance:
            errors.append("二分容差必须小于零模分界 root_tolerance")
        if spectrum.winding_initial_samples > spectrum.winding_max_samples:
            errors.append("环绕数初始采样数超过最大采样数")
        if any(t <= 0 for t in self._config.heat_trace.probe_times):
            errors.append("探测时间必须为正")
        if self._config.output.significant_digits < 1:
            errors.append("输出有效位数至少为1")
        return not errors, errors

    def add_watcher(self, event_type: str, callback: Watcher) -> None:
        self._watchers.setdefault(event_type, []).append(callback)

    def remove_watcher(self, event_type: str, callback: Watcher) -> None:
        callbacks = self._watchers.get(event_type, [])
        if callback in callbacks:
            callbacks.remove(callback)

    def _notify_watchers(self, event_type: str, data: Any = None) -> None:
        for callback in self._watchers.get(event_type, []):
            try:
                callback(data)
            except Exception as e:
                logger.error(f"监听器处理 {event_type} 时出错: {e}")

    def export_config(self, export_path: Union[str, Path], format: str = "yaml") -> bool:
        """
        把当前配置写到另一个文件

        Args:
            export_path: 目标路径
            format: 'yaml' | 'json' | 'toml'
        """
        path = Path(export_path)
        try:
            if not self._write_file(path, self._config.model_dump(), format):
                return False
        except OSError as e:
            logger.error(f"导出到 {path} 失败: {e}")
            return False
        logger.info(f"配置已导出到 {path}")
        return True
