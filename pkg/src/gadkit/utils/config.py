"""
Configuration management for gadkit - YAML files for decoding, exact-oracle,
remote-model, metrics and logging parameters.
"""

from typing import Any, Dict, Optional
from dataclasses import dataclass
from pathlib import Path
import copy
import os

import yaml

REMOTE_TIMEOUT_ENV = "GADKIT_REMOTE_TIMEOUT_MS"
LOG_LEVELS = ("minimal", "normal", "detailed", "debug")


class ConfigError(Exception):
    """Exception raised when configuration is invalid."""
    pass


def _is_int(value: Any) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


@dataclass
class DecodingSettings:
    """Defaults for decoding runs."""
    max_len: int = 32
    seed: int = 17
    iterations: int = 2000
    rejection_budget: int = 100000

    def validate(self) -> None:
        if not _is_int(self.max_len) or self.max_len < 1:
            raise ConfigError(f"decoding.max_len must be a positive integer: {self.max_len}")
        if not _is_int(self.seed) or not 0 <= self.seed < 2 ** 64:
            raise ConfigError(f"decoding.seed must be an integer in [0, 2^64): {self.seed}")
        if not _is_int(self.iterations) or self.iterations < 1:
            raise ConfigError(f"decoding.iterations must be a positive integer: {self.iterations}")
        if not _is_int(self.rejection_budget) or self.rejection_budget < 1:
            raise ConfigError(f"decoding.rejection_budget must be a positive integer: {self.rejection_budget}")


@dataclass
class ExactSettings:
    """Exact oracle parameters."""
    len_bound: int = 16
    tail_tolerance: float = 1e-12

    def validate(self) -> None:
        if not _is_int(self.len_bound) or self.len_bound < 1:
            raise ConfigError(f"exact.len_bound must be a positive integer: {self.len_bound}")
        if not isinstance(self.tail_tolerance, (int, float)) or not 0 < self.tail_tolerance < 1:
            raise ConfigError(f"exact.tail_tolerance must be in (0, 1): {self.tail_tolerance}")


@dataclass
class RemoteSettings:
    """Remote logit service client parameters."""
    timeout_ms: int = 10000
    retries: int = 3
    backoff_seconds: float = 0.25

    def validate(self) -> None:
        if not _is_int(self.timeout_ms) or self.timeout_ms <= 0:
            raise ConfigError(f"remote.timeout_ms must be a positive integer: {self.timeout_ms}")
        if not _is_int(self.retries) or self.retries < 0:
            raise ConfigError(f"remote.retries cannot be negative: {self.retries}")
        if not isinstance(self.backoff_seconds, (int, float)) or self.backoff_seconds < 0:
            raise ConfigError(f"remote.backoff_seconds cannot be negative: {self.backoff_seconds}")


@dataclass
class MetricsSettings:
    """Report parameters."""
    window: int = 500
    predicate: str = "grammatical"

    def validate(self) -> None:
        if not _is_int(self.window) or self.window < 1:
            raise ConfigError(f"metrics.window must be a positive integer: {self.window}")
        if not isinstance(self.predicate, str) or not self.predicate:
            raise ConfigError("metrics.predicate must be a nonempty string")


@dataclass
class LoggingSettings:
    log_level: str = "normal"

    def validate(self) -> None:
        if self.log_level not in LOG_LEVELS:
            raise ConfigError(f"logging.log_level must be one of {', '.join(LOG_LEVELS)}: {self.log_level}")


class Config:
    """
    Main configuration class for gadkit.

    Values are resolved as: built-in defaults < YAML file < environment
    (GADKIT_REMOTE_TIMEOUT_MS) < command-line flags applied by the CLI.
    """

    DEFAULT_CONFIG = {
        'decoding': {
            'max_len': 32,
            'seed': 17,
            'iterations': 2000,
            'rejection_budget': 100000,
        },
        'exact': {
            'len_bound': 16,
            'tail_tolerance': 1e-12,
        },
        'remote': {
            'timeout_ms': 10000,
            'retries': 3,
            'backoff_seconds': 0.25,
        },
        'metrics': {
            'window': 500,
            'predicate': 'grammatical',
        },
        'logging': {
            'log_level': 'normal',
        },
    }

    REQUIRED_SECTIONS = ['decoding', 'exact', 'remote', 'metrics', 'logging']

    def __init__(self, config_file: Optional[str] = None, environ: Optional[Dict[str, str]] = None):
        """
        Initialize configuration.

        Args:
            config_file: Path to a YAML file. If None, the project's
                config/default_decoding.yaml is used when present, else the
                built-in defaults.
            environ: Environment mapping (defaults to os.environ)
        """
        self.config_file = config_file
        self.config_data: Dict[str, Any] = {}

        if config_file:
            self.load_from_file(config_file)
        else:
            default_config_path = self._get_default_config_path()
            if default_config_path and default_config_path.exists():
                self.load_from_file(str(default_config_path))
            else:
                self.config_data = copy.deepcopy(self.DEFAULT_CONFIG)

        self._apply_environment(os.environ if environ is None else environ)
        self._create_config_objects()

    def _get_default_config_path(self) -> Optional[Path]:
        # config.py -> utils -> gadkit -> src -> project root
        project_root = Path(__file__).resolve().parent.parent.parent.parent
        return project_root / "config" / "default_decoding.yaml"

    def load_from_file(self, file_path: str) -> None:
        """
        Load configuration from a YAML file, merged over the defaults.

        Raises:
            ConfigError: missing file, YAML syntax error or bad structure
        """
        path = Path(file_path)
        if not path.exists():
            raise ConfigError(f"Configuration file not found: {file_path}")
        try:
            with open(path, 'r', encoding='utf-8') as f:
                loaded_config = yaml.safe_load(f) or {}
        except yaml.YAMLError as e:
            raise ConfigError(f"Error parsing YAML file: {e}")
        except OSError as e:
            raise ConfigError(f"Error loading configuration: {e}")

        if not isinstance(loaded_config, dict):
            raise ConfigError(f"Configuration file must contain a mapping: {file_path}")
        self.config_data = self._merge_with_defaults(loaded_config)
        self._validate_config()

    def _merge_with_defaults(self, loaded_config: Dict[str, Any]) -> Dict[str, Any]:
        merged = copy.deepcopy(self.DEFAULT_CONFIG)

        def deep_merge(base: Dict, update: Dict) -> Dict:
            for key, value in update.items():
                if key in base and isinstance(base[key], dict) and isinstance(value, dict):
                    deep_merge(base[key], value)
                else:
                    base[key] = value
            return base

        return deep_merge(merged, loaded_config)

    def _validate_config(self) -> None:
        for section in self.REQUIRED_SECTIONS:
            if not isinstance(self.config_data.get(section), dict):
                raise ConfigError(f"Missing required configuration section: {section}")
        for section, values in self.config_data.items():
            if section not in self.DEFAULT_CONFIG:
                raise ConfigError(f"Unknown configuration section: {section}")
            for key in values:
                if key not in self.DEFAULT_CONFIG[section]:
                    raise ConfigError(f"Unknown configuration key: {section}.{key}")

    def _apply_environment(self, environ) -> None:
        raw = environ.get(REMOTE_TIMEOUT_ENV)
        if raw is None or raw == "":
            return
        try:
            self.config_data['remote']['timeout_ms'] = int(raw)
        except ValueError:
            raise ConfigError(f"{REMOTE_TIMEOUT_ENV} must be an integer number of milliseconds: {raw!r}")

    def _create_config_objects(self) -> None:
        try:
            self.decoding = DecodingSettings(**self.config_data['decoding'])
            self.exact = ExactSettings(**self.config_data['exact'])
            self.remote = RemoteSettings(**self.config_data['remote'])
            self.metrics = MetricsSettings(**self.config_data['metrics'])
            self.logging = LoggingSettings(**self.config_data['logging'])
        except TypeError as e:
            raise ConfigError(f"Invalid configuration: {e}")

        self.decoding.validate()
        self.exact.validate()
        self.remote.validate()
        self.metrics.validate()
        self.logging.validate()

    def update(self, section: str, **values: Any) -> None:
        """Override values (e.g. from command-line flags); None values are ignored."""
        if section not in self.DEFAULT_CONFIG:
            raise ConfigError(f"Unknown configuration section: {section}")
        for key, value in values.items():
            if value is None:
                continue
            if key not in self.DEFAULT_CONFIG[section]:
                raise ConfigError(f"Unknown configuration key: {section}.{key}")
            self.config_data[section][key] = value
        self._create_config_objects()

    def save_to_file(self, file_path: str) -> None:
        try:
            with open(file_path, 'w', encoding='utf-8') as f:
                yaml.dump(self.config_data, f, default_flow_style=False, indent=2, sort_keys=False)
        except OSError as e:
            raise ConfigError(f"Error saving configuration: {e}")

    def get_config_dict(self) -> Dict[str, Any]:
        return copy.deepcopy(self.config_data)

    @classmethod
    def create_default_config_file(cls, file_path: str) -> None:
        try:
            with open(file_path, 'w', encoding='utf-8') as f:
                yaml.dump(cls.DEFAULT_CONFIG, f, default_flow_style=False, indent=2, sort_keys=False)
        except OSError as e:
            raise ConfigError(f"Error creating default configuration: {e}")

    def get_summary(self) -> str:
        summary = []
        summary.append("📊 gadkit Configuration Summary")
        summary.append("=" * 40)

        summary.append("\n🎲 Decoding:")
        summary.append(f"  Max Length: {self.decoding.max_len}")
        summary.append(f"  Seed: {self.decoding.seed}")
        summary.append(f"  Iterations: {self.decoding.iterations}")
        summary.append(f"  Rejection Budget: {self.decoding.rejection_budget}")

        summary.append("\n🔢 Exact Oracle:")
        summary.append(f"  Length Bound: {self.exact.len_bound}")
        summary.append(f"  Tail Tolerance: {self.exact.tail_tolerance:g}")

        summary.append("\n🌐 Remote Model:")
        summary.append(f"  Timeout: {self.remote.timeout_ms} ms")
        summary.append(f"  Retries: {self.remote.retries}")
        summary.append(f"  Backoff: {self.remote.backoff_seconds}s")

        summary.append("\n📈 Metrics:")
        summary.append(f"  Window: {self.metrics.window}")
        summary.append(f"  Predicate: {self.metrics.predicate}")

        summary.append(f"\n📝 Log Level: {self.logging.log_level}")

        if self.config_file:
            summary.append(f"\n📁 Loaded from: {self.config_file}")
        else:
            summary.append("\n📁 Using default configuration")

        return "\n".join(summary)
