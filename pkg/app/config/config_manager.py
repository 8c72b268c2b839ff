"""
Run Settings
============

Settings come from three layers: the typed ``DEFAULTS`` table, the INI file
``config.ini`` next to this module, and ``HECKE_RPF_*`` environment
variables. Command-line flags are merged on top by ``main.RunConfig``.
"""

import os
import configparser
import logging
from typing import Dict, Any, Optional
from pathlib import Path


# The type of each default decides how the INI string is parsed.
DEFAULTS: Dict[str, Dict[str, Any]] = {
    'Precision': {
        'precision_bits': 64,
        'extended_bits': 128,
        'extended_from_k': 5,
        'max_sign_bits': 4096,
    },
    'Verification': {
        'tolerance': 1e-8,
        'sample_count': 100,
        'rng_seed': 0,
        'pole_guard': 1e-6,
        'grid_exclusion': 0.05,
        'strip_points': 10,
        'y_min': 0.2,
        'y_max': 5.0,
        'x_max': 5.0,
    },
    'Enumeration': {
        'depth_factor': 4,
        'max_nodes': 250000,
    },
    'Quadrature': {
        'tail_fraction': 0.1,
        'max_degree': 8,
        'guard_bits': 20,
        'invmellin_truncation': 60.0,
    },
    'Output': {
        'format': 'json',
    },
    'Logging': {
        'level': 'INFO',
        'file_output': False,
        'console_output': True,
        'log_file': 'hecke_rpf.log',
    },
}

ENV_MAPPINGS = {
    'HECKE_RPF_PRECISION': ('Precision', 'precision_bits'),
    'HECKE_RPF_TOLERANCE': ('Verification', 'tolerance'),
    'HECKE_RPF_SEED': ('Verification', 'rng_seed'),
    'HECKE_RPF_MAX_DEPTH_FACTOR': ('Enumeration', 'depth_factor'),
    'HECKE_RPF_LOG_LEVEL': ('Logging', 'level'),
    'HECKE_RPF_OUTPUT_FORMAT': ('Output', 'format'),
}

TRUE_WORDS = ('true', '1', 'yes', 'on')


def _parse_like(raw: str, template: Any) -> Any:
    """Parse ``raw`` into the type of ``template``"""
    if isinstance(template, bool):
        return raw.strip().lower() in TRUE_WORDS
    if isinstance(template, int):
        return int(raw)
    if isinstance(template, float):
        return float(raw)
    return raw


def _ini_text(value: Any) -> str:
    return str(value).lower() if isinstance(value, bool) else str(value)


class ConfigManager:
    """
    Typed view of ``config.ini`` plus environment overrides

    A value that fails to parse is logged and replaced by its default, so a
    bad environment variable never aborts a run.
    """

    def __init__(self, config_file: str = "config.ini"):
        """
        Args:
            config_file: INI file name; relative names resolve next to this module
        """
        self.config_file = config_file
        self.parser = configparser.ConfigParser()
        self.logger = logging.getLogger(__name__)
        self.ready = self._read()

    @property
    def config_path(self) -> Path:
        path = Path(self.config_file)
        return path if path.is_absolute() else Path(__file__).parent / path

    def _read(self) -> bool:
        path = self.config_path
        if not path.exists():
            self.logger.warning(f"no settings file at {path}, writing defaults")
            self._write_defaults(path)
        try:
            self.parser.read(path, encoding='utf-8')
        except configparser.Error as e:
            self.logger.error(f"unreadable settings file {path}: {e}")
            self.parser = configparser.ConfigParser()
            return False

        for env_var, (section, key) in ENV_MAPPINGS.items():
            raw = os.environ.get(env_var)
            if raw is None:
                continue
            self.set(section, key, raw)
            self.logger.debug(f"{section}.{key} <- ${env_var}={raw}")
        return True

    def _write_defaults(self, path: Path) -> None:
        fresh = configparser.ConfigParser()
        for section, values in DEFAULTS.items():
            fresh[section] = {key: _ini_text(value) for key, value in values.items()}
        try:
            with open(path, 'w', encoding='utf-8') as handle:
                fresh.write(handle)
        except OSError as e:
            self.logger.error(f"could not write {path}: {e}")

    def get(self, section: str, key: str, default: Any = None) -> Any:
        """
        Typed value of ``section.key``

        Args:
            section: INI section
            key: Option name
            default: Returned when the key is in neither the file nor ``DEFAULTS``

        Returns:
            The parsed value
        """
        template = DEFAULTS.get(section, {}).get(key)
        if not self.parser.has_option(section, key):
            return default if template is None else template

        raw = self.parser.get(section, key)
        if template is None:
            return raw
        try:
            return _parse_like(raw, template)
        except ValueError:
            self.logger.error(f"bad value for {section}.{key}: {raw!r}, using {template!r}")
            return template

    def set(self, section: str, key: str, value: Any) -> bool:
        """Store ``value`` for this process; the file on disk is untouched"""
        try:
            if not self.parser.has_section(section):
                self.parser.add_section(section)
            self.parser.set(section, key, _ini_text(value))
        except configparser.Error as e:
            self.logger.error(f"cannot set {section}.{key}: {e}")
            return False
        return True

    def get_section(self, section: str) -> Dict[str, Any]:
        keys = set(DEFAULTS.get(section, {}))
        if self.parser.has_section(section):
            keys.update(self.parser.options(section))
        return {key: self.get(section, key) for key in sorted(keys)}

    def get_all_config(self) -> Dict[str, Dict[str, Any]]:
        sections = set(DEFAULTS) | set(self.parser.sections())
        return {section: self.get_section(section) for section in sorted(sections)}


_config_manager: Optional[ConfigManager] = None


def get_config_manager() -> ConfigManager:
    """Process-wide ``ConfigManager``, created on first use"""
    global _config_manager
    if _config_manager is None:
        _config_manager = ConfigManager()
    return _config_manager


def reset_config_manager() -> None:
    """Forget the shared instance; the next access re-reads file and environment"""
    global _config_manager
    _config_manager = None


def get_config(section: str, key: str, default: Any = None) -> Any:
    return get_config_manager().get(section, key, default)


def set_config(section: str, key: str, value: Any) -> bool:
    return get_config_manager().set(section, key, value)


def get_config_section(section: str) -> Dict[str, Any]:
    return get_config_manager().get_section(section)
