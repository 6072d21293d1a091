"""
Configuration settings for hardness-chain
"""

import logging
import os
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Any, Dict, Optional

import yaml

logger = logging.getLogger(__name__)

COEFF_MODES = ("derived", "paper")
RESIDUE_MODES = ("pair", "full")


@dataclass
class ReductionConfig:
    """Configuration for the reduction chain"""
    coeff_mode: str = "derived"
    residue_mode: str = "full"
    encode: bool = False


@dataclass
class OracleConfig:
    """Limits of the brute-force oracles"""
    brute_cap: int = 10 ** 7
    max_sat_vars: int = 24
    max_sign_bits: int = 20
    mrd_search_limit: int = 1 << 24
    exhaustive_limit: int = 10 ** 7
    vector_chunk: int = 10 ** 6


@dataclass
class ParserConfig:
    """Configuration for input files"""
    max_file_size_mb: int = 64
    encoding: str = "utf-8"


@dataclass
class CorpusConfig:
    """Configuration for random 3-CNF corpora"""
    count: int = 20
    num_vars: int = 3
    num_clauses: int = 3
    seed: int = 0


@dataclass
class AuditConfig:
    """Configuration for the structural audit"""
    uniqueness_samples: int = 1000
    seed: int = 0
    strict: bool = True


@dataclass
class LoggingConfig:
    """Configuration for logging"""
    level: str = "INFO"
    format: str = "%(message)s"
    file_path: str = "./logs/hardness_chain.log"
    max_file_size_mb: int = 10
    backup_count: int = 5
    enable_console: bool = True
    enable_file: bool = False


class Settings:
    """Main settings class for hardness-chain"""

    SECTIONS = ("reduction", "oracle", "parsers", "corpus", "audit", "logging")

    def __init__(self, config_path: Optional[str] = None):
        self.reduction = ReductionConfig()
        self.oracle = OracleConfig()
        self.parsers = ParserConfig()
        self.corpus = CorpusConfig()
        self.audit = AuditConfig()
        self.logging = LoggingConfig()

        # Load configuration from file or environment
        if config_path:
            self.load_from_file(config_path)
        else:
            self.load_from_env()

    def load_from_file(self, config_path: str):
        """Load configuration from YAML file

        Unknown keys and values of the wrong type are skipped with a warning.
        """
        try:
            with open(config_path, "r") as f:
                config_data = yaml.safe_load(f) or {}
        except (OSError, yaml.YAMLError) as e:
            logger.warning(f"Could not load config file {config_path}: {e}")
            return
        if not isinstance(config_data, dict):
            logger.warning(f"Config file {config_path} is not a mapping, using defaults")
            return

        for section_name in self.SECTIONS:
            values = config_data.get(section_name)
            if not isinstance(values, dict):
                continue
            section = getattr(self, section_name)
            for key, value in values.items():
                self._assign(section, section_name, key, value)

        self._validate_modes()

    def _assign(self, section: Any, section_name: str, key: str, value: Any):
        if not hasattr(section, key):
            logger.warning(f"Unknown setting {section_name}.{key}")
            return
        current = getattr(section, key)
        if isinstance(current, bool):
            if not isinstance(value, bool):
                logger.warning(f"Setting {section_name}.{key} must be a boolean")
                return
        elif isinstance(current, int):
            if isinstance(value, bool) or not isinstance(value, int):
                logger.warning(f"Setting {section_name}.{key} must be an integer")
                return
        else:
            value = str(value)
        setattr(section, key, value)

    def _validate_modes(self):
        if self.reduction.coeff_mode not in COEFF_MODES:
            logger.warning(f"Invalid coeff_mode {self.reduction.coeff_mode!r}, using 'derived'")
            self.reduction.coeff_mode = "derived"
        if self.reduction.residue_mode not in RESIDUE_MODES:
            logger.warning(f"Invalid residue_mode {self.reduction.residue_mode!r}, using 'full'")
            self.reduction.residue_mode = "full"

    def _int_from_env(self, name: str, default: int) -> int:
        raw = os.getenv(name)
        if raw is None:
            return default
        try:
            return int(raw)
        except ValueError:
            logger.warning(f"Ignoring {name}={raw!r}: not an integer")
            return default

    def load_from_env(self):
        """Load configuration from environment variables"""
        # Reduction
        self.reduction.coeff_mode = os.getenv("HCHAIN_COEFF_MODE", self.reduction.coeff_mode)
        self.reduction.residue_mode = os.getenv("HCHAIN_RESIDUE_MODE", self.reduction.residue_mode)

        # Oracles and seeds
        self.oracle.brute_cap = self._int_from_env("HCHAIN_BRUTE_CAP", self.oracle.brute_cap)
        seed = self._int_from_env("HCHAIN_SEED", self.corpus.seed)
        self.corpus.seed = seed
        self.audit.seed = seed

        # Logging
        self.logging.level = os.getenv("LOG_LEVEL", self.logging.level)
        file_path = os.getenv("LOG_FILE_PATH")
        if file_path:
            self.logging.file_path = file_path
            self.logging.enable_file = True

        self._validate_modes()

    def to_dict(self) -> Dict[str, Any]:
        """Convert settings to dictionary"""
        return {name: asdict(getattr(self, name)) for name in self.SECTIONS}

    def save_to_file(self, config_path: str):
        """Save current settings to YAML file"""
        config_data = self.to_dict()

        Path(config_path).parent.mkdir(parents=True, exist_ok=True)

        with open(config_path, "w") as f:
            yaml.safe_dump(config_data, f, default_flow_style=False, indent=2, sort_keys=False)
