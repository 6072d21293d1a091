"""
Logging configuration for hardness-chain
"""

import logging
import logging.handlers
from pathlib import Path
from typing import Optional

from rich.logging import RichHandler


def setup_logging(config: Optional[object] = None, verbose: bool = False):
    """Setup logging configuration

    The console goes through rich; the rotating file handler is only added
    when the configuration enables it.
    """

    # Default values
    level = "INFO"
    log_format = "%(message)s"
    file_path = "./logs/hardness_chain.log"
    max_file_size_mb = 10
    backup_count = 5
    enable_console = True
    enable_file = False

    # Use config if provided
    if config:
        level = getattr(config, "level", level)
        log_format = getattr(config, "format", log_format)
        file_path = getattr(config, "file_path", file_path)
        max_file_size_mb = getattr(config, "max_file_size_mb", max_file_size_mb)
        backup_count = getattr(config, "backup_count", backup_count)
        enable_console = getattr(config, "enable_console", enable_console)
        enable_file = getattr(config, "enable_file", enable_file)

    if verbose:
        level = "DEBUG"

    # Clear existing handlers
    root_logger = logging.getLogger()
    for handler in root_logger.handlers[:]:
        root_logger.removeHandler(handler)

    numeric_level = getattr(logging, str(level).upper(), logging.INFO)
    root_logger.setLevel(numeric_level)

    if enable_console:
        console_handler = RichHandler(show_path=False, rich_tracebacks=True)
        console_handler.setLevel(numeric_level)
        console_handler.setFormatter(logging.Formatter(log_format))
        root_logger.addHandler(console_handler)

    # File handler with rotation
    if enable_file:
        log_path = Path(file_path)
        log_path.parent.mkdir(parents=True, exist_ok=True)

        file_handler = logging.handlers.RotatingFileHandler(
            file_path,
            maxBytes=max_file_size_mb * 1024 * 1024,
            backupCount=backup_count,
        )
        file_handler.setLevel(numeric_level)
        file_handler.setFormatter(
            logging.Formatter("%(asctime)s - %(name)s - %(levelname)s - %(message)s")
        )
        root_logger.addHandler(file_handler)

    # Suppress noisy loggers
    logging.getLogger("sympy").setLevel(logging.WARNING)

    logging.getLogger(__name__).debug("Logging configuration initialized")
