#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Logging utilities for faberlab.
"""

import os
import sys
import logging
from pathlib import Path
from typing import List, Optional, Union

# Define log levels and their names
LOG_LEVELS = {
    "debug": logging.DEBUG,
    "info": logging.INFO,
    "warning": logging.WARNING,
    "error": logging.ERROR,
    "critical": logging.CRITICAL,
}

DEFAULT_LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
DEFAULT_DATE_FORMAT = "%Y-%m-%d %H:%M:%S"


def get_log_dir() -> Path:
    """
    Get the directory for storing run logs.

    Returns:
        Path to the log directory
    """
    if sys.platform == "win32":
        log_dir = Path(os.path.expandvars("%APPDATA%")) / "faberlab" / "logs"
    else:
        log_dir = Path.home() / ".config" / "faberlab" / "logs"

    os.makedirs(log_dir, exist_ok=True)
    return log_dir


def configure_logging(
    level: Union[str, int] = "warning",
    log_file: Optional[str] = None,
    console: bool = True,
    default_file: bool = False,
    log_format: str = DEFAULT_LOG_FORMAT,
    date_format: str = DEFAULT_DATE_FORMAT,
) -> None:
    """
    Configure the logging system.

    Console output goes to stderr so that command output on stdout stays clean.

    Args:
        level: Log level name or logging level constant
        log_file: Optional path to log file
        console: Whether to log to the console
        default_file: Also log to faberlab.log in the user log directory
        log_format: Format string for log messages
        date_format: Format string for date/time in log messages
    """
    if isinstance(level, str):
        level = LOG_LEVELS.get(level.lower(), logging.WARNING)

    root_logger = logging.getLogger()
    root_logger.setLevel(level)

    for handler in root_logger.handlers[:]:
        root_logger.removeHandler(handler)

    formatter = logging.Formatter(log_format, date_format)

    if console:
        console_handler = logging.StreamHandler(sys.stderr)
        console_handler.setFormatter(formatter)
        root_logger.addHandler(console_handler)

    targets: List[Path] = []
    if log_file:
        targets.append(Path(log_file))
    if default_file:
        try:
            targets.append(get_log_dir() / "faberlab.log")
        except Exception as e:
            logging.error(f"Failed to create log directory: {str(e)}")

    for target in targets:
        try:
            file_handler = logging.FileHandler(str(target))
            file_handler.setFormatter(formatter)
            root_logger.addHandler(file_handler)
        except Exception as e:
            logging.error(f"Failed to create log file handler for {target}: {str(e)}")

    logging.debug("Logging system initialized")


class LogCapture:
    """
    Collects log records emitted during one operation.

    Used by the verify suite to embed warnings in its report.
    """

    def __init__(self, level: int = logging.WARNING) -> None:
        self.records: List[logging.LogRecord] = []
        self.handler = self._create_handler(level)

    def _create_handler(self, level: int) -> logging.Handler:
        capture = self

        class CaptureHandler(logging.Handler):
            def emit(self, record: logging.LogRecord) -> None:
                capture.records.append(record)

        return CaptureHandler(level)

    def start(self) -> None:
        """Start capturing logs."""
        logging.getLogger().addHandler(self.handler)

    def stop(self) -> None:
        """Stop capturing logs."""
        logging.getLogger().removeHandler(self.handler)

    def __enter__(self) -> "LogCapture":
        self.start()
        return self

    def __exit__(self, exc_type, exc_val, exc_tb) -> None:  # type: ignore[no-untyped-def]
        self.stop()

    def messages(self) -> List[str]:
        return [record.getMessage() for record in self.records]
