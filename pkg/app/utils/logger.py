"""
Logging System
=============

Project logger for the verification library and the command-line driver.
Console output goes to stderr so that stdout carries nothing but reports;
an optional rotating log file receives the detailed DEBUG trail.
"""

import logging
import logging.handlers
import sys
from pathlib import Path
from typing import Optional, Dict, Any


class ColoredFormatter(logging.Formatter):
    """
    Formatter that adds ANSI colors to the level name when stderr is a terminal
    """

    # ANSI color codes
    COLORS = {
        'DEBUG': '\033[36m',      # Cyan
        'INFO': '\033[32m',       # Green
        'WARNING': '\033[33m',    # Yellow
        'ERROR': '\033[31m',      # Red
        'CRITICAL': '\033[35m',   # Magenta
        'RESET': '\033[0m'
    }

    def __init__(self, fmt: Optional[str] = None, datefmt: Optional[str] = None, use_colors: bool = True):
        """
        Initialize the colored formatter

        Args:
            fmt: Log format string
            datefmt: Date format string
            use_colors: Whether to use colors in output
        """
        super().__init__(fmt, datefmt)
        self.use_colors = use_colors

    def format(self, record: logging.LogRecord) -> str:
        """Format the log record with colors"""
        levelname = record.levelname
        if self.use_colors and hasattr(sys.stderr, 'isatty') and sys.stderr.isatty():
            if levelname in self.COLORS:
                record.levelname = f"{self.COLORS[levelname]}{levelname}{self.COLORS['RESET']}"
        try:
            return super().format(record)
        finally:
            record.levelname = levelname


LEVELS = {
    'DEBUG': logging.DEBUG,
    'INFO': logging.INFO,
    'WARNING': logging.WARNING,
    'ERROR': logging.ERROR,
    'CRITICAL': logging.CRITICAL
}


class RpfLogger:
    """
    Logger wrapper used across the package

    Child loggers obtained through ``get_logger(name)`` propagate to the
    root project logger, which owns the handlers.
    """

    ROOT_NAME = "hecke_rpf"

    def __init__(self, name: str = ROOT_NAME):
        """
        Initialize the logger

        Args:
            name: Logger name; names other than the root become children of it
        """
        self.name = name
        full_name = name if name == self.ROOT_NAME else f"{self.ROOT_NAME}.{name}"
        self.logger = logging.getLogger(full_name)
        self.handlers: Dict[str, logging.Handler] = {}

    def configure(self, level: str = "INFO", console_output: bool = True,
                  file_output: bool = False, log_file: str = "hecke_rpf.log") -> None:
        """
        Attach handlers to the root project logger

        Args:
            level: Console log level name
            console_output: Emit to stderr
            file_output: Also write a rotating file under ``logs/``
            log_file: File name of the rotating log
        """
        for handler in list(self.logger.handlers):
            self.logger.removeHandler(handler)
            handler.close()
        self.handlers = {}

        self.logger.setLevel(logging.DEBUG)
        self.logger.propagate = False
        console_level = LEVELS.get(level.upper(), logging.INFO)

        if console_output:
            console_handler = logging.StreamHandler(sys.stderr)
            console_handler.setLevel(console_level)
            console_handler.setFormatter(ColoredFormatter(
                "%(asctime)s | %(levelname)-8s | %(name)s | %(message)s",
                datefmt='%H:%M:%S',
                use_colors=True
            ))
            self.logger.addHandler(console_handler)
            self.handlers['console'] = console_handler

        if file_output:
            log_dir = Path("logs")
            log_dir.mkdir(exist_ok=True)
            file_handler = logging.handlers.RotatingFileHandler(
                log_dir / log_file,
                maxBytes=10*1024*1024,  # 10MB
                backupCount=5,
                encoding='utf-8'
            )
            file_handler.setLevel(logging.DEBUG)
            file_handler.setFormatter(logging.Formatter(
                "%(asctime)s | %(levelname)-8s | %(name)s | "
                "%(filename)s:%(lineno)d | %(funcName)s | %(message)s",
                datefmt='%Y-%m-%d %H:%M:%S'
            ))
            self.logger.addHandler(file_handler)
            self.handlers['file'] = file_handler

        if not self.handlers:
            self.logger.addHandler(logging.NullHandler())

    def debug(self, message: str, **kwargs: Any) -> None:
        """Log debug message"""
        self.logger.debug(message, extra=kwargs)

    def info(self, message: str, **kwargs: Any) -> None:
        """Log info message"""
        self.logger.info(message, extra=kwargs)

    def warning(self, message: str, **kwargs: Any) -> None:
        """Log warning message"""
        self.logger.warning(message, extra=kwargs)

    def error(self, message: str, **kwargs: Any) -> None:
        """Log error message"""
        self.logger.error(message, extra=kwargs)

    def critical(self, message: str, **kwargs: Any) -> None:
        """Log critical message"""
        self.logger.critical(message, extra=kwargs)

    def performance(self, operation: str, duration: float, rss_delta_mb: float = 0.0) -> None:
        """Log timing information for one operation"""
        self.logger.debug(f"PERFORMANCE | {operation} | {duration:.3f}s | rss {rss_delta_mb:+.1f}MB")

    def check_event(self, name: str, **fields: Any) -> None:
        """Log the outcome of a verification check as ``key=value`` pairs"""
        rendered = " ".join(f"{key}={fields[key]}" for key in sorted(fields))
        self.logger.info(f"CHECK | {name} | {rendered}")


# Global logger instances
_root: Optional[RpfLogger] = None
_children: Dict[str, RpfLogger] = {}


def setup_logging(level: str = "INFO", console_output: bool = True,
                  file_output: bool = False, log_file: str = "hecke_rpf.log") -> RpfLogger:
    """
    Set up the project logging system

    Args:
        level: Console log level
        console_output: Emit to stderr
        file_output: Write a rotating log file
        log_file: Log file name

    Returns:
        Configured root logger
    """
    global _root
    if _root is None:
        _root = RpfLogger()
    _root.configure(level, console_output, file_output, log_file)
    return _root


def get_logger(name: str = RpfLogger.ROOT_NAME) -> RpfLogger:
    """
    Get a project logger

    Args:
        name: Component name, e.g. ``"quadratic_forms"``

    Returns:
        Logger instance
    """
    global _root
    if _root is None:
        # Library use without the CLI: stay silent until configured.
        _root = RpfLogger()
        _root.logger.addHandler(logging.NullHandler())
    if name == RpfLogger.ROOT_NAME:
        return _root
    if name not in _children:
        _children[name] = RpfLogger(name)
    return _children[name]
