"""
Performance Profiling
============================

Wall-clock and resident-memory profiling of expensive operations (orbit
enumeration, quadrature sweeps). Results go to the log only, never into
reports.
"""

import time
import functools
from dataclasses import dataclass
from typing import Callable, Optional, Any, List

import psutil

from .logger import get_logger, RpfLogger


@dataclass
class ProfileRecord:
    """One finished profiling section"""
    name: str
    duration: float
    rss_delta_mb: float


class PerformanceProfiler:
    """
    Context manager that times a block and logs the result

    Usage::

        with PerformanceProfiler("enumerate_simple_cycle"):
            ...
    """

    history: List[ProfileRecord] = []
    max_history_size = 256

    def __init__(self, name: str, logger: Optional[RpfLogger] = None):
        """
        Initialize the profiler

        Args:
            name: Profile name
            logger: Logger instance
        """
        self.name = name
        self.logger = logger or get_logger("performance")
        self.start_time: Optional[float] = None
        self.end_time: Optional[float] = None
        self._rss_start = 0

    @staticmethod
    def _rss() -> int:
        return psutil.Process().memory_info().rss

    def __enter__(self) -> "PerformanceProfiler":
        self._rss_start = self._rss()
        self.start_time = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc_val, exc_tb) -> None:
        self.end_time = time.perf_counter()
        duration = self.end_time - self.start_time
        rss_delta = (self._rss() - self._rss_start) / (1024 ** 2)
        self.logger.performance(self.name, duration, rss_delta)

        PerformanceProfiler.history.append(ProfileRecord(self.name, duration, rss_delta))
        if len(PerformanceProfiler.history) > self.max_history_size:
            PerformanceProfiler.history.pop(0)

    def get_duration(self) -> float:
        """Get profiling duration"""
        if self.start_time is None:
            return 0.0
        end_time = self.end_time or time.perf_counter()
        return end_time - self.start_time


def profile_operation(name: str) -> Callable:
    """Decorator for profiling operations"""
    def decorator(func: Callable) -> Callable:
        @functools.wraps(func)
        def wrapper(*args: Any, **kwargs: Any) -> Any:
            with PerformanceProfiler(name):
                return func(*args, **kwargs)
        return wrapper
    return decorator
