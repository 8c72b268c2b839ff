"""
Check Manager
=============

Discovers ``BaseCheck`` subclasses in the modules of the ``checks``
package, indexes them by name and runs them against a context. A check
that raises a package exception yields a failed report rather than
aborting the remaining checks; enumeration failures are re-raised so the
driver can map them to their own exit code.
"""

import importlib
from pathlib import Path
from typing import Dict, List, Optional

from checks.base_check import BaseCheck, CheckContext, CheckInfo, CheckReport
from utils.errors import HeckeRpfError, IncompleteEnumerationError, InputError
from utils.logger import get_logger
from utils.performance import PerformanceProfiler

SKIP_FILES = {"__init__.py", "base_check.py", "check_manager.py"}


class CheckManager:
    """
    Check registry

    Loads every check class once and serves them by name.
    """

    def __init__(self, checks_dir: Optional[str] = None):
        """
        Initialize the check manager

        Args:
            checks_dir: Directory containing check modules (this package by default)
        """
        self.checks_dir = Path(checks_dir) if checks_dir else Path(__file__).parent
        self.checks: Dict[str, BaseCheck] = {}
        self.logger = get_logger("check_manager")

    def load_checks(self) -> int:
        """
        Import every check module and instantiate its checks

        Returns:
            Number of registered checks
        """
        modules = sorted(f for f in self.checks_dir.glob("*.py") if f.name not in SKIP_FILES)
        self.logger.debug(f"found {len(modules)} check modules in {self.checks_dir}")
        for module_file in modules:
            self._load_module(module_file)
        self.logger.debug(f"registered checks: {', '.join(sorted(self.checks))}")
        return len(self.checks)

    def _load_module(self, module_file: Path) -> None:
        module = importlib.import_module(f"checks.{module_file.stem}")
        for attr_name in dir(module):
            attr = getattr(module, attr_name)
            if isinstance(attr, type) and issubclass(attr, BaseCheck) and attr is not BaseCheck \
                    and not getattr(attr, "__abstractmethods__", None):
                check = attr()
                if check.info.name in self.checks:
                    continue
                self.checks[check.info.name] = check

    def get_check(self, name: str) -> BaseCheck:
        if not self.checks:
            self.load_checks()
        try:
            return self.checks[name]
        except KeyError:
            raise InputError(f"unknown check {name!r}; available: {', '.join(self.names())}") from None

    def names(self) -> List[str]:
        if not self.checks:
            self.load_checks()
        return sorted(self.checks)

    def get_check_list(self) -> List[CheckInfo]:
        return [self.checks[name].info for name in self.names()]

    def run(self, name: str, context: CheckContext) -> CheckReport:
        """
        Run one check

        Raises:
            InputError: the check needs inputs the context lacks
            IncompleteEnumerationError: propagated from cycle enumeration
        """
        check = self.get_check(name)
        missing = check.missing_inputs(context)
        if missing:
            raise InputError(f"check {name!r} needs {', '.join(missing)}")
        with PerformanceProfiler(f"check {name}", self.logger):
            try:
                report = check.run(context)
            except (IncompleteEnumerationError, InputError):
                raise
            except HeckeRpfError as e:
                self.logger.error(f"check {name!r} aborted: {e.message}")
                report = CheckReport(name, context.tolerance)
                report.fail(f"{type(e).__name__}: {e.message}")
        status = "pass" if report.passed else "FAIL"
        self.logger.info(f"{name}: {status} (max residual {report.max_residual:.3e}, {report.n_samples} samples)")
        return report

    def run_many(self, names: List[str], context: CheckContext) -> List[CheckReport]:
        return [self.run(name, context) for name in names]


# Global check manager instance
_check_manager: Optional[CheckManager] = None


def get_check_manager() -> CheckManager:
    """Get the global check manager instance"""
    global _check_manager
    if _check_manager is None:
        _check_manager = CheckManager()
        _check_manager.load_checks()
    return _check_manager
