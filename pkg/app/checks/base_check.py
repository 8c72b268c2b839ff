"""
Base Check Class
================

Every verification the command-line driver can run is a check: a class
deriving from ``BaseCheck`` that reports its metadata and turns a
``CheckContext`` into a ``CheckReport``. Checks are discovered by the
``CheckManager`` from the modules of this package.
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

from algebra.quadratic_forms import QuadraticForm
from analysis.mellin_remainder import FourierSeries
from analysis.reports import ResidualReport
from analysis.rpf import RpfSpec
from utils.logger import get_logger

CheckReport = ResidualReport


@dataclass
class CheckInfo:
    """Check information and metadata"""
    name: str
    version: str
    description: str
    equations: List[str]  # identities the check verifies
    needs: List[str] = field(default_factory=list)  # CheckContext fields that must be set


@dataclass
class CheckContext:
    """
    Everything a check may need

    Attributes:
        tolerance: Pass threshold for residuals
        sample_count: Number of seeded sample points
        seed: RNG seed of every sample grid
        precision_bits: Default working precision
        p: Group index (group checks)
        form: Seed form (cycle check)
        spec: RPF data (verification checks)
        series: Fourier coefficients (functional equation)
        max_depth: Orbit search depth
    """
    tolerance: float
    sample_count: int
    seed: int
    precision_bits: int
    p: Optional[int] = None
    form: Optional[QuadraticForm] = None
    spec: Optional[RpfSpec] = None
    series: Optional[FourierSeries] = None
    max_depth: Optional[int] = None
    extras: Dict[str, Any] = field(default_factory=dict)


class BaseCheck(ABC):
    """
    Base class for all checks

    Subclasses implement ``get_check_info`` and ``run``.
    """

    def __init__(self):
        self.info = self.get_check_info()
        self.logger = get_logger(f"checks.{self.info.name}")
        self.enabled = True

    @abstractmethod
    def get_check_info(self) -> CheckInfo:
        """
        Get check information

        Returns:
            CheckInfo object with check metadata
        """

    @abstractmethod
    def run(self, context: CheckContext) -> CheckReport:
        """
        Run the check

        Args:
            context: Inputs and run settings

        Returns:
            Report with residuals, pass/fail and details
        """

    def missing_inputs(self, context: CheckContext) -> List[str]:
        return [name for name in self.info.needs if getattr(context, name) is None]

    def finish(self, report: CheckReport) -> CheckReport:
        self.logger.check_event(self.info.name, passed=report.passed, samples=report.n_samples,
                                max_residual=f"{report.max_residual:.3e}")
        return report
