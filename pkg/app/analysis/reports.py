"""
Residual Reports
================

The record every verification produces: the evaluation grid, the residual
at each grid point, the tolerance and free-form details. Reports serialise
with sorted keys so that equal runs give byte-identical output.
"""

import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Tuple


@dataclass
class ResidualReport:
    """Residuals of one check over its grid"""
    name: str
    tolerance: float
    grid: List[Tuple[float, float]] = field(default_factory=list)
    residuals: List[float] = field(default_factory=list)
    details: Dict[str, Any] = field(default_factory=dict)
    forced_pass: bool = True

    def add(self, point: complex, residual: float) -> None:
        self.grid.append((float(point.real), float(point.imag)))
        self.residuals.append(float(residual))

    @property
    def n_samples(self) -> int:
        return len(self.residuals)

    @property
    def finite(self) -> bool:
        return all(math.isfinite(r) for r in self.residuals)

    @property
    def max_residual(self) -> float:
        """Largest residual; infinity as soon as one residual is NaN or infinite"""
        if not self.finite:
            return math.inf
        return max(self.residuals) if self.residuals else 0.0

    @property
    def passed(self) -> bool:
        return self.forced_pass and self.finite and self.max_residual <= self.tolerance

    def fail(self, reason: str) -> None:
        """Mark the report failed for a reason other than a residual"""
        self.forced_pass = False
        self.details.setdefault("failures", []).append(reason)

    def to_json(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "pass": self.passed,
            "tolerance": self.tolerance,
            "n_samples": self.n_samples,
            "max_residual": self.max_residual,
            "grid": [list(g) for g in self.grid],
            "residuals": self.residuals,
            "details": self.details,
        }
